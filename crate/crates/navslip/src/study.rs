//! Parallel drivers: Monte Carlo studies over a rayon pool and the
//! time-step refinement behind the energy audit.

use std::time::Instant;

use navslip_core::diagnostics::{energy_audit, EnergyAudit, VorticityGrid};
use navslip_core::experiments::{aggregate, run_sample, StudyContext, StudyKind, StudySpec, StudyTable};
use navslip_core::noise::sample_path;
use navslip_core::{Basis, NoisePath, Operators, SimConfig, Simulator, Trajectory};
use rayon::prelude::*;

use crate::error::{AppError, Result};

pub fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AppError::Config(format!("thread pool: {e}")))
}

/// Runs every sample in parallel and reduces in sample order. Returns the
/// table and per-sample wall-clock seconds. On failure the error of the
/// lowest-numbered failing sample is reported, independent of scheduling.
pub fn run_study(
    spec: &StudySpec,
    kind: StudyKind,
    basis: &Basis,
    ops: &Operators,
    pool: &rayon::ThreadPool,
) -> Result<(StudyTable, Vec<f64>)> {
    let vg = matches!(kind, StudyKind::Vorticity { .. }).then(|| VorticityGrid::new(basis));
    let ctx = StudyContext::new(spec, kind, ops, vg.as_ref())?;
    let results: Vec<_> = pool.install(|| {
        (0..spec.samples)
            .into_par_iter()
            .map(|i| {
                let t0 = Instant::now();
                let out = run_sample(&ctx, i);
                (out, t0.elapsed().as_secs_f64())
            })
            .collect()
    });
    let mut outcomes = Vec::with_capacity(results.len());
    let mut seconds = Vec::with_capacity(results.len());
    for (r, s) in results {
        outcomes.push(r?);
        seconds.push(s);
    }
    Ok((aggregate(spec, kind, outcomes)?, seconds))
}

/// One level of a refinement study.
#[derive(Debug, Clone)]
pub struct Level {
    pub dt: f64,
    pub trajectory: Trajectory,
    pub audit: EnergyAudit,
}

/// Integrates `cfg` at each `(dt, factor)`, driving every level with the same
/// Brownian path: the finest increments are drawn once and summed
/// pairwise into coarser ones.
pub fn audit_refinement(cfg: &SimConfig, ops: &Operators, levels: &[(f64, usize)]) -> Result<Vec<Level>> {
    let finest = levels
        .iter()
        .min_by_key(|l| l.1)
        .ok_or_else(|| AppError::Config("no refinement levels".into()))?;
    let fine_cfg = SimConfig {
        dt: finest.0,
        ..cfg.clone()
    };
    fine_cfg.validate()?;
    let fine_path = match fine_cfg.noise_spec() {
        Some(spec) => sample_path(&spec)?,
        None => NoisePath::zeros(0, fine_cfg.steps(), fine_cfg.dt),
    };
    levels
        .par_iter()
        .map(|&(dt, factor)| {
            let level_cfg = SimConfig { dt, ..cfg.clone() };
            let path = if cfg.noise.is_some() {
                fine_path.coarsen(factor)?
            } else {
                NoisePath::zeros(0, level_cfg.steps(), dt)
            };
            let trajectory = Simulator::new(ops, level_cfg)?.run(&path)?;
            trajectory.check()?;
            let audit = energy_audit(&trajectory)?;
            Ok(Level { dt, trajectory, audit })
        })
        .collect()
}

/// Observed order of `|R(T)|` between consecutive levels:
/// `ln(R₁ / R₂) / ln(dt₁ / dt₂)`.
pub fn observed_orders(levels: &[Level]) -> Vec<f64> {
    levels
        .windows(2)
        .map(|w| {
            let ratio = w[0].audit.final_residual().abs() / w[1].audit.final_residual().abs();
            ratio.ln() / (w[0].dt / w[1].dt).ln()
        })
        .collect()
}
