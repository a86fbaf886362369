//! Monte Carlo studies across a viscosity grid with common random numbers.
//!
//! Each sample draws one noise path and runs every `ν` on it. Samples are
//! independent, so callers may evaluate [`run_sample`] in any order or in
//! parallel; [`aggregate`] reduces them in index order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::Basis;
use crate::diagnostics::VorticityGrid;
use crate::error::{Error, Result};
use crate::galerkin::{Operators, RunStatus, SimConfig, Simulator, Trajectory};
use crate::noise::{sample_path, sample_seed, NoisePath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StudyKind {
    /// `sup_t ‖u^ν − u^0‖_{L²}`
    InviscidLimit,
    /// `sup_t ‖u^ν‖²_{L²}`
    UniformEnergy,
    /// `sup_t ‖ξ^ν‖_p^p`
    Vorticity { p: f64 },
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InviscidLimit => "invlimit",
            Self::UniformEnergy => "uniform",
            Self::Vorticity { .. } => "vorticity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    /// Strictly descending positive viscosities; the inviscid study adds `ν = 0`.
    pub nu_grid: Vec<f64>,
    pub samples: usize,
    /// Template run; its `nu` and noise seed are overridden per run.
    pub base: SimConfig,
    pub seed: u64,
}

impl StudySpec {
    pub fn validate(&self, kind: StudyKind) -> Result<()> {
        self.base.validate()?;
        if self.samples == 0 {
            return Err(Error::Config("study needs at least one sample".into()));
        }
        if self.nu_grid.is_empty() {
            return Err(Error::Config("viscosity grid is empty".into()));
        }
        if self.nu_grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("viscosity grid entries must be positive".into()));
        }
        if self.nu_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("viscosity grid must be strictly descending".into()));
        }
        match kind {
            StudyKind::InviscidLimit => {
                if self.nu_grid.len() < 3 {
                    return Err(Error::Config("inviscid study needs at least three viscosities".into()));
                }
                if let Some(n) = self.base.noise_spec() {
                    n.validate_for_inviscid()?;
                }
            }
            StudyKind::Vorticity { p } => {
                if !(p.is_finite() && p > 2.0) {
                    return Err(Error::Config(format!("vorticity study needs finite p > 2, got {p}")));
                }
            }
            StudyKind::UniformEnergy => {}
        }
        Ok(())
    }

    /// The run list for one sample: the grid, then `ν = 0` for the inviscid study.
    pub fn run_nus(&self, kind: StudyKind) -> Vec<f64> {
        let mut v = self.nu_grid.clone();
        if kind == StudyKind::InviscidLimit {
            v.push(0.0);
        }
        v
    }

    /// The shared noise path of sample `index` (empty when noise is off).
    pub fn sample_path(&self, index: usize) -> Result<NoisePath> {
        match self.base.noise_spec() {
            Some(mut spec) => {
                spec.seed = sample_seed(self.seed, index as u64);
                sample_path(&spec)
            }
            None => Ok(NoisePath::zeros(0, self.base.steps(), self.base.dt)),
        }
    }
}

/// Per-sample result: one value per grid viscosity.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub index: usize,
    pub path_checksum: String,
    pub values: Vec<f64>,
}

/// Shared, immutable inputs for a study.
pub struct StudyContext<'a> {
    pub spec: &'a StudySpec,
    pub kind: StudyKind,
    pub ops: &'a Operators,
    /// Needed for vorticity studies only.
    pub vorticity: Option<&'a VorticityGrid>,
}

impl<'a> StudyContext<'a> {
    pub fn new(
        spec: &'a StudySpec,
        kind: StudyKind,
        ops: &'a Operators,
        vorticity: Option<&'a VorticityGrid>,
    ) -> Result<Self> {
        spec.validate(kind)?;
        if spec.base.modes != ops.modes() {
            return Err(Error::Contract(format!(
                "study has K = {}, operators {}",
                spec.base.modes,
                ops.modes()
            )));
        }
        if matches!(kind, StudyKind::Vorticity { .. }) && vorticity.is_none() {
            return Err(Error::Contract("vorticity study needs a vorticity grid".into()));
        }
        Ok(Self {
            spec,
            kind,
            ops,
            vorticity,
        })
    }

    fn run(&self, nu: f64, path: &NoisePath, sample: usize) -> Result<Trajectory> {
        let cfg = SimConfig {
            nu,
            ..self.spec.base.clone()
        };
        let tr = Simulator::new(self.ops, cfg)?.run(path)?;
        match tr.status {
            RunStatus::Completed => Ok(tr),
            RunStatus::BlewUp { step } => Err(Error::StudyBlowUp { nu, sample, step }),
        }
    }
}

pub fn run_sample(ctx: &StudyContext<'_>, index: usize) -> Result<SampleOutcome> {
    let path = ctx.spec.sample_path(index)?;
    let checksum = path.checksum();
    let nus = ctx.spec.run_nus(ctx.kind);
    let mut values = Vec::with_capacity(ctx.spec.nu_grid.len());
    match ctx.kind {
        StudyKind::InviscidLimit => {
            let reference = ctx.run(0.0, &path, index)?;
            for &nu in &nus[..nus.len() - 1] {
                values.push(ctx.run(nu, &path, index)?.sup_distance(&reference)?);
            }
        }
        StudyKind::UniformEnergy => {
            for &nu in &nus {
                values.push(ctx.run(nu, &path, index)?.sup_energy());
            }
        }
        StudyKind::Vorticity { p } => {
            let vg = ctx.vorticity.expect("checked at construction");
            for &nu in &nus {
                let tr = ctx.run(nu, &path, index)?;
                values.push(tr.records.iter().map(|r| vg.lp_pow(&r.coeffs, p)).fold(0.0, f64::max));
            }
        }
    }
    Ok(SampleOutcome {
        index,
        path_checksum: checksum,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least squares on `(ln x, ln y)`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!(
            "log-log fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|&(x, y)| !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite())
    {
        return Err(Error::Domain("log-log fit needs positive finite data".into()));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("log-log fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(Fit { slope, intercept, r2 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub nu: f64,
    pub mean: f64,
    /// Standard error of the mean (0 for a single sample).
    pub std_error: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub kind: StudyKind,
    pub rows: Vec<StudyRow>,
    /// Per-sample noise checksums in sample order.
    pub path_checksums: Vec<String>,
    /// `max / min` of the row means.
    pub ratio: f64,
    /// Fit of mean against `ν` (inviscid study only).
    pub fit: Option<Fit>,
    /// Every step down the grid lowers the mean, up to one paired standard error.
    pub monotone: bool,
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ordered reduction of sample outcomes (any input order).
pub fn aggregate(spec: &StudySpec, kind: StudyKind, mut outcomes: Vec<SampleOutcome>) -> Result<StudyTable> {
    outcomes.sort_by_key(|o| o.index);
    if outcomes.len() != spec.samples || outcomes.iter().enumerate().any(|(i, o)| o.index != i) {
        return Err(Error::Contract("sample outcomes are incomplete".into()));
    }
    let g = spec.nu_grid.len();
    if outcomes.iter().any(|o| o.values.len() != g) {
        return Err(Error::Contract("sample outcome has the wrong number of values".into()));
    }
    let rows: Vec<StudyRow> = spec
        .nu_grid
        .iter()
        .enumerate()
        .map(|(i, &nu)| {
            let values: Vec<f64> = outcomes.iter().map(|o| o.values[i]).collect();
            let (mean, std_error) = mean_se(&values);
            StudyRow {
                nu,
                mean,
                std_error,
                values,
            }
        })
        .collect();
    let max = rows.iter().map(|r| r.mean).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.mean).fold(f64::INFINITY, f64::min);
    let ratio = if min > 0.0 { max / min } else { f64::INFINITY };
    let monotone = rows.windows(2).all(|w| {
        let diffs: Vec<f64> = w[1].values.iter().zip(&w[0].values).map(|(b, a)| b - a).collect();
        let (d, se) = mean_se(&diffs);
        d < se || d < 0.0
    });
    let fit = match kind {
        StudyKind::InviscidLimit => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.nu, r.mean)).collect();
            Some(fit_loglog(&pts)?)
        }
        _ => None,
    };
    Ok(StudyTable {
        kind,
        rows,
        path_checksums: outcomes.into_iter().map(|o| o.path_checksum).collect(),
        ratio,
        fit,
        monotone,
    })
}

fn run_all(spec: &StudySpec, kind: StudyKind, basis: &Basis) -> Result<StudyTable> {
    let ops = Operators::assemble(basis)?;
    let vg = VorticityGrid::new(basis);
    let ctx = StudyContext::new(spec, kind, &ops, Some(&vg))?;
    let outcomes = (0..spec.samples)
        .map(|i| run_sample(&ctx, i))
        .collect::<Result<Vec<_>>>()?;
    aggregate(spec, kind, outcomes)
}

/// Sequential inviscid-limit study.
pub fn inviscid_study(spec: &StudySpec, basis: &Basis) -> Result<StudyTable> {
    run_all(spec, StudyKind::InviscidLimit, basis)
}

/// Sequential `E sup_t ‖u^ν‖²` study.
pub fn uniform_bound_study(spec: &StudySpec, basis: &Basis) -> Result<StudyTable> {
    run_all(spec, StudyKind::UniformEnergy, basis)
}

/// Sequential `E sup_t ‖ξ^ν‖_p^p` study.
pub fn vorticity_bound_study(spec: &StudySpec, basis: &Basis, p: f64) -> Result<StudyTable> {
    run_all(spec, StudyKind::Vorticity { p }, basis)
}

/// The desk-scale viscosity grid.
pub fn default_nu_grid() -> Vec<f64> {
    vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
}
