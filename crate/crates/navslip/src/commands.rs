//! The four subcommands. Each writes its manifest before any other file and
//! rewrites it with the final status.

use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use navslip_core::basis::{max_identity_deviation, Basis};
use navslip_core::diagnostics::{basis_inequality_report, energy_audit};
use navslip_core::experiments::{StudyKind, StudyTable};
use navslip_core::galerkin::{assemble_boundary_gram, RunStatus, TrajectoryRecord};
use navslip_core::noise::sample_path;
use navslip_core::{Error as CoreError, NoisePath, Operators, Simulator, Trajectory};

use crate::cache;
use crate::config::Config;
use crate::error::{AppError, Result};
use crate::manifest::ManifestWriter;
use crate::noise_io;
use crate::report::{self, num, Check};
use crate::study;

/// Limit for the identity checks of `basis`.
pub const CHECK_LIMIT: f64 = 1e-8;
/// Inequality ratios must stay within this factor of the `K = 8` maxima.
pub const INEQUALITY_FACTOR: f64 = 10.0;

fn finish<T>(w: &mut ManifestWriter, result: Result<T>) -> Result<T> {
    let status = match &result {
        Ok(_) => "completed".to_string(),
        Err(e) => format!("failed: {e}"),
    };
    w.finish(&status)?;
    result
}

fn load_basis(cfg: &Config, w: &mut ManifestWriter) -> Result<Basis> {
    let (basis, _) = cache::load_or_build(&cfg.cache_path(), cfg.basis.modes, cfg.domain.alpha)?;
    w.manifest.basis_checksum = Some(basis.checksum().to_string());
    w.flush()?;
    Ok(basis)
}

fn write_artifact(w: &mut ManifestWriter, cfg: &Config, name: &str, f: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    f(&cfg.out.join(name))?;
    w.add_file(name);
    Ok(())
}

pub fn basis_checks(basis: &Basis) -> Result<Vec<Check>> {
    let mut checks = vec![Check::new(
        "velocity_gram",
        basis.velocity_gram_deviation(),
        CHECK_LIMIT,
    )];
    match basis.vorticity_gram_closed_form() {
        None => checks.push(Check::new(
            "vorticity_gram",
            max_identity_deviation(&basis.vorticity_gram()),
            CHECK_LIMIT,
        )),
        Some(closed) => {
            let g = basis.vorticity_gram();
            let dev = g
                .iter()
                .flatten()
                .zip(closed.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            checks.push(Check::new("vorticity_gram_closed_form", dev, CHECK_LIMIT));
        }
    }
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    checks.push(Check::new(
        "boundary_vorticity_identity",
        max(basis.boundary_identity_residuals()),
        CHECK_LIMIT,
    ));
    checks.push(Check::new(
        "normal_velocity",
        max(basis.normal_velocity_residuals()),
        CHECK_LIMIT,
    ));
    checks.push(Check::new(
        "gradient_gram_identity",
        assemble_boundary_gram(basis)?.identity_deviation(),
        CHECK_LIMIT,
    ));
    let report = basis_inequality_report(basis);
    let reference = if basis.len() <= 8 {
        report.clone()
    } else {
        basis_inequality_report(&Basis::build_auto(8, *basis.domain())?)
    };
    checks.push(Check::new(
        "mu_ratio_vs_k8",
        report.max_mu_ratio() / reference.max_mu_ratio(),
        INEQUALITY_FACTOR,
    ));
    checks.push(Check::new(
        "h1_ratio_vs_k8",
        report.max_h1_ratio() / reference.max_h1_ratio(),
        INEQUALITY_FACTOR,
    ));
    checks.push(Check::new("tangency_flags", basis.tangencies().len() as f64, 0.0));
    Ok(checks)
}

pub fn cmd_basis(cfg: &Config) -> Result<()> {
    cfg.validate_basis()?;
    let mut w = ManifestWriter::begin("basis", cfg)?;
    let result = (|| {
        let basis = load_basis(cfg, &mut w)?;
        write_artifact(&mut w, cfg, "inequality.csv", |p| {
            report::write_inequality(p, &basis_inequality_report(&basis))
        })?;
        let checks = basis_checks(&basis)?;
        write_artifact(&mut w, cfg, "basis_checks.csv", |p| report::write_checks(p, &checks))?;
        for c in &checks {
            info!("{:<28} {:>12.3e}  (limit {:.1e})", c.name, c.value, c.limit);
        }
        if let Some(flag) = basis.tangencies().first() {
            return Err(CoreError::Tangency { n: flag.n, s: flag.s }.into());
        }
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        if !failed.is_empty() {
            return Err(AppError::Numerical(failed.join(", ")));
        }
        Ok(())
    })();
    finish(&mut w, result)
}

fn finite_prefix(traj: &Trajectory) -> Trajectory {
    let finite = |r: &TrajectoryRecord| {
        [
            r.energy,
            r.grad_energy,
            r.boundary_form,
            r.acc.grad,
            r.acc.boundary,
            r.acc.forcing,
            r.acc.noise,
        ]
        .iter()
        .all(|v| v.is_finite())
    };
    Trajectory {
        records: traj.records.iter().take_while(|r| finite(r)).cloned().collect(),
        ..traj.clone()
    }
}

pub fn cmd_simulate(cfg: &Config) -> Result<()> {
    let sim = cfg.sim_config()?;
    let mut w = ManifestWriter::begin("simulate", cfg)?;
    let result = (|| {
        let basis = load_basis(cfg, &mut w)?;
        let ops = Operators::assemble(&basis)?;
        let path = match sim.noise {
            Some(spec) => {
                let path = sample_path(&spec)?;
                w.manifest.noise_checksums.push(path.checksum());
                write_artifact(&mut w, cfg, "noise.bin", |p| noise_io::write(p, &path))?;
                path
            }
            None => NoisePath::zeros(0, sim.steps(), sim.dt),
        };
        if sim.nu == 0.0 {
            info!("nu = 0: integrating the Euler system");
        }
        let t0 = Instant::now();
        let traj = Simulator::new(&ops, sim.clone())?.run(&path)?;
        w.time("simulate", t0.elapsed().as_secs_f64());
        write_artifact(&mut w, cfg, "trajectory.csv", |p| {
            report::write_trajectory(p, &traj, sim.modes, cfg.sim.write_coeffs)
        })?;
        let audit = match traj.status {
            RunStatus::Completed => energy_audit(&traj)?,
            RunStatus::BlewUp { .. } => energy_audit(&finite_prefix(&traj))?,
        };
        write_artifact(&mut w, cfg, "audit.csv", |p| report::write_audit(p, &audit))?;
        if cfg.plot_data {
            write_artifact(&mut w, cfg, "plot_trajectory.csv", |p| {
                report::write_trajectory_long(p, &traj)
            })?;
        }
        info!(
            "final energy {:.6e}, audit residual {:.3e} (relative {:.3e})",
            traj.final_record().map_or(0.0, |r| r.energy),
            audit.final_residual(),
            audit.relative_residual()
        );
        if let RunStatus::BlewUp { step } = traj.status {
            warn!("partial outputs kept up to step {step}");
        }
        traj.check()?;
        Ok(())
    })();
    finish(&mut w, result)
}

fn study_summary(table: &StudyTable) -> Vec<(String, String)> {
    let mut s = vec![
        ("ratio_max_min".to_string(), num(table.ratio)),
        ("monotone".to_string(), table.monotone.to_string()),
    ];
    if let Some(f) = table.fit {
        s.push(("slope".into(), num(f.slope)));
        s.push(("intercept".into(), num(f.intercept)));
        s.push(("r2".into(), num(f.r2)));
    }
    s
}

fn check_thresholds(cfg: &Config, table: &StudyTable) -> Result<()> {
    let t = &cfg.study.thresholds;
    let mut violated = Vec::new();
    if let Some(max) = t.max_ratio {
        if !(table.ratio <= max) {
            violated.push(format!("ratio {:.4} > {max}", table.ratio));
        }
    }
    if let (Some(min), Some(fit)) = (t.min_slope, table.fit) {
        if !(fit.slope >= min) {
            violated.push(format!("slope {:.4} < {min}", fit.slope));
        }
    }
    if let (Some(min), Some(fit)) = (t.min_r2, table.fit) {
        if !(fit.r2 >= min) {
            violated.push(format!("R^2 {:.4} < {min}", fit.r2));
        }
    }
    if t.monotone && !table.monotone {
        violated.push("means not decreasing along the viscosity grid".into());
    }
    if violated.is_empty() {
        Ok(())
    } else {
        Err(AppError::Threshold(violated.join("; ")))
    }
}

pub fn cmd_study(cfg: &Config, kind: StudyKind) -> Result<StudyTable> {
    let spec = cfg.study_spec(kind)?;
    let pool = study::pool(cfg.threads)?;
    let mut w = ManifestWriter::begin(&format!("study {}", kind.name()), cfg)?;
    let result = (|| {
        let basis = load_basis(cfg, &mut w)?;
        let ops = Operators::assemble(&basis)?;
        let (table, seconds) = study::run_study(&spec, kind, &basis, &ops, &pool)?;
        for (i, s) in seconds.iter().enumerate() {
            w.time(format!("sample {i}"), *s);
        }
        w.manifest.noise_checksums = table.path_checksums.clone();
        let name = kind.name();
        write_artifact(&mut w, cfg, &format!("study_{name}.csv"), |p| {
            report::write_study(p, &table)
        })?;
        write_artifact(&mut w, cfg, &format!("study_{name}_samples.csv"), |p| {
            report::write_study_samples(p, &table)
        })?;
        write_artifact(&mut w, cfg, &format!("study_{name}_summary.csv"), |p| {
            report::write_summary(p, &study_summary(&table))
        })?;
        if cfg.plot_data {
            write_artifact(&mut w, cfg, &format!("plot_{name}.csv"), |p| {
                report::write_study_long(p, &table)
            })?;
        }
        for r in &table.rows {
            info!("nu = {:<8e} mean = {:.6e} +- {:.2e}", r.nu, r.mean, r.std_error);
        }
        info!("max/min ratio {:.4}", table.ratio);
        if let Some(f) = table.fit {
            info!("log-log slope {:.4}, R^2 {:.4}", f.slope, f.r2);
        }
        check_thresholds(cfg, &table)?;
        Ok(table)
    })();
    finish(&mut w, result)
}

pub fn cmd_audit(cfg: &Config) -> Result<()> {
    let sim = cfg.sim_config()?;
    let levels = cfg.audit_levels()?;
    let mut w = ManifestWriter::begin("audit", cfg)?;
    let result = (|| {
        let basis = load_basis(cfg, &mut w)?;
        let ops = Operators::assemble(&basis)?;
        let t0 = Instant::now();
        let results = study::audit_refinement(&sim, &ops, &levels)?;
        w.time("refinement", t0.elapsed().as_secs_f64());
        for (i, l) in results.iter().enumerate() {
            write_artifact(&mut w, cfg, &format!("audit_level{i}.csv"), |p| {
                report::write_audit(p, &l.audit)
            })?;
        }
        let orders = study::observed_orders(&results);
        let header: Vec<String> = ["dt", "final_residual", "relative_residual", "order"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rows = results.iter().enumerate().map(|(i, l)| {
            vec![
                num(l.dt),
                num(l.audit.final_residual()),
                num(l.audit.relative_residual()),
                if i == 0 { String::new() } else { num(orders[i - 1]) },
            ]
        });
        write_artifact(&mut w, cfg, "audit_summary.csv", |p| {
            report::write_csv(p, &header, rows)
        })?;
        for (i, l) in results.iter().enumerate() {
            info!(
                "dt = {:<8e} R(T) = {:+.3e}  relative {:.3e}{}",
                l.dt,
                l.audit.final_residual(),
                l.audit.relative_residual(),
                if i == 0 {
                    String::new()
                } else {
                    format!("  order {:.3}", orders[i - 1])
                }
            );
        }
        let mut violated = Vec::new();
        if let Some(min) = cfg.audit.min_order {
            if let Some(o) = orders.iter().find(|o| !(**o >= min)) {
                violated.push(format!("order {o:.3} < {min}"));
            }
        }
        if let (Some(max), Some(last)) = (cfg.audit.max_relative, results.last()) {
            let rel = last.audit.relative_residual();
            if !(rel <= max) {
                violated.push(format!("relative residual {rel:.3e} > {max}"));
            }
        }
        if violated.is_empty() {
            Ok(())
        } else {
            Err(AppError::Threshold(violated.join("; ")))
        }
    })();
    finish(&mut w, result)
}
