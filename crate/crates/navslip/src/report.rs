//! CSV tables. Floats use Rust's shortest round-trip scientific form, so
//! every written value parses back to the same bits.

use std::path::Path;

use navslip_core::diagnostics::{EnergyAudit, InequalityReport};
use navslip_core::experiments::StudyTable;
use navslip_core::Trajectory;

use crate::atomic;
use crate::error::{AppError, Result};

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Builds a CSV in memory, then writes it atomically.
pub fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| AppError::Format(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| AppError::Format(e.to_string()))?;
    atomic::write_bytes(path, &bytes)
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

pub fn trajectory_header(modes: usize, with_coeffs: bool) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    if with_coeffs {
        h.extend((1..=modes).map(|k| format!("c_{k}")));
    }
    h.extend(strings(&[
        "energy",
        "grad_energy",
        "boundary_form",
        "noise_increment_ip",
    ]));
    h
}

pub fn write_trajectory(path: &Path, traj: &Trajectory, modes: usize, with_coeffs: bool) -> Result<()> {
    let rows = traj.records.iter().map(|r| {
        let mut row = vec![num(r.t)];
        if with_coeffs {
            row.extend(r.coeffs.iter().map(|c| num(*c)));
        }
        row.extend([r.energy, r.grad_energy, r.boundary_form, r.noise_ip].map(num));
        row
    });
    write_csv(path, &trajectory_header(modes, with_coeffs), rows)
}

/// Tidy form: `t, variable, value`.
pub fn write_trajectory_long(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut rows = Vec::new();
    for r in &traj.records {
        for (name, v) in [
            ("energy", r.energy),
            ("grad_energy", r.grad_energy),
            ("boundary_form", r.boundary_form),
            ("noise_increment_ip", r.noise_ip),
        ] {
            rows.push(vec![num(r.t), name.to_string(), num(v)]);
        }
        for (k, c) in r.coeffs.iter().enumerate() {
            rows.push(vec![num(r.t), format!("c_{}", k + 1), num(*c)]);
        }
    }
    write_csv(path, &strings(&["t", "variable", "value"]), rows)
}

pub fn write_audit(path: &Path, audit: &EnergyAudit) -> Result<()> {
    let header = strings(&[
        "t",
        "energy",
        "dissipation",
        "initial_energy",
        "boundary",
        "forcing",
        "noise",
        "ito_correction",
        "residual",
    ]);
    let rows = audit.rows.iter().map(|r| {
        [
            r.t,
            r.energy,
            r.dissipation,
            r.initial,
            r.boundary,
            r.forcing,
            r.noise,
            r.ito,
            r.residual,
        ]
        .map(num)
        .to_vec()
    });
    write_csv(path, &header, rows)
}

pub fn write_inequality(path: &Path, report: &InequalityReport) -> Result<()> {
    let header = strings(&[
        "k",
        "n",
        "parity",
        "lambda",
        "mu",
        "mu_sq_over_1_plus_lambda",
        "zeta_h1_over_lambda_plus_1",
        "zeta_l2",
    ]);
    let rows = report.rows.iter().map(|r| {
        vec![
            (r.k + 1).to_string(),
            r.n.to_string(),
            r.parity.as_str().to_string(),
            num(r.lambda),
            num(r.mu),
            num(r.mu_ratio),
            num(r.h1_ratio),
            num(r.zeta_l2),
        ]
    });
    write_csv(path, &header, rows)
}

/// One named check with its measured value and limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    pub fn new(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            limit,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.limit
    }
}

pub fn write_checks(path: &Path, checks: &[Check]) -> Result<()> {
    let rows = checks
        .iter()
        .map(|c| vec![c.name.clone(), num(c.value), num(c.limit), c.passed().to_string()]);
    write_csv(path, &strings(&["check", "value", "limit", "pass"]), rows)
}

/// `nu, mean, std_error, samples`.
pub fn write_study(path: &Path, table: &StudyTable) -> Result<()> {
    let rows = table
        .rows
        .iter()
        .map(|r| vec![num(r.nu), num(r.mean), num(r.std_error), r.values.len().to_string()]);
    write_csv(path, &strings(&["nu", "mean", "std_error", "samples"]), rows)
}

/// `sample, nu, value, path_checksum`.
pub fn write_study_samples(path: &Path, table: &StudyTable) -> Result<()> {
    let mut rows = Vec::new();
    for (s, sum) in table.path_checksums.iter().enumerate() {
        for r in &table.rows {
            rows.push(vec![s.to_string(), num(r.nu), num(r.values[s]), sum.clone()]);
        }
    }
    write_csv(path, &strings(&["sample", "nu", "value", "path_checksum"]), rows)
}

/// `metric, value` summary lines.
pub fn write_summary(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let rows = entries.iter().map(|(k, v)| vec![k.clone(), v.clone()]);
    write_csv(path, &strings(&["metric", "value"]), rows)
}

/// Tidy form: `study, nu, sample, statistic, value`.
pub fn write_study_long(path: &Path, table: &StudyTable) -> Result<()> {
    let kind = table.kind.name();
    let mut rows = Vec::new();
    for r in &table.rows {
        for (s, v) in r.values.iter().enumerate() {
            rows.push(vec![
                kind.to_string(),
                num(r.nu),
                s.to_string(),
                "value".to_string(),
                num(*v),
            ]);
        }
        rows.push(vec![
            kind.to_string(),
            num(r.nu),
            String::new(),
            "mean".to_string(),
            num(r.mean),
        ]);
        rows.push(vec![
            kind.to_string(),
            num(r.nu),
            String::new(),
            "std_error".to_string(),
            num(r.std_error),
        ]);
    }
    write_csv(path, &strings(&["study", "nu", "sample", "statistic", "value"]), rows)
}
