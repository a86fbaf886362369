//! Run configuration: one TOML document covering the domain, basis, run,
//! noise, study and audit settings. Unknown keys are rejected and every
//! field is validated before any computation starts.

use std::fs;
use std::path::{Path, PathBuf};

use navslip_core::experiments::{default_nu_grid, StudyKind, StudySpec};
use navslip_core::galerkin::{Forcing, ForcingProfile};
use navslip_core::noise::DEFAULT_M;
use navslip_core::{DomainSpec, NoiseSpec, SimConfig};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Output directory.
    pub out: PathBuf,
    /// `error`, `warn`, `info`, `debug` or `trace`.
    pub verbosity: String,
    /// Worker threads for studies; 0 uses every core.
    pub threads: usize,
    /// Also write tidy long-format CSV for plotting.
    pub plot_data: bool,
    pub domain: DomainSection,
    pub basis: BasisSection,
    pub sim: SimSection,
    pub noise: NoiseSection,
    pub study: StudySection,
    pub audit: AuditSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSection {
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSection {
    pub modes: usize,
    /// Cache file; defaults to `basis.json` in the output directory.
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub nu: f64,
    pub dt: f64,
    pub t_final: f64,
    pub save_stride: usize,
    /// Include `c_1..c_K` columns in the trajectory CSV.
    pub write_coeffs: bool,
    /// `c(0)`; empty means the rest state, shorter lists are zero-padded.
    pub initial: Vec<f64>,
    pub forcing: Vec<ForcingEntry>,
}

/// `mode` counts from 1. Give either `value` or `times` with `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingEntry {
    pub mode: usize,
    pub value: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub enabled: bool,
    pub m: u32,
    /// Forced modes; defaults to all `K`.
    pub modes: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub nu_grid: Vec<f64>,
    pub samples: usize,
    /// Vorticity exponent.
    pub p: f64,
    pub thresholds: StudyThresholds,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyThresholds {
    pub max_ratio: Option<f64>,
    pub min_slope: Option<f64>,
    pub min_r2: Option<f64>,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSection {
    /// Step sizes, coarsest first; each must be a whole multiple of the finest.
    pub dts: Vec<f64>,
    pub min_order: Option<f64>,
    pub max_relative: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            verbosity: "info".into(),
            threads: 0,
            plot_data: false,
            domain: DomainSection::default(),
            basis: BasisSection::default(),
            sim: SimSection::default(),
            noise: NoiseSection::default(),
            study: StudySection::default(),
            audit: AuditSection::default(),
        }
    }
}

impl Default for DomainSection {
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

impl Default for BasisSection {
    fn default() -> Self {
        Self { modes: 32, cache: None }
    }
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            nu: 1e-2,
            dt: 1e-3,
            t_final: 1.0,
            save_stride: 1,
            write_coeffs: false,
            initial: Vec::new(),
            forcing: Vec::new(),
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            enabled: true,
            m: DEFAULT_M,
            modes: None,
            seed: 0,
        }
    }
}

impl Default for StudySection {
    fn default() -> Self {
        Self {
            nu_grid: default_nu_grid(),
            samples: 64,
            p: 4.0,
            thresholds: StudyThresholds::default(),
        }
    }
}

impl Default for AuditSection {
    fn default() -> Self {
        Self {
            dts: vec![4e-3, 2e-3, 1e-3],
            min_order: None,
            max_relative: None,
        }
    }
}

/// Command-line overrides, applied on top of the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub nu: Option<f64>,
    pub modes: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub alpha: Option<f64>,
    pub m: Option<u32>,
    pub samples: Option<usize>,
    pub plot_data: bool,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| AppError::Config(format!("config: {e}")))
    }

    /// Reads a TOML config, or the `config` object of a run manifest (`.json`).
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            #[derive(Deserialize)]
            struct Embedded {
                config: Config,
            }
            let m: Embedded =
                serde_json::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
            return Ok(m.config);
        }
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.noise.seed = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.nu {
            self.sim.nu = v;
        }
        if let Some(v) = o.modes {
            self.basis.modes = v;
        }
        if let Some(v) = o.dt {
            self.sim.dt = v;
        }
        if let Some(v) = o.t_final {
            self.sim.t_final = v;
        }
        if let Some(v) = o.alpha {
            self.domain.alpha = v;
        }
        if let Some(v) = o.m {
            self.noise.m = v;
        }
        if let Some(v) = o.samples {
            self.study.samples = v;
        }
        self.plot_data |= o.plot_data;
    }

    pub fn cache_path(&self) -> PathBuf {
        self.basis.cache.clone().unwrap_or_else(|| self.out.join("basis.json"))
    }

    pub fn log_level(&self) -> Result<log::LevelFilter> {
        self.verbosity
            .parse()
            .map_err(|_| AppError::Config(format!("unknown verbosity {:?}", self.verbosity)))
    }

    /// Checks everything a `basis` run needs.
    pub fn validate_basis(&self) -> Result<DomainSpec> {
        self.log_level()?;
        if self.basis.modes == 0 {
            return Err(AppError::Config("basis.modes (K) must be at least 1".into()));
        }
        Ok(DomainSpec::new(self.domain.alpha)?)
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        self.validate_basis()?;
        let k = self.basis.modes;
        if self.sim.initial.len() > k {
            return Err(AppError::Config(format!(
                "sim.initial has {} values but K = {k}",
                self.sim.initial.len()
            )));
        }
        let mut initial = self.sim.initial.clone();
        if !initial.is_empty() {
            initial.resize(k, 0.0);
        }
        let forcing = self
            .sim
            .forcing
            .iter()
            .map(|f| {
                if f.mode == 0 {
                    return Err(AppError::Config("forcing modes count from 1".into()));
                }
                let profile = match (f.value, &f.times, &f.values) {
                    (Some(v), None, None) => ForcingProfile::Constant(v),
                    (None, Some(t), Some(v)) => ForcingProfile::Tabulated {
                        times: t.clone(),
                        values: v.clone(),
                    },
                    _ => {
                        return Err(AppError::Config(format!(
                            "forcing on mode {} needs either `value` or both `times` and `values`",
                            f.mode
                        )))
                    }
                };
                Ok(Forcing {
                    mode: f.mode - 1,
                    profile,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let noise = if self.noise.enabled {
            Some(NoiseSpec {
                m: self.noise.m,
                modes: self.noise.modes.unwrap_or(k),
                seed: self.noise.seed,
                dt: self.sim.dt,
                steps: 0,
            })
        } else {
            None
        };
        let cfg = SimConfig {
            nu: self.sim.nu,
            t_final: self.sim.t_final,
            dt: self.sim.dt,
            modes: k,
            forcing,
            initial,
            noise,
            save_stride: self.sim.save_stride,
        };
        cfg.validate()?;
        let cfg = SimConfig {
            noise: cfg.noise_spec(),
            ..cfg
        };
        if let Some(n) = &cfg.noise {
            n.validate()?;
        }
        Ok(cfg)
    }

    pub fn study_spec(&self, kind: StudyKind) -> Result<StudySpec> {
        let spec = StudySpec {
            nu_grid: self.study.nu_grid.clone(),
            samples: self.study.samples,
            base: self.sim_config()?,
            seed: self.noise.seed,
        };
        spec.validate(kind)?;
        Ok(spec)
    }

    /// Audit step sizes with the refinement factor of each relative to the finest.
    pub fn audit_levels(&self) -> Result<Vec<(f64, usize)>> {
        let dts = &self.audit.dts;
        if dts.len() < 2 {
            return Err(AppError::Config("audit.dts needs at least two step sizes".into()));
        }
        if dts.iter().any(|d| !(d.is_finite() && *d > 0.0)) || dts.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(AppError::Config(
                "audit.dts must be positive and strictly decreasing".into(),
            ));
        }
        let finest = *dts.last().expect("nonempty");
        dts.iter()
            .map(|&dt| {
                let f = (dt / finest).round();
                if (f * finest - dt).abs() > 1e-9 * dt {
                    return Err(AppError::Config(format!(
                        "audit step {dt} is not a whole multiple of {finest}"
                    )));
                }
                Ok((dt, f as usize))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = Config::default();
        let sim = c.sim_config().unwrap();
        assert_eq!(sim.modes, 32);
        assert_eq!(sim.steps(), 1000);
        assert_eq!(sim.noise.unwrap().m, 5);
        assert_eq!(sim.noise.unwrap().steps, 1000);
        assert!(c.study_spec(StudyKind::InviscidLimit).is_ok());
        assert_eq!(c.audit_levels().unwrap(), vec![(4e-3, 4), (2e-3, 2), (1e-3, 1)]);
    }

    #[test]
    fn parses_full_document() {
        let c = Config::from_toml(
            r#"
            out = "runs/a"
            threads = 2
            [domain]
            alpha = 2.0
            [basis]
            modes = 8
            [sim]
            nu = 0.0
            initial = [1.0, 0.5]
            [[sim.forcing]]
            mode = 2
            value = 0.25
            [[sim.forcing]]
            mode = 3
            times = [0.0, 1.0]
            values = [0.0, 2.0]
            [noise]
            enabled = false
            [study]
            nu_grid = [0.1, 0.01, 0.001]
            thresholds = { max_ratio = 2.0 }
            "#,
        )
        .unwrap();
        let sim = c.sim_config().unwrap();
        assert_eq!(sim.initial.len(), 8);
        assert_eq!(sim.forcing[0].mode, 1);
        assert_eq!(sim.forcing[1].profile.at(0.5), 1.0);
        assert!(sim.noise.is_none());
        assert_eq!(c.study.thresholds.max_ratio, Some(2.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for doc in [
            "bogus = 1",
            "[sim]\nviscosity = 0.1",
            "[study.thresholds]\nmin_slop = 0.4",
        ] {
            assert!(matches!(Config::from_toml(doc), Err(AppError::Config(_))), "{doc}");
        }
    }

    #[test]
    fn validation_errors() {
        let mut c = Config::default();
        c.basis.modes = 0;
        assert!(c.sim_config().is_err());
        let mut c = Config::default();
        c.sim.forcing = vec![ForcingEntry {
            mode: 1,
            value: None,
            times: None,
            values: None,
        }];
        assert!(c.sim_config().is_err());
        let mut c = Config::default();
        c.domain.alpha = -1.0;
        assert!(c.validate_basis().is_err());
        let c = Config {
            verbosity: "loud".into(),
            ..Config::default()
        };
        assert!(c.validate_basis().is_err());
        let mut c = Config::default();
        c.audit.dts = vec![3e-3, 2e-3];
        assert!(c.audit_levels().is_err());
    }

    #[test]
    fn overrides_win() {
        let mut c = Config::default();
        c.apply(&Overrides {
            seed: Some(9),
            nu: Some(0.0),
            modes: Some(4),
            plot_data: true,
            ..Default::default()
        });
        assert_eq!((c.noise.seed, c.sim.nu, c.basis.modes, c.plot_data), (9, 0.0, 4, true));
    }
}
