use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::operators::{assemble_boundary_gram, assemble_convection, BoundaryGram, ConvectionTensor};
use super::SpectralField;
use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::noise::{noise_amplitudes, NoisePath, NoiseSpec};

/// Time dependence of one forced coefficient `f_k(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingProfile {
    Constant(f64),
    /// Piecewise linear through `(times[i], values[i])`, held flat outside.
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl ForcingProfile {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Tabulated { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                let last = times.len() - 1;
                if t >= times[last] {
                    return values[last];
                }
                let i = times.partition_point(|&x| x <= t) - 1;
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Constant(v) if v.is_finite() => Ok(()),
            Self::Constant(v) => Err(Error::Config(format!("forcing value {v} is not finite"))),
            Self::Tabulated { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::Config(format!(
                        "tabulated forcing needs matching nonempty times/values, got {} and {}",
                        times.len(),
                        values.len()
                    )));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Config("forcing times must be strictly increasing".into()));
                }
                if times.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::Config("tabulated forcing contains non-finite data".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    pub mode: usize,
    pub profile: ForcingProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub nu: f64,
    pub t_final: f64,
    pub dt: f64,
    pub modes: usize,
    pub forcing: Vec<Forcing>,
    /// `c(0)`; empty means the rest state.
    pub initial: Vec<f64>,
    pub noise: Option<NoiseSpec>,
    /// Keep every `save_stride`-th step (the last step is always kept).
    pub save_stride: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::Config(format!("viscosity must be >= 0, got {}", self.nu)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config(format!("T_final must be positive, got {}", self.t_final)));
        }
        if self.modes == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if self.save_stride == 0 {
            return Err(Error::Config("save stride must be at least 1".into()));
        }
        let n = (self.t_final / self.dt).round();
        if n < 1.0 || (n * self.dt - self.t_final).abs() > 1e-9 * self.t_final {
            return Err(Error::Config(format!(
                "T_final = {} is not a whole number of steps of dt = {}",
                self.t_final, self.dt
            )));
        }
        if !self.initial.is_empty() && self.initial.len() != self.modes {
            return Err(Error::Config(format!(
                "initial data has {} coefficients, K = {}",
                self.initial.len(),
                self.modes
            )));
        }
        if self.initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("initial data is not finite".into()));
        }
        let mut seen = vec![false; self.modes];
        for f in &self.forcing {
            if f.mode >= self.modes {
                return Err(Error::Config(format!(
                    "forced mode {} is outside K = {}",
                    f.mode, self.modes
                )));
            }
            if core::mem::replace(&mut seen[f.mode], true) {
                return Err(Error::Config(format!("mode {} is forced twice", f.mode)));
            }
            f.profile.validate()?;
        }
        if let Some(noise) = &self.noise {
            if noise.m == 0 {
                return Err(Error::Config("noise exponent m must be positive".into()));
            }
            if noise.modes == 0 || noise.modes > self.modes {
                return Err(Error::Config(format!(
                    "noise acts on {} modes, must be in 1..={}",
                    noise.modes, self.modes
                )));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn initial_field(&self) -> SpectralField {
        if self.initial.is_empty() {
            SpectralField::zeros(self.modes)
        } else {
            SpectralField::from(self.initial.clone())
        }
    }

    /// `f(t)` as a full coefficient vector.
    pub fn forcing_at(&self, t: f64) -> Vec<f64> {
        let mut f = vec![0.0; self.modes];
        for g in &self.forcing {
            f[g.mode] = g.profile.at(t);
        }
        f
    }

    /// The noise spec matching this run's time grid, if noise is on.
    pub fn noise_spec(&self) -> Option<NoiseSpec> {
        self.noise.map(|n| NoiseSpec {
            dt: self.dt,
            steps: self.steps(),
            ..n
        })
    }
}

/// Running left-endpoint time integrals, summed over every step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyAccumulators {
    /// `∫ cᵀ(Λ + B)c dt`
    pub grad: f64,
    /// `∫ cᵀBc dt`
    pub boundary: f64,
    /// `∫ ⟨f, c⟩ dt`
    pub forcing: f64,
    /// `Σ Σ_k λ_k^{-m} ΔB_k c_k`
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub t: f64,
    pub coeffs: Vec<f64>,
    /// `|c|²`
    pub energy: f64,
    /// `cᵀ(Λ + B)c = ‖∇u‖²`
    pub grad_energy: f64,
    /// `cᵀBc`
    pub boundary_form: f64,
    /// `⟨f(t), c⟩`
    pub forcing_ip: f64,
    /// `Σ_k λ_k^{-m} ΔB_k c_k` for the increment leaving this step (0 at the end).
    pub noise_ip: f64,
    /// Integrals over `[0, t]`.
    pub acc: EnergyAccumulators,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    BlewUp { step: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub status: RunStatus,
    pub nu: f64,
    pub dt: f64,
    /// `tr Q` over the forced modes (0 without noise).
    pub trace_q: f64,
    /// Convection step bound `0.5 / (|c(0)| max_k ‖∇v_k‖_∞)`.
    pub cfl_limit: f64,
}

impl Trajectory {
    pub fn final_record(&self) -> Option<&TrajectoryRecord> {
        self.records.last()
    }

    /// `Err` with the failing step if the run blew up.
    pub fn check(&self) -> Result<()> {
        match self.status {
            RunStatus::Completed => Ok(()),
            RunStatus::BlewUp { step } => Err(Error::BlowUp { step }),
        }
    }

    pub fn into_result(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    /// `max` over saved steps of `|c|²`.
    pub fn sup_energy(&self) -> f64 {
        self.records.iter().map(|r| r.energy).fold(0.0, f64::max)
    }

    /// `max` over saved steps of `|c − c'|₂`; both runs must share the grid.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if self.records.len() != other.records.len() {
            return Err(Error::Contract(format!(
                "trajectories have {} and {} records",
                self.records.len(),
                other.records.len()
            )));
        }
        let mut sup = 0.0f64;
        for (a, b) in self.records.iter().zip(&other.records) {
            if a.step != b.step {
                return Err(Error::Contract("trajectories saved at different steps".into()));
            }
            let d: f64 = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y) * (x - y)).sum();
            sup = sup.max(d.sqrt());
        }
        Ok(sup)
    }
}

/// Basis-derived operators shared by every run on one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Operators {
    pub tensor: ConvectionTensor,
    pub gram: BoundaryGram,
    lambdas: Vec<f64>,
    gradient_sup: f64,
}

impl Operators {
    pub fn assemble(basis: &Basis) -> Result<Self> {
        Ok(Self {
            tensor: assemble_convection(basis)?,
            gram: assemble_boundary_gram(basis)?,
            lambdas: basis.lambdas(),
            gradient_sup: basis.gradient_sup().into_iter().fold(0.0, f64::max),
        })
    }

    pub fn modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `cᵀΛc + cᵀBc`.
    pub fn grad_energy(&self, c: &[f64]) -> f64 {
        let diag: f64 = c.iter().zip(&self.lambdas).map(|(x, l)| l * x * x).sum();
        diag + self.gram.quadratic_form(c)
    }
}

/// One configured integrator over shared operators.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    ops: &'a Operators,
    cfg: SimConfig,
    /// `λ_k^{-m}` on forced modes, 0 elsewhere.
    sigma: Vec<f64>,
    /// `1 / (1 + ν λ_k dt)`
    damping: Vec<f64>,
}

impl<'a> Simulator<'a> {
    pub fn new(ops: &'a Operators, cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.modes != ops.modes() {
            return Err(Error::Contract(format!(
                "config has K = {}, operators {}",
                cfg.modes,
                ops.modes()
            )));
        }
        let mut sigma = vec![0.0; cfg.modes];
        if let Some(noise) = &cfg.noise {
            let amp = noise_amplitudes(&ops.lambdas[..noise.modes], noise.m)?;
            sigma[..noise.modes].copy_from_slice(&amp);
        }
        let damping = ops.lambdas.iter().map(|l| 1.0 / (1.0 + cfg.nu * l * cfg.dt)).collect();
        Ok(Self {
            ops,
            cfg,
            sigma,
            damping,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn trace_q(&self) -> f64 {
        self.sigma.iter().map(|s| s * s).sum()
    }

    pub fn cfl_limit(&self) -> f64 {
        let c0 = self.cfg.initial_field().l2_norm();
        0.5 / (c0 * self.ops.gradient_sup)
    }

    /// One semi-implicit Euler–Maruyama step from `c` at time `t`, writing
    /// into `out`. `db` holds raw increments for (at least) the forced modes.
    pub fn step_into(&self, c: &[f64], t: f64, db: &[f64], conv: &mut [f64], out: &mut [f64]) {
        self.ops.tensor.apply_into(c, conv);
        let dt = self.cfg.dt;
        for k in 0..c.len() {
            let mut rhs = c[k] - dt * conv[k];
            if self.sigma[k] != 0.0 {
                rhs += self.sigma[k] * db[k];
            }
            out[k] = rhs;
        }
        for g in &self.cfg.forcing {
            out[g.mode] += dt * g.profile.at(t);
        }
        for (o, d) in out.iter_mut().zip(&self.damping) {
            *o *= d;
        }
    }

    fn check_path(&self, path: &NoisePath) -> Result<()> {
        let Some(noise) = &self.cfg.noise else {
            return Ok(());
        };
        if path.steps() != self.cfg.steps() {
            return Err(Error::Contract(format!(
                "noise path has {} steps, run needs {}",
                path.steps(),
                self.cfg.steps()
            )));
        }
        if path.modes() < noise.modes {
            return Err(Error::Contract(format!(
                "noise path has {} modes, run forces {}",
                path.modes(),
                noise.modes
            )));
        }
        if (path.dt() - self.cfg.dt).abs() > 1e-12 * self.cfg.dt {
            return Err(Error::Contract(format!(
                "noise path dt = {} but run dt = {}",
                path.dt(),
                self.cfg.dt
            )));
        }
        Ok(())
    }

    fn record(&self, step: usize, t: f64, c: &[f64], noise_ip: f64, acc: EnergyAccumulators) -> TrajectoryRecord {
        let forcing_ip = self.cfg.forcing.iter().map(|g| g.profile.at(t) * c[g.mode]).sum();
        TrajectoryRecord {
            step,
            t,
            coeffs: c.to_vec(),
            energy: c.iter().map(|x| x * x).sum(),
            grad_energy: self.ops.grad_energy(c),
            boundary_form: self.ops.gram.quadratic_form(c),
            forcing_ip,
            noise_ip,
            acc,
        }
    }

    /// Integrates over `[0, T_final]`. Blow-up ends the run early with the
    /// partial trajectory kept and the status set.
    pub fn run(&self, path: &NoisePath) -> Result<Trajectory> {
        self.check_path(path)?;
        let cfl_limit = self.cfl_limit();
        if self.cfg.dt > cfl_limit {
            log::warn!("dt = {} exceeds the convection bound {:.3e}", self.cfg.dt, cfl_limit);
        }
        let steps = self.cfg.steps();
        let dt = self.cfg.dt;
        let k = self.cfg.modes;
        let noisy = self.cfg.noise.is_some();
        let zero_row = vec![0.0; k];

        let mut c = self.cfg.initial_field().into_inner();
        let mut next = vec![0.0; k];
        let mut conv = vec![0.0; k];
        let mut acc = EnergyAccumulators::default();
        let mut records = Vec::with_capacity(steps / self.cfg.save_stride + 2);
        let mut status = RunStatus::Completed;

        for n in 0..=steps {
            let t = n as f64 * dt;
            let db = if noisy && n < steps { path.row(n) } else { &zero_row[..] };
            let noise_ip: f64 = c.iter().zip(&self.sigma).zip(db).map(|((x, s), b)| s * b * x).sum();
            let rec = if n % self.cfg.save_stride == 0 || n == steps {
                Some(self.record(n, t, &c, noise_ip, acc))
            } else {
                None
            };
            if n == steps {
                records.extend(rec);
                break;
            }
            let (grad, boundary, forcing) = match &rec {
                Some(r) => (r.grad_energy, r.boundary_form, r.forcing_ip),
                None => {
                    let f: f64 = self.cfg.forcing.iter().map(|g| g.profile.at(t) * c[g.mode]).sum();
                    (self.ops.grad_energy(&c), self.ops.gram.quadratic_form(&c), f)
                }
            };
            records.extend(rec);
            acc.grad += grad * dt;
            acc.boundary += boundary * dt;
            acc.forcing += forcing * dt;
            acc.noise += noise_ip;

            self.step_into(&c, t, db, &mut conv, &mut next);
            if next.iter().any(|v| !v.is_finite()) {
                log::error!("state became non-finite at step {}", n + 1);
                status = RunStatus::BlewUp { step: n + 1 };
                break;
            }
            core::mem::swap(&mut c, &mut next);
        }

        Ok(Trajectory {
            records,
            status,
            nu: self.cfg.nu,
            dt,
            trace_q: self.trace_q(),
            cfl_limit,
        })
    }
}

/// Single step as a free function; `index` labels a blow-up.
pub fn step(
    ops: &Operators,
    cfg: &SimConfig,
    c: &SpectralField,
    t: f64,
    db: &[f64],
    index: usize,
) -> Result<SpectralField> {
    let sim = Simulator::new(ops, cfg.clone())?;
    if c.len() != cfg.modes || (cfg.noise.is_some() && db.len() < cfg.noise.map_or(0, |n| n.modes)) {
        return Err(Error::Contract("step inputs do not match K".into()));
    }
    let mut conv = vec![0.0; cfg.modes];
    let mut out = vec![0.0; cfg.modes];
    let padded;
    let db = if db.len() >= cfg.modes {
        db
    } else {
        padded = {
            let mut v = db.to_vec();
            v.resize(cfg.modes, 0.0);
            v
        };
        &padded[..]
    };
    sim.step_into(c.coeffs(), t, db, &mut conv, &mut out);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { step: index });
    }
    Ok(out.into())
}

/// Assembles operators and runs one trajectory.
pub fn simulate(cfg: &SimConfig, path: &NoisePath, basis: &Basis) -> Result<Trajectory> {
    if cfg.modes != basis.len() {
        return Err(Error::Contract(format!(
            "config has K = {}, basis {}",
            cfg.modes,
            basis.len()
        )));
    }
    let ops = Operators::assemble(basis)?;
    Simulator::new(&ops, cfg.clone())?.run(path)
}
