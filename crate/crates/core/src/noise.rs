//! Trace-class Q-Wiener forcing `√Q W(t) = Σ λ_k^{-m} β_k(t) v_k`.
//!
//! Paths hold raw Brownian increments; the `λ_k^{-m}` scaling is applied
//! where increments are consumed, so one path serves every `ν` and `m`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::basis::{hex_digest, Basis};
use crate::error::{Error, Result};
use crate::experiments::fit_loglog;

/// Smallest `m` with `m > 4`, the regularity needed for inviscid studies.
pub const DEFAULT_M: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Covariance exponent in `Q = A^{-2m}`.
    pub m: u32,
    /// Number of forced modes.
    pub modes: usize,
    pub seed: u64,
    pub dt: f64,
    pub steps: usize,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("noise exponent m must be positive".into()));
        }
        if self.modes == 0 {
            return Err(Error::Config("noise needs at least one mode".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("noise dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::Config("noise needs at least one step".into()));
        }
        Ok(())
    }

    /// Inviscid-limit studies need `m > 4`.
    pub fn validate_for_inviscid(&self) -> Result<()> {
        self.validate()?;
        if self.m < DEFAULT_M {
            return Err(Error::Config(format!(
                "inviscid studies need m >= {DEFAULT_M}, got {}",
                self.m
            )));
        }
        Ok(())
    }
}

/// Raw increments `Δβ_k ~ N(0, dt)`, row-major `steps × modes`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    modes: usize,
    steps: usize,
    dt: f64,
    seed: u64,
    increments: Vec<f64>,
}

impl NoisePath {
    pub fn from_raw(modes: usize, steps: usize, dt: f64, seed: u64, increments: Vec<f64>) -> Result<Self> {
        if increments.len() != modes * steps {
            return Err(Error::Contract(format!(
                "expected {} increments for {steps} x {modes}, got {}",
                modes * steps,
                increments.len()
            )));
        }
        Ok(Self {
            modes,
            steps,
            dt,
            seed,
            increments,
        })
    }

    pub fn zeros(modes: usize, steps: usize, dt: f64) -> Self {
        Self {
            modes,
            steps,
            dt,
            seed: 0,
            increments: vec![0.0; modes * steps],
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn row(&self, step: usize) -> &[f64] {
        &self.increments[step * self.modes..(step + 1) * self.modes]
    }

    pub fn column(&self, mode: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(move |s| self.increments[s * self.modes + mode])
    }

    /// First `modes` columns.
    pub fn truncate_modes(&self, modes: usize) -> Self {
        let modes = modes.min(self.modes);
        let mut inc = Vec::with_capacity(modes * self.steps);
        for s in 0..self.steps {
            inc.extend_from_slice(&self.row(s)[..modes]);
        }
        Self {
            modes,
            steps: self.steps,
            dt: self.dt,
            seed: self.seed,
            increments: inc,
        }
    }

    /// Same Brownian path on a grid `factor` times coarser: consecutive
    /// increments are summed pairwise (then pairwise again for powers of two).
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps.is_multiple_of(factor) {
            return Err(Error::Config(format!(
                "cannot coarsen {} steps by a factor of {factor}",
                self.steps
            )));
        }
        let steps = self.steps / factor;
        let mut inc = vec![0.0; steps * self.modes];
        for s in 0..steps {
            for k in 0..self.modes {
                let fine: Vec<f64> = (0..factor)
                    .map(|i| self.increments[(s * factor + i) * self.modes + k])
                    .collect();
                inc[s * self.modes + k] = pairwise_sum(&fine);
            }
        }
        Ok(Self {
            modes: self.modes,
            steps,
            dt: self.dt * factor as f64,
            seed: self.seed,
            increments: inc,
        })
    }

    /// Hex SHA-256 over the little-endian increment bytes.
    pub fn checksum(&self) -> String {
        let mut bytes = Vec::with_capacity(self.increments.len() * 8);
        for v in &self.increments {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        hex_digest(&bytes)
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Draws a path. Mode `k` uses ChaCha20 stream `k` under the master seed, so a
/// path with fewer modes is an exact prefix of one with more.
pub fn sample_path(spec: &NoiseSpec) -> Result<NoisePath> {
    spec.validate()?;
    let sd = spec.dt.sqrt();
    let mut inc = vec![0.0; spec.steps * spec.modes];
    for k in 0..spec.modes {
        let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
        rng.set_stream(k as u64);
        for s in 0..spec.steps {
            let z: f64 = StandardNormal.sample(&mut rng);
            inc[s * spec.modes + k] = sd * z;
        }
    }
    Ok(NoisePath {
        modes: spec.modes,
        steps: spec.steps,
        dt: spec.dt,
        seed: spec.seed,
        increments: inc,
    })
}

/// Seed for Monte Carlo sample `index` under `master` (SplitMix64 finalizer).
pub fn sample_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `λ_k^{-m}` per mode.
pub fn noise_amplitudes(lambdas: &[f64], m: u32) -> Result<Vec<f64>> {
    lambdas
        .iter()
        .map(|&l| {
            if l > 0.0 {
                Ok(l.powi(-(m as i32)))
            } else {
                Err(Error::Domain(format!("eigenvalue must be positive, got {l}")))
            }
        })
        .collect()
}

/// `tr Q = Σ λ_k^{-2m}` over the truncation.
pub fn trace_q(lambdas: &[f64], m: u32) -> Result<f64> {
    Ok(noise_amplitudes(lambdas, m)?.iter().map(|a| a * a).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityReport {
    /// `M_K = Σ_{k ≤ K} λ_k^{-2m+3}`.
    pub total: f64,
    pub partial_sums: Vec<f64>,
    /// `term_k / M_k` for the last (up to) ten `k`.
    pub tail_increments: Vec<f64>,
    /// Fitted decay exponent `p` of the terms in `k` over the upper half.
    pub tail_exponent: f64,
    /// `p > 1.1`: terms decay like a convergent p-series.
    pub converging: bool,
}

pub fn summability_report(lambdas: &[f64], m: u32) -> Result<SummabilityReport> {
    if lambdas.is_empty() {
        return Err(Error::Domain("empty spectrum".into()));
    }
    if lambdas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("eigenvalues must be sorted ascending".into()));
    }
    let power = 3 - 2 * m as i32;
    let mut terms = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        if !(l > 0.0) {
            return Err(Error::Domain(format!("eigenvalue must be positive, got {l}")));
        }
        terms.push(l.powi(power));
    }
    let mut partial_sums = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        partial_sums.push(acc);
    }
    let k = terms.len();
    let tail_start = k.saturating_sub(10);
    let tail_increments = (tail_start..k).map(|i| terms[i] / partial_sums[i]).collect();

    let half = k / 2;
    let points: Vec<(f64, f64)> = (half..k).map(|i| ((i + 1) as f64, terms[i])).collect();
    let tail_exponent = if points.len() >= 3 {
        -fit_loglog(&points)?.slope
    } else {
        f64::NAN
    };
    Ok(SummabilityReport {
        total: acc,
        partial_sums,
        tail_increments,
        tail_exponent,
        converging: tail_exponent > 1.1,
    })
}

/// `λ_k^{-m} μ_k`: coefficients of the vorticity noise in the `ζ` family.
pub fn tilde_q_diagonal(basis: &Basis, m: u32) -> Vec<f64> {
    basis
        .pairs()
        .iter()
        .map(|p| p.lambda.powi(-(m as i32)) * p.mu)
        .collect()
}
