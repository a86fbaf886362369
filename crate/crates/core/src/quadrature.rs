//! Tensor-product quadrature on the unit disk: Gauss–Legendre in `r` (with the
//! polar Jacobian folded into the weights) times the uniform trapezoid rule in
//! `θ`, which is exact for trigonometric polynomials of degree below `Ntheta`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nr: usize,
    ntheta: usize,
    r_nodes: Vec<f64>,
    /// Gauss–Legendre weights on [0, 1] multiplied by the node radius.
    r_weights: Vec<f64>,
    theta_nodes: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(nr: usize, ntheta: usize) -> Result<Self> {
        if nr < 2 || ntheta < 2 {
            return Err(Error::Config(format!(
                "quadrature grid needs Nr >= 2 and Ntheta >= 2, got {nr} x {ntheta}"
            )));
        }
        let (x, w) = gauss_legendre(nr);
        let r_nodes: Vec<f64> = x.iter().map(|&t| 0.5 * (t + 1.0)).collect();
        let r_weights = r_nodes.iter().zip(&w).map(|(&r, &wi)| 0.5 * wi * r).collect();
        let h = 2.0 * PI / ntheta as f64;
        let theta_nodes = (0..ntheta).map(|i| i as f64 * h).collect();
        Ok(Self {
            nr,
            ntheta,
            r_nodes,
            r_weights,
            theta_nodes,
        })
    }

    /// A grid resolving modes up to angular index `n_max` and secular root
    /// `s_max`: `Ntheta` integrates quartic products exactly (needed by L⁴
    /// norms, and more than the `3 n_max + 2` triple products require).
    pub fn sized_for(n_max: u32, s_max: f64) -> Self {
        let nr = 48 + (2.5 * s_max).ceil() as usize;
        let ntheta = 4 * n_max as usize + 8;
        Self::new(nr, ntheta).expect("sizes are positive")
    }

    /// Smallest angular node count for which triple products of harmonics up
    /// to `n_max` integrate exactly.
    pub fn min_ntheta(n_max: u32) -> usize {
        3 * n_max as usize + 2
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }

    pub fn r_weights(&self) -> &[f64] {
        &self.r_weights
    }

    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta_nodes
    }

    /// Uniform angular weight `2π / Ntheta`.
    pub fn theta_weight(&self) -> f64 {
        2.0 * PI / self.ntheta as f64
    }

    /// `∫₀¹ f(r) r dr` over the radial rule, given `f` sampled on the nodes.
    pub fn radial_integral(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.r_weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `∫₀^{2π} g(θ) dθ` over the angular rule, given `g` on the nodes.
    pub fn angular_integral(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.theta_weight() * values.into_iter().sum::<f64>()
    }

    /// `∫_disk f dA` for `f(r, θ)` evaluated pointwise.
    pub fn integrate(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (&r, &w) in self.r_nodes.iter().zip(&self.r_weights) {
            let ring: f64 = self.theta_nodes.iter().map(|&t| f(r, t)).sum();
            total += w * ring;
        }
        total * self.theta_weight()
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], ascending, by Newton iteration
/// on the three-term Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
