//! Galerkin truncation: spectral operators and the time integrator.

mod integrator;
mod operators;

pub use integrator::{
    simulate, step, EnergyAccumulators, Forcing, ForcingProfile, Operators, RunStatus, SimConfig, Simulator,
    Trajectory, TrajectoryRecord,
};
pub use operators::{
    apply_convection, assemble_boundary_gram, assemble_convection, parity_admissible, triad_admissible, BoundaryGram,
    ConvectionTensor, TensorEntry, IDENTITY_LIMIT, SKEW_LIMIT,
};

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::Basis;

/// Coefficients of `u = Σ c_k v_k`. Orthonormality makes `‖u‖_{L²} = |c|₂`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralField(Vec<f64>);

impl SpectralField {
    pub fn zeros(k: usize) -> Self {
        Self(alloc::vec![0.0; k])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `‖u‖²_{L²}`.
    pub fn energy(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `d_k = c_k μ_k`, so `ξ = Σ d_k ζ_k`.
    pub fn vorticity_coeffs(&self, basis: &Basis) -> Vec<f64> {
        self.0.iter().zip(basis.pairs()).map(|(c, p)| c * p.mu).collect()
    }
}

impl From<Vec<f64>> for SpectralField {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}
