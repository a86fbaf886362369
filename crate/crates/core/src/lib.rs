//! Spectral Galerkin simulation of the 2D stochastic Navier–Stokes equations on
//! the unit disk under the Navier slip-with-friction boundary condition.
//!
//! The crate is `no_std` with `alloc`. Everything here is pure computation:
//! file formats, threads and the command line live in the `navslip` crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
pub mod bessel;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod galerkin;
pub mod noise;
pub mod quadrature;
pub mod secular;

pub use basis::{build_basis, Basis, DomainSpec, EigenPair, Parity};
pub use error::{Error, Result};
pub use galerkin::{BoundaryGram, ConvectionTensor, Operators, SimConfig, Simulator, SpectralField, Trajectory};
pub use noise::{NoisePath, NoiseSpec};
pub use quadrature::QuadratureGrid;
