//! File formats, parallel studies and command implementations for the
//! `navslip` solver. The numerics live in `navslip-core`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod noise_io;
pub mod report;
pub mod study;

pub use config::{Config, Overrides};
pub use error::{AppError, Result};
