use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("quadrature grid too coarse: {what} deviation {deviation:.3e} exceeds {limit:.1e}")]
    GridTooCoarse {
        what: &'static str,
        deviation: f64,
        limit: f64,
    },
    #[error("suspected double root of the secular equation for n = {n} near s = {s:.6}")]
    Tangency { n: u32, s: f64 },
    #[error("non-finite state at step {step}")]
    BlowUp { step: usize },
    #[error("run blew up at step {step} (nu = {nu}, sample = {sample})")]
    StudyBlowUp { nu: f64, sample: usize, step: usize },
    #[error("contract violation: {0}")]
    Contract(String),
}
