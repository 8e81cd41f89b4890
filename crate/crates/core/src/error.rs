use crate::quaternion::Quaternion;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("kernel is singular at q = {q}, p = {p}")]
    Singular { q: Quaternion, p: Quaternion },

    #[error("kernel series diverges on the sphere |p| = |q| = {0}")]
    Divergent(f64),

    #[error("no convergence after {terms} terms (last term magnitude {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("non-finite integrand value at node {0}")]
    NonFinite(Quaternion),

    #[error("series tail bound {tail:e} exceeds tolerance {tolerance:e} at max_m = {max_m}")]
    Truncation { tail: f64, tolerance: f64, max_m: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
