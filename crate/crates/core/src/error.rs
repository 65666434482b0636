use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("algebra of rank {rank} with d = {d} has no concrete backing")]
    UnsupportedAlgebra { rank: usize, d: f64 },

    #[error("element is singular: |det| = {det:e}")]
    Singular { det: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("element is not in the open cone: smallest eigenvalue {min_eigenvalue:e}")]
    NotInCone { min_eigenvalue: f64 },

    #[error("non-generic parameter: {what} = {arg} is within the pole guard of a pole")]
    NonGeneric { what: String, arg: f64 },

    #[error("series did not converge after {work} terms (partial value {partial:e}, last layer {last_layer:e})")]
    NoConvergence {
        partial: f64,
        last_layer: f64,
        work: u64,
    },

    #[error("ill-conditioned point: {0}")]
    IllConditioned(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("non-finite importance weight at sample {sample}: {detail}")]
    NonFiniteWeight { sample: u64, detail: String },

    #[error("unknown check `{name}`; registered checks: {}", registered.join(", "))]
    UnknownCheck {
        name: String,
        registered: Vec<String>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
