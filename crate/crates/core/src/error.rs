use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("duplicate bracket entry [e{i}, e{j}] -> e{k}")]
    DuplicateEntry { i: usize, j: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("endomorphism is not a derivation (residual {residual:e})")]
    NotADerivation { residual: f64 },

    #[error("endomorphism is not self-adjoint (residual {0:e})")]
    NotSelfAdjoint(f64),

    #[error("algebra `{0}` is not nilpotent")]
    NotNilpotent(String),

    #[error("algebra `{0}` is not unimodular")]
    NotUnimodular(String),

    #[error("basis is not nice: {0}")]
    NotNice(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("no nilsoliton: {0}")]
    NoNilsoliton(String),

    #[error("metric is not a nilsoliton normalized to lambda = -1 (lambda {lambda}, residual {residual:e})")]
    NotNormalizedSoliton { lambda: f64, residual: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("hypothesis violated: {what} (residual {residual:e})")]
    Hypothesis { what: String, residual: f64 },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("discretization failure: kernel is not one-dimensional (gap {0:e})")]
    KernelDimension(f64),

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
