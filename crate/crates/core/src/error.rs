use thiserror::Error;

/// Partial state of an iteration that ran out of budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Unconverged {
    pub iterations: usize,
    pub residual: f64,
    /// Row scaling (`d` for matrices, `phi` for grid functions) at the last iterate.
    pub row_scaling: Vec<f64>,
    /// Column scaling (`e` for matrices, `psi` for grid functions) at the last iterate.
    pub col_scaling: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix order {n} exceeds the permanent cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("internal numerical error: {0}")]
    Internal(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("invalid entry: {0}")]
    InvalidEntry(String),
    #[error("matrix is not in P_n: some positive entry lies on no positive diagonal")]
    NotInPn,
    #[error("no convergence after {} iterations (residual {:e})", .0.iterations, .0.residual)]
    MaxIterExceeded(Box<Unconverged>),
    #[error("entries must be strictly positive")]
    NonPositiveEntry,
    #[error("entries must be nonnegative")]
    NegativeEntry,
    #[error("root bracketing failed (non-finite input?)")]
    BracketFailure,
    #[error("sample {value} outside [1/{lambda}, {lambda}]")]
    BoundsViolated { value: f64, lambda: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("exponent vector is identically zero")]
    AllZeroAlpha,
    #[error("exponent function has zero mean")]
    ZeroMeanExponent,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
