use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (matrix norm {norm:e})")]
    Convergence { sweeps: usize, norm: f64 },

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("matrix is not positive: minimum eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("vector is not tangent to the orbit: degenerate-block component {0:e}")]
    NonTangent(f64),

    #[error("tangent vectors live at different base points")]
    BaseMismatch,

    #[error("determinant deviates from 1: |det - 1| = {0:e}")]
    DetNotOne(f64),

    #[error("trace-normalization denominator {0:e} is degenerate")]
    DegenerateDenominator(f64),

    #[error("state is not pure (rank {0})")]
    NotPure(usize),

    #[error("operation undefined at the maximally mixed point (r = {0:e})")]
    AtCenter(f64),

    #[error("Bloch vector norm {0} exceeds 1")]
    NotState(f64),

    #[error("state is not a product state (factorization gap {0:e})")]
    NotProduct(f64),

    #[error("(A,B)-rank mismatch: {from:?} vs {to:?}")]
    RankMismatch { from: (usize, usize), to: (usize, usize) },

    #[error("trajectory left the state space at t = {time} (minimum eigenvalue {min_eigenvalue:e})")]
    LeftStateSpace { time: f64, min_eigenvalue: f64 },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NonFinite { .. } => "non_finite",
            Error::Convergence { .. } => "convergence",
            Error::Singular => "singular",
            Error::Domain(_) => "domain",
            Error::TraceNotOne(_) => "trace_not_one",
            Error::NotPositive(_) => "not_positive",
            Error::NonTangent(_) => "non_tangent",
            Error::BaseMismatch => "base_mismatch",
            Error::DetNotOne(_) => "det_not_one",
            Error::DegenerateDenominator(_) => "degenerate_denominator",
            Error::NotPure(_) => "not_pure",
            Error::AtCenter(_) => "at_center",
            Error::NotState(_) => "not_state",
            Error::NotProduct(_) => "not_product",
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::LeftStateSpace { .. } => "left_state_space",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}
