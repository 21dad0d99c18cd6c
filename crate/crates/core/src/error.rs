use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("band-limit must be at least 1")]
    ZeroBandlimit,

    #[error("grid mismatch: expected {expected}, found {found}")]
    GridMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("m = 0 coefficient at l = {l} has imaginary part {imag:e}")]
    NonRealZonal { l: usize, imag: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator adjoint check failed: relative mismatch {0:e}")]
    AdjointMismatch(f64),

    #[error("data constraint is infeasible: {0}")]
    Infeasible(String),

    #[error("solver diverged at iteration {iteration}: {reason}")]
    Diverged { iteration: usize, reason: String },

    #[error("requested {requested} measurements but only {available} samples exist")]
    TooManyMeasurements { requested: usize, available: usize },

    #[error("base map is constant; threshold is undefined")]
    DegenerateMap,
}
