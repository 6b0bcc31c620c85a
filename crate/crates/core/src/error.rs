use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: argument {value} is outside the domain")]
    Domain { function: &'static str, value: f64 },

    #[error("{what} did not converge (residual {residual:e})")]
    Convergence { what: &'static str, residual: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("field `{field}`: {invariant}")]
    Validation { field: String, invariant: String },

    #[error("field `{field}`: polynomial roots are not separated to 1e-8")]
    RootSeparation { field: String },

    #[error("field `{field}` has mixed signature ({r1}, {r2})")]
    MixedSignature { field: String, r1: usize, r2: usize },

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("Gram matrix is not positive definite")]
    Degenerate,

    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lattice rank {rank} exceeds the enumeration cap {cap}")]
    DimensionCap { rank: usize, cap: usize },

    #[error("zero product norm at lattice vector with coordinates {coords:?}")]
    ZeroProductNorm { coords: Vec<i64> },

    #[error("no nonzero lattice point within radius {radius}")]
    EmptyEnumeration { radius: f64 },

    #[error("{0} is not known for this lattice")]
    UnknownInvariant(&'static str),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("rate infeasible at this dimension: need {needed} points, ball holds about {available:.3}")]
    RateInfeasible { needed: f64, available: f64 },

    #[error("shift search gave up after {tries} shifts: best count {best}, need {needed:.3}")]
    ShiftSearch { tries: u64, best: u64, needed: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
