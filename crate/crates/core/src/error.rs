use thiserror::Error;

/// Numerical and parameter errors raised by the operator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("boundary convention {bc} is incompatible with a {topology} grid")]
    Incompatible { bc: &'static str, topology: &'static str },

    #[error("operand mismatch: {0}")]
    OperandMismatch(String),

    #[error("wavefunction has zero norm")]
    ZeroNorm,

    #[error("mass must be nonzero for this operator")]
    ZeroMass,

    #[error("momentum must be nonzero for this operator")]
    ZeroMomentum,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock index {n} is outside the admissible range 0..={max}")]
    OutOfRange { n: usize, max: usize },

    #[error("insufficient domain: eigenfunction {n} is {value:e} at the boundary (limit {limit:e})")]
    InsufficientDomain { n: usize, value: f64, limit: f64 },

    #[error("probe set is empty")]
    EmptyProbes,
}

pub type Result<T> = std::result::Result<T, Error>;
