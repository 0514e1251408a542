use thiserror::Error;

/// Errors raised by the computation modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("vanishing order of the zero polynomial is undefined")]
    ZeroPolynomial,

    #[error("polynomial is not real-valued: {0}")]
    NotReal(String),

    #[error("evaluation of a real polynomial returned imaginary part {imag:e} (tolerance {tol:e})")]
    RealityViolation { imag: f64, tol: f64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("zero vector cannot seed a unitary frame")]
    ZeroVector,

    #[error("degenerate gradient at sample point (|dr| = {norm:e}); not a smooth boundary point")]
    DegenerateGradient { norm: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    Quadrature { requested: f64, achieved: f64 },

    #[error("weight is undefined at the point: {0}")]
    WeightDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
