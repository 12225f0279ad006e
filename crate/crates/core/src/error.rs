use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter arity mismatch: expected {expected}, got {got}")]
    ParamArity { expected: usize, got: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("qubit count mismatch: expected {expected}, got {got}")]
    QubitMismatch { expected: usize, got: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("bit vector has length {got}, expected {expected}")]
    BitLength { expected: usize, got: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("penalty weight must be positive, got {0}")]
    BadLambda(f64),

    #[error("no penalty form for {0} constraint; it can only be enforced by a tailored variational form")]
    NoPenaltyForm(&'static str),

    #[error("too many variables for exhaustive enumeration: {got} > {max}")]
    TooManyVariables { got: usize, max: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("constraint not representable: {0}")]
    NotRepresentable(String),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("objective returned non-finite value {value} at evaluation {evaluation}")]
    NonFiniteObjective { evaluation: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
