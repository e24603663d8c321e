use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("numerical instability at step {step}: {detail}")]
    NumericalStability { step: usize, detail: String },

    #[error("pure state with a non-tangent derivative (|r·dr| = {0:e})")]
    InconsistentInput(f64),

    #[error("outcome {outcome} has zero probability but derivative {derivative:e}; the Fisher information diverges")]
    SingularOutcome { outcome: usize, derivative: f64 },

    #[error("rotation undefined: the pre-rotation Bloch vector has no x-z component")]
    UndefinedRotation,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
