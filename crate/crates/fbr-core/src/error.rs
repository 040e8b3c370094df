use thiserror::Error;

#[derive(Debug, Error)]
pub enum FbrError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph is already biconnected")]
    AlreadyBiconnected,

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("instance sampling exhausted after {0} rejections; lower the density (side factor) or raise h")]
    SamplingExhausted(usize),

    #[error("verification failure: {0}")]
    VerificationFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
}

impl FbrError {
    /// Process exit code used by the CLI: 2 invalid input, 3 solver
    /// failure, 4 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            FbrError::InvalidInput(_)
            | FbrError::Disconnected
            | FbrError::Io(_)
            | FbrError::Json(_) => 2,
            FbrError::AlreadyBiconnected
            | FbrError::SolverFailure(_)
            | FbrError::SamplingExhausted(_) => 3,
            FbrError::VerificationFailure(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, FbrError>;
