use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the hat game library.
#[derive(Debug, Error)]
pub enum HatError {
    #[error("division by zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("pole: denominator vanishes at {0}")]
    Pole(String),
    #[error("singular renewal system")]
    SingularSystem,
    #[error("probability out of range: {0}")]
    ProbabilityOutOfRange(String),
    #[error("degenerate probability {0}: must lie strictly between 0 and 1")]
    DegenerateProbability(String),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("canonicalization limit: {hats} hats exceeds the maximum of {max}")]
    CanonicalizationLimit { hats: usize, max: usize },
    #[error("non-committing strategy: a block table never commits")]
    NonCommitting,
    #[error("search space too large for exhaustive scan: {space} candidates at {hats} hats")]
    SearchSpaceTooLarge { hats: usize, space: String },
    #[error("a checkpoint path is required for {0}")]
    CheckpointRequired(String),
    #[error("checkpoint {path} belongs to a different configuration")]
    CheckpointMismatch { path: PathBuf },
    #[error("search interrupted at cursor {cursor}")]
    Interrupted { cursor: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown strategy: {0}")]
    UnknownStrategy(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HatError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        HatError::InvalidInput(msg.into())
    }

    /// True for errors caused by the filesystem rather than the mathematics.
    pub fn is_io(&self) -> bool {
        matches!(self, HatError::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, HatError>;
