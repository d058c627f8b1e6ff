use crate::symbolic::Word;

/// Errors surfaced by the library. Operator-domain violations
/// (`NotInDomain`) are distinguished from caller mistakes
/// (`Precondition`) and from internal cross-check failures
/// (`Inconsistency`), which indicate a bug or a corrupted input tiling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid power vector: {0}")]
    InvalidPowerVector(String),
    #[error("level {k} exceeds the configured cap {cap}")]
    LevelCap { k: u32, cap: u32 },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tiling is outside the operator's domain: {0}")]
    NotInDomain(String),
    #[error("cross-check failed: {0}")]
    Inconsistency(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("word {word} is not a member of Omega_{k}")]
    NotInOmega { word: Word, k: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
