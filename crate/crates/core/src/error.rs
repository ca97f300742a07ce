use thiserror::Error;

/// Errors produced by the numerical and ingestion layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("parse error: {0}")]
    ParseFile(String),

    #[error("divergence is infinite: p has mass where q is zero (index {index})")]
    InfiniteDivergence { index: usize },

    #[error("word {word} has zero marginal probability; its decoder is undefined")]
    UndefinedWord { word: usize },

    #[error("similarity undefined: both encoders carry no information")]
    UndefinedSimilarity,

    #[error("chips without observations for language {language_id}: {chips:?}")]
    UncoveredChips { language_id: u32, chips: Vec<u32> },

    #[error("value {value} outside curve range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
