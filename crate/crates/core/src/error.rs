use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A record does not conform to the input schema.
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// A single generation parameter matched too few reference CVs for a fit.
    #[error("parameter `{parameter}` matches only {count} reference CVs")]
    SparseParameter { parameter: String, count: usize },

    /// The reference group is below the safeguard threshold; the attempt is abandoned.
    #[error("reference group has {count} CVs, below the minimum of {min_group}")]
    Abandoned { count: usize, min_group: usize },

    /// One or more corpus records failed schema validation.
    #[error("{} invalid record(s); first: {}", .0.len(), .0.first().map(ToString::to_string).unwrap_or_default())]
    InvalidRecords(Vec<RecordDiagnostic>),

    #[error("similarity: {0}")]
    Similarity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordDiagnostic {
    pub index: usize,
    pub id: String,
    pub message: String,
}

impl std::fmt::Display for RecordDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "record {} ({}): {}", self.index, self.id, self.message)
    }
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
