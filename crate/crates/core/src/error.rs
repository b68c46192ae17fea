use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` is not categorical")]
    NotCategorical(String),
    #[error("row {row}, column `{column}`: {reason}")]
    BadCell {
        row: usize,
        column: String,
        reason: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema: {0}")]
    Schema(String),
    #[error("feature group `{group}` references outcome column `{column}`")]
    OutcomeLeakage { group: String, column: String },
    #[error("scaler: {0}")]
    Scaler(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite input value")]
    NonFinite,
    #[error("single-class input; need at least two classes")]
    SingleClass,
    #[error("minority class {class} has a single row; cannot form a SMOTE neighbor set")]
    SmoteSingleton { class: usize },
    #[error("empty data")]
    Empty,
    #[error("fold count {k} exceeds sample count {n}")]
    TooManyFolds { k: usize, n: usize },
    #[error("zero variance of paired differences; t statistic undefined")]
    ZeroVariance,
    #[error("config: {0}")]
    Config(String),
    #[error("fixture integrity check failed: {0}")]
    FixtureCorrupt(String),
}
