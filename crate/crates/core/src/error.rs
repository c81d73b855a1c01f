//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A required CSV column is missing from the header row.
    #[error("schema error: missing required column `{column}`")]
    Schema { column: String },

    /// A data row could not be parsed.
    #[error("row error at line {line}: {message}")]
    Row { line: u64, message: String },

    /// A raw severity label is not covered by the mapping policy.
    #[error("unmapped severity label `{label}`")]
    UnmappedSeverity { label: String },

    /// The corpus or label set does not contain both classes.
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    /// A split parameter would leave one side without both classes.
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    /// Stratified folding is impossible for the given labels.
    #[error("stratification error: {0}")]
    Stratification(String),

    /// Invalid configuration value.
    #[error("config error: {0}")]
    Config(String),

    /// Model fitting failed.
    #[error("fit error: {0}")]
    Fit(String),

    /// Probability calibration failed.
    #[error("calibration error: {0}")]
    Calibration(String),

    /// SMOTE resampling failed.
    #[error("resample error: {0}")]
    Resample(String),

    /// Prediction failed (usually a dimension mismatch).
    #[error("predict error: {0}")]
    Predict(String),

    /// Metric or harness evaluation failed.
    #[error("evaluation error: {0}")]
    Eval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
