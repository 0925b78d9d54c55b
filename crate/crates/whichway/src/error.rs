use std::path::PathBuf;

use thiserror::Error;

/// Process exit code for invalid input.
pub const EXIT_VALIDATION: i32 = 2;
/// Process exit code for a failure inside a pipeline stage.
pub const EXIT_PIPELINE: i32 = 3;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed config: {0}")]
    Config(String),

    #[error("invalid config: {0}")]
    Invalid(#[source] whichway_core::Error),

    #[error("{stage} stage failed: {source}")]
    Pipeline {
        stage: &'static str,
        #[source]
        source: whichway_core::Error,
    },

    #[error("{violations} of {trials} frame instances violate the overlap identity")]
    TheoremViolated { violations: usize, trials: u64 },

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Invalid(_) | AppError::Read { .. } => EXIT_VALIDATION,
            _ => EXIT_PIPELINE,
        }
    }

    /// Splits core errors into input problems and stage failures.
    pub fn from_core(e: whichway_core::Error) -> Self {
        if e.is_validation() {
            AppError::Invalid(e)
        } else {
            AppError::Pipeline {
                stage: e.origin(),
                source: e,
            }
        }
    }

    /// Machine-readable form printed on stderr by the CLI.
    pub fn to_json(&self) -> serde_json::Value {
        let stage = match self {
            AppError::Pipeline { stage, .. } => Some(*stage),
            AppError::TheoremViolated { .. } => Some("frame"),
            AppError::Invalid(e) => Some(e.origin()),
            _ => None,
        };
        serde_json::json!({
            "error": {
                "kind": if self.exit_code() == EXIT_VALIDATION { "validation" } else { "pipeline" },
                "stage": stage,
                "message": self.to_string(),
            }
        })
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
