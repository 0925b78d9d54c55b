//! File formats, reports and sweeps around `whichway_core`.

pub mod config;
pub mod error;
pub mod format;
pub mod output;
pub mod report;
pub mod sweep;

pub use config::RunConfig;
pub use error::{AppError, Result};
pub use report::{execute, Completed, RunReport};
