//! Experiment configuration, the named suites, and deterministic report emission.

mod config;
mod report;
mod run;

pub use config::*;
pub use report::*;
pub use run::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{key}`: {reason}")]
    Validation { key: String, reason: String },
    #[error("{experiment}: {message}")]
    Experiment { experiment: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn validation(key: &str, reason: String) -> Self {
        Self::Validation { key: key.to_string(), reason }
    }
}
