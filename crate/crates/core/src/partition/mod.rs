//! The sub-IFS partition with a UNI pair and the interval covers used by the
//! Dolgopyat operators.

mod build;
mod cover;
mod verify;

pub use build::*;
pub use cover::*;
pub use verify::*;

use crate::ifs::IfsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PartitionError {
    #[error("no disjoint pair of equal-length words up to depth {0}")]
    NotFound(usize),
    #[error("separation failed: {0}")]
    SeparationFailed(String),
    #[error("UNI failed at power {power}: margin {margin:e}")]
    UniFailed { power: usize, margin: f64 },
    #[error("too few words at N = {n} for the allocation (T_N = {t_n})")]
    TooFewWords { n: usize, t_n: usize },
    #[error("cover budget of {0} nodes exceeded")]
    BudgetExceeded(usize),
    #[error("degenerate cover: {0}")]
    DegenerateCover(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

#[cfg(test)]
mod tests;
