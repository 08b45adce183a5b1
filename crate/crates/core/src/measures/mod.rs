//! Atomic approximations of self-conformal and random measures, with
//! Frostman, doubling and ergodic diagnostics.

mod discrete;
mod ergodic;
mod frostman;

pub use discrete::*;
pub use ergodic::*;
pub use frostman::*;

use crate::ifs::IfsError;
use crate::partition::PartitionError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("atom budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("scale {scale:e} is below twice the resolution {resolution:e}")]
    ScaleBelowResolution { scale: f64, resolution: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}
