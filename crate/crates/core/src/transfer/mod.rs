//! Complex transfer operators on grid functions, their block decomposition
//! over a partition, and the damped Dolgopyat operators.

mod dolgopyat;
mod grid;
mod operator;
mod random;

pub use dolgopyat::*;
pub use grid::GridFunction;
pub use operator::*;
pub use random::{random_cone_function, random_dominated};

use crate::ifs::IfsError;
use crate::partition::PartitionError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransferError {
    #[error("the b-norm needs b != 0")]
    ZeroB,
    #[error("norm {norm:e} at iterate {n} exceeds the overflow limit")]
    Overflow { n: usize, norm: f64 },
    #[error("group {0} is not part of the partition")]
    UnknownGroup(usize),
    #[error("enumeration budget of {0} words exceeded")]
    BudgetExceeded(usize),
    #[error("string of length {len} is shorter than {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("(branch {branch}, tile {tile}) is not in J_s")]
    InvalidIndex { branch: usize, tile: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("selected J is not dense ({} uncovered hit tiles)", .0.uncovered.len())]
    DensityFailed(Box<Selection>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}
