//! Fourier transforms of discrete measures, windowed decay fits, regular
//! words and the statistics fed to the sum-product exponential-sum bound.

mod regular;
mod sum_product;
mod transform;

pub use regular::*;
pub use sum_product::*;
pub use transform::*;

use crate::measures::MeasureError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FourierError {
    #[error("|ξ| = {xi} needs resolution ≤ {required_tol:e}, measure has {resolution:e}")]
    ResolutionTooCoarse { xi: f64, resolution: f64, required_tol: f64 },
    #[error("enumeration budget of {0} words exceeded")]
    BudgetExceeded(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
