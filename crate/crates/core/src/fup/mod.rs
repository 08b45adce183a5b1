//! Discretised fractal uncertainty norms `‖1_X F_h^* 1_Y‖` and the closed-form
//! exponent and Schur bounds.

mod norm;
mod sets;

pub use norm::*;
pub use sets::*;

use serde::{Deserialize, Serialize};

use crate::fourier::FourierError;
use crate::ifs::IfsError;
use crate::measures::MeasureError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FupError {
    #[error("grid doubling moved the norm by {delta:e} at h = {h:e}")]
    GridTooCoarse { h: f64, delta: f64 },
    #[error("hypothesis 2α ≤ δ₂⁺ violated: α = {alpha}, δ₂⁺ = {delta2_plus}")]
    HypothesisViolated { alpha: f64, delta2_plus: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

/// Exponent `β = 1/2 - δ₁⁻/2 - δ₂⁻/2 + α/4` with a flag when `β ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaFormula {
    pub beta: f64,
    pub non_positive: bool,
}

pub fn theorem_beta(delta1_minus: f64, delta2_minus: f64, alpha: f64) -> BetaFormula {
    let beta = 0.5 - delta1_minus / 2.0 - delta2_minus / 2.0 + alpha / 4.0;
    BetaFormula { beta, non_positive: beta <= 0.0 }
}

/// `h^{α/2} + h^{δ₂⁺/2}`, the Schur bound on `‖B_t‖²`.
pub fn schur_bound(alpha: f64, delta2_plus: f64, h: f64) -> Result<f64, FupError> {
    if 2.0 * alpha > delta2_plus {
        return Err(FupError::HypothesisViolated { alpha, delta2_plus });
    }
    if !(h > 0.0) {
        return Err(FupError::InvalidArgument(format!("h must be positive, got {h}")));
    }
    Ok(h.powf(alpha / 2.0) + h.powf(delta2_plus / 2.0))
}
