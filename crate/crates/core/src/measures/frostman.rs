use serde::{Deserialize, Serialize};

use super::{DiscreteMeasure, MeasureError};
use crate::transfer::linear_fit;

/// Two-sided power-law fit of ball masses, `C⁻r^{δ⁻} ≤ μ(B(x,r)) ≤ C⁺r^{δ⁺}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrostmanReport {
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub scale_range: (f64, f64),
    /// Root-mean-square residual of the two log-log fits.
    pub fit_residual: f64,
    /// Set when `δ⁺` exceeds `δ⁻` by more than [`FROSTMAN_NOISE`].
    pub flagged: bool,
}

pub const FROSTMAN_NOISE: f64 = 0.05;

/// Fraction of the scale ladder dropped at each end before fitting.
pub const SCALE_TRIM: f64 = 0.1;

fn geometric_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

fn check_scale(m: &DiscreteMeasure, scale: f64) -> Result<(), MeasureError> {
    if scale < 2.0 * m.resolution() {
        Err(MeasureError::ScaleBelowResolution { scale, resolution: m.resolution() })
    } else {
        Ok(())
    }
}

/// Log-log fits of the sup and inf over centres of `μ(B(x, r))` on a geometric
/// ladder in `[h_min, h_max]`; centres are atoms at evenly spaced mass quantiles.
pub fn frostman_exponents(
    m: &DiscreteMeasure,
    h_min: f64,
    h_max: f64,
    n_scales: usize,
    n_centers: usize,
) -> Result<FrostmanReport, MeasureError> {
    check_scale(m, h_min)?;
    if !(h_max > h_min) || n_scales < 5 || n_centers == 0 {
        return Err(MeasureError::InvalidArgument("need h_min < h_max, n_scales >= 5, n_centers >= 1".into()));
    }
    let trim = (n_scales as f64 * SCALE_TRIM).floor() as usize;
    let scales: Vec<f64> = geometric_ladder(h_min, h_max, n_scales)[trim..n_scales - trim].to_vec();
    let centers = m.quantile_atoms(n_centers);
    let mut sups = Vec::with_capacity(scales.len());
    let mut infs = Vec::with_capacity(scales.len());
    for &r in &scales {
        let masses: Vec<f64> = centers.iter().map(|&x| m.ball(x, r)).collect();
        sups.push(masses.iter().cloned().fold(0.0, f64::max));
        infs.push(masses.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    let xs: Vec<f64> = scales.iter().map(|r| r.ln()).collect();
    let ls: Vec<f64> = sups.iter().map(|v| v.ln()).collect();
    let li: Vec<f64> = infs.iter().map(|v| v.ln()).collect();
    let (delta_plus, a_plus) = linear_fit(&xs, &ls);
    let (delta_minus, a_minus) = linear_fit(&xs, &li);
    let c_plus = scales.iter().zip(&sups).map(|(r, v)| v / r.powf(delta_plus)).fold(0.0, f64::max);
    let c_minus = scales.iter().zip(&infs).map(|(r, v)| v / r.powf(delta_minus)).fold(f64::INFINITY, f64::min);
    let sq: f64 = xs
        .iter()
        .enumerate()
        .map(|(k, x)| (ls[k] - a_plus - delta_plus * x).powi(2) + (li[k] - a_minus - delta_minus * x).powi(2))
        .sum();
    Ok(FrostmanReport {
        delta_minus,
        delta_plus,
        c_minus,
        c_plus,
        scale_range: (h_min, h_max),
        fit_residual: (sq / (2 * xs.len()) as f64).sqrt(),
        flagged: delta_plus > delta_minus + FROSTMAN_NOISE,
    })
}

/// Most centres used by [`doubling_constant`]; larger measures are subsampled by mass quantile.
pub const DOUBLING_CENTERS: usize = 4096;

/// `sup μ(B(x, 2R)) / μ(B(x, R))` over atoms `x` and the given radii.
pub fn doubling_constant(m: &DiscreteMeasure, scale_ladder: &[f64]) -> Result<f64, MeasureError> {
    if scale_ladder.is_empty() {
        return Err(MeasureError::InvalidArgument("empty scale ladder".into()));
    }
    for &r in scale_ladder {
        check_scale(m, r)?;
    }
    let centers: Vec<f64> =
        if m.len() <= DOUBLING_CENTERS { m.positions().to_vec() } else { m.quantile_atoms(DOUBLING_CENTERS) };
    let mut worst = 1.0f64;
    for &x in &centers {
        for &r in scale_ladder {
            worst = worst.max(m.ball(x, 2.0 * r) / m.ball(x, r));
        }
    }
    Ok(worst)
}
