use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FourierError;
use crate::measures::DiscreteMeasure;
use crate::transfer::linear_fit;

/// Largest `|ξ|·resolution` accepted by [`fourier_transform`].
pub const FOURIER_GUARD: f64 = 0.05;

/// Frequency samples per unit of `ξ·diam(supp μ)` inside a window.
pub const SAMPLES_PER_PERIOD: f64 = 8.0;

fn guard(m: &DiscreteMeasure, xi: f64) -> Result<(), FourierError> {
    if xi.abs() * m.resolution() > FOURIER_GUARD {
        Err(FourierError::ResolutionTooCoarse {
            xi,
            resolution: m.resolution(),
            required_tol: FOURIER_GUARD / xi.abs(),
        })
    } else {
        Ok(())
    }
}

/// `μ̂(ξ) = Σ m_k e^{-2πiξx_k}`.
pub fn fourier_transform(m: &DiscreteMeasure, xi: f64) -> Result<Complex64, FourierError> {
    guard(m, xi)?;
    Ok(transform_unchecked(m, xi))
}

fn transform_unchecked(m: &DiscreteMeasure, xi: f64) -> Complex64 {
    m.positions().iter().zip(m.masses()).map(|(&x, &q)| Complex64::from_polar(q, -TAU * xi * x)).sum()
}

/// `max_k |μ̂(lo + kΔ)|` over `count` equally spaced frequencies, by the
/// rotation recurrence `e^{-2πi(ξ+Δ)x} = e^{-2πiξx} e^{-2πiΔx}` per atom.
fn window_sup(m: &DiscreteMeasure, lo: f64, hi: f64, count: usize) -> f64 {
    let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
    // Restart the recurrence every block to keep rounding drift negligible.
    const BLOCK: usize = 256;
    (0..count.div_ceil(BLOCK))
        .into_par_iter()
        .map(|blk| {
            let start = blk * BLOCK;
            let len = BLOCK.min(count - start);
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            for (&x, &q) in m.positions().iter().zip(m.masses()) {
                let mut z = Complex64::from_polar(q, -TAU * (lo + start as f64 * step) * x);
                let rot = Complex64::from_polar(1.0, -TAU * step * x);
                for a in acc.iter_mut() {
                    *a += z;
                    z *= rot;
                }
            }
            acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Windowed suprema of `|μ̂|` and the fitted decay exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Geometric centre of each window.
    pub xi_ladder: Vec<f64>,
    pub sup_moduli: Vec<f64>,
    /// `-slope` of `log sup|μ̂|` against `log ξ`.
    pub alpha_fit: f64,
    pub fit_residual: f64,
}

/// Sup of `|μ̂|` on a dense grid inside each `[lo, hi]` window, then a log-log fit.
pub fn decay_fit_windows(m: &DiscreteMeasure, windows: &[(f64, f64)]) -> Result<DecayFit, FourierError> {
    if windows.len() < 2 || windows.iter().any(|&(lo, hi)| !(lo > 0.0 && hi >= lo)) {
        return Err(FourierError::InvalidArgument("need at least two positive windows".into()));
    }
    let xi_top = windows.iter().map(|w| w.1).fold(0.0, f64::max);
    guard(m, xi_top)?;
    let diam = m.hull().len().max(m.resolution());
    let mut xi_ladder = Vec::with_capacity(windows.len());
    let mut sup_moduli = Vec::with_capacity(windows.len());
    for &(lo, hi) in windows {
        let count = (((hi - lo) * diam * SAMPLES_PER_PERIOD).ceil() as usize + 1).max(2);
        xi_ladder.push((lo * hi).sqrt());
        sup_moduli.push(window_sup(m, lo, hi, count));
    }
    let xs: Vec<f64> = xi_ladder.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = sup_moduli.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    let sq: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(DecayFit { xi_ladder, sup_moduli, alpha_fit: -slope, fit_residual: (sq / xs.len() as f64).sqrt() })
}

/// Geometric windows `[ξ_k, ξ_{k+1}]` between `xi_min` and `xi_max`.
pub fn geometric_windows(xi_min: f64, xi_max: f64, windows: usize) -> Vec<(f64, f64)> {
    let ratio = (xi_max / xi_min).powf(1.0 / windows as f64);
    (0..windows).map(|k| (xi_min * ratio.powi(k as i32), xi_min * ratio.powi(k as i32 + 1))).collect()
}

/// [`decay_fit_windows`] over `windows` geometric windows.
pub fn decay_fit(m: &DiscreteMeasure, xi_min: f64, xi_max: f64, windows: usize) -> Result<DecayFit, FourierError> {
    if !(xi_min > 0.0 && xi_max > xi_min) || windows < 2 {
        return Err(FourierError::InvalidArgument("need 0 < xi_min < xi_max and two or more windows".into()));
    }
    decay_fit_windows(m, &geometric_windows(xi_min, xi_max, windows))
}

/// Refinement tolerance that puts `xi_max` well inside the quadrature guard.
pub fn auto_tolerance(xi_max: f64) -> f64 {
    0.1 * FOURIER_GUARD / xi_max.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Ifs;
    use crate::measures::measure_refine;
    use std::f64::consts::PI;

    fn lebesgue(tol: f64) -> DiscreteMeasure {
        measure_refine(&Ifs::builtin("dyadic").unwrap(), tol).unwrap()
    }

    #[test]
    fn lebesgue_closed_forms() {
        let m = lebesgue(2f64.powi(-12));
        assert!(fourier_transform(&m, 1.0).unwrap().norm() <= 1e-3);
        assert!((fourier_transform(&m, 0.5).unwrap().norm() - 2.0 / PI).abs() < 1e-3);
        assert_eq!(fourier_transform(&m, 0.0).unwrap().norm(), 1.0);
    }

    #[test]
    fn guard_reports_required_tolerance() {
        let m = lebesgue(0.1);
        match fourier_transform(&m, 100.0) {
            Err(FourierError::ResolutionTooCoarse { required_tol, .. }) => assert!((required_tol - 5e-4).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cantor_is_not_rajchman() {
        let m = measure_refine(&Ifs::builtin("cantor3").unwrap(), 3f64.powi(-12)).unwrap();
        let base = fourier_transform(&m, 1.0).unwrap().norm();
        for k in 1..=6 {
            let v = fourier_transform(&m, 3f64.powi(k)).unwrap().norm();
            assert!((v - base).abs() < 1e-4, "k = {k}: {v} vs {base}");
        }
    }

    #[test]
    fn window_sup_matches_direct_evaluation() {
        let m = measure_refine(&Ifs::builtin("gauss23").unwrap(), 1e-4).unwrap();
        let direct = (0..300).map(|k| transform_unchecked(&m, 10.0 + k as f64 * 0.1).norm()).fold(0.0, f64::max);
        assert!((window_sup(&m, 10.0, 39.9, 300) - direct).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_decays_like_one_over_xi() {
        let m = lebesgue(2f64.powi(-16));
        let fit = decay_fit(&m, 2.0, 2048.0, 10).unwrap();
        assert!((fit.alpha_fit - 1.0).abs() < 0.1, "{fit:?}");
    }
}
