use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DiscreteMeasure, MeasureError};
use crate::ifs::Ifs;

/// Lyapunov exponent, entropy and their ratio for a Bernoulli measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicReport {
    pub lyapunov: f64,
    pub entropy: f64,
    /// `entropy / lyapunov`.
    pub dimension_ratio: f64,
    /// Standard error of the Monte-Carlo Lyapunov estimate.
    pub standard_error: f64,
}

/// `-log|φ_a'(π(σa))|` averaged along `m_p`-random sequences.
///
/// Each sample draws `orbit_length` letters from its own ChaCha stream and
/// returns `-(1/L) log|φ'_{a_1…a_L}(1/2)|`, the Birkhoff average of `τ` with
/// the projection truncated at depth `L`.
pub fn lyapunov_entropy(
    ifs: &Ifs,
    n_samples: usize,
    orbit_length: usize,
    seed: u64,
) -> Result<ErgodicReport, MeasureError> {
    if orbit_length < 50 || n_samples < 2 {
        return Err(MeasureError::InvalidArgument("need orbit_length >= 50 and n_samples >= 2".into()));
    }
    let cdf: Vec<f64> = ifs
        .probs()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let samples: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let letters: Vec<usize> = (0..orbit_length)
                .map(|_| {
                    let u: f64 = rng.gen();
                    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
                })
                .collect();
            // Innermost letter first.
            let mut y = 0.5;
            let mut log_d = 0.0;
            for &a in letters.iter().rev() {
                let j = ifs.map(a).jet_unchecked(y);
                log_d += j.d1.abs().ln();
                y = j.value;
            }
            -log_d / orbit_length as f64
        })
        .collect();
    let n = n_samples as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let entropy = ifs.entropy();
    Ok(ErgodicReport { lyapunov: mean, entropy, dimension_ratio: entropy / mean, standard_error: (var / n).sqrt() })
}

/// `∫ Σ_a p_a (-log|φ_a'(y)|) dμ(y)` against an atomic approximation of `μ_p`.
pub fn lyapunov_quadrature(ifs: &Ifs, m: &DiscreteMeasure) -> f64 {
    m.integrate(|y| ifs.maps().iter().zip(ifs.probs()).map(|(f, p)| -p * f.jet_unchecked(y).d1.abs().ln()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::measure_refine;

    #[test]
    fn affine_systems_are_exact() {
        let r = lyapunov_entropy(&Ifs::builtin("dyadic").unwrap(), 16, 60, 7).unwrap();
        assert!((r.lyapunov - 2f64.ln()).abs() < 1e-12 && r.standard_error < 1e-12);
        assert_eq!(r.entropy, 2f64.ln());
        let r = lyapunov_entropy(&Ifs::builtin("cantor3").unwrap(), 16, 60, 7).unwrap();
        assert!((r.lyapunov - 3f64.ln()).abs() < 1e-12);
        assert!((r.dimension_ratio - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn gauss23_monte_carlo_matches_quadrature() {
        let ifs = Ifs::builtin("gauss23").unwrap();
        let r = lyapunov_entropy(&ifs, 2000, 200, 11).unwrap();
        let q = lyapunov_quadrature(&ifs, &measure_refine(&ifs, 1e-6).unwrap());
        assert!((r.lyapunov - q).abs() < 4.0 * r.standard_error + 1e-3, "{r:?} vs {q}");
        assert_eq!(r, lyapunov_entropy(&ifs, 2000, 200, 11).unwrap());
        assert!(lyapunov_entropy(&ifs, 10, 20, 0).is_err());
    }
}
