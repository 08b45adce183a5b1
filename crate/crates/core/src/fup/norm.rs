use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{thicken, FupError, SetSpec, ThickenedSet};
use crate::fourier::fourier_transform;
use crate::measures::{DiscreteMeasure, FrostmanReport};
use crate::transfer::linear_fit;

/// Largest `rows × cols` kept as an explicit matrix; larger kernels are applied matrix-free.
pub const DENSE_LIMIT: usize = 4096 * 4096;

/// Largest change allowed when `grid_per_h` is doubled.
pub const GRID_DOUBLING_TOL: f64 = 1e-3;

/// Relative change of the top Ritz value at which Lanczos stops. Tighter than
/// the 1e-8 the norms are quoted to, so the stopping error stays below it.
pub const RITZ_TOL: f64 = 1e-12;
/// Krylov dimension cap; the basis is kept for reorthogonalisation.
pub const LANCZOS_MAX_STEPS: usize = 300;

/// Midpoint nodes of a union of intervals, `ceil(len/spacing)` cells per interval.
#[derive(Debug, Clone)]
struct Nodes {
    /// Per interval: first node, step and count.
    runs: Vec<(f64, f64, usize)>,
    weights: Vec<f64>,
}

impl Nodes {
    fn new(set: &ThickenedSet, spacing: f64) -> Self {
        let mut runs = Vec::new();
        let mut weights = Vec::new();
        for v in &set.intervals {
            if v.len() <= 0.0 {
                continue;
            }
            // Guard against rounding noise: a length of exactly k spacings gets k cells.
            let count = (v.len() / spacing * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let step = v.len() / count as f64;
            runs.push((v.lo + 0.5 * step, step, count));
            weights.extend(std::iter::repeat_n(step.sqrt(), count));
        }
        Self { runs, weights }
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    fn positions(&self) -> Vec<f64> {
        self.runs.iter().flat_map(|&(x0, step, n)| (0..n).map(move |k| x0 + k as f64 * step)).collect()
    }
}

/// Discretisation of `1_X F_h^* 1_Y`: entry `(2πh)^{-1/2} e^{ixξ/h} √(Δx Δξ)`.
struct Kernel {
    h: f64,
    xs: Nodes,
    ys: Nodes,
    x_pos: Vec<f64>,
    y_pos: Vec<f64>,
    dense: Option<Vec<Complex64>>,
}

/// Rotation recurrence is restarted this often to bound rounding drift.
const RESTART: usize = 256;

impl Kernel {
    fn new(x: &ThickenedSet, y: &ThickenedSet, h: f64, grid_per_h: usize) -> Self {
        let spacing = h / grid_per_h as f64;
        let xs = Nodes::new(x, spacing);
        let ys = Nodes::new(y, spacing);
        let x_pos = xs.positions();
        let y_pos = ys.positions();
        let norm = (TAU * h).powf(-0.5);
        let dense = (xs.len() * ys.len() <= DENSE_LIMIT).then(|| {
            x_pos
                .par_iter()
                .zip(&xs.weights)
                .flat_map_iter(|(&xi, &wx)| {
                    y_pos
                        .iter()
                        .zip(&ys.weights)
                        .map(move |(&yj, &wy)| Complex64::from_polar(norm * wx * wy, xi * yj / h))
                })
                .collect()
        });
        Self { h, xs, ys, x_pos, y_pos, dense }
    }

    /// `out_i = Σ_j e^{±i p_i q_j / h} w_i w'_j v_j` over runs of `q`.
    fn sweep(&self, p: &[f64], pw: &[f64], q: &Nodes, v: &[Complex64], sign: f64) -> Vec<Complex64> {
        let norm = (TAU * self.h).powf(-0.5);
        let h = self.h;
        p.par_iter()
            .zip(pw)
            .map(|(&pi, &wi)| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut j = 0;
                for &(q0, step, count) in &q.runs {
                    let rot = Complex64::from_polar(1.0, sign * pi * step / h);
                    let mut k = 0;
                    while k < count {
                        let mut z = Complex64::from_polar(1.0, sign * pi * (q0 + k as f64 * step) / h);
                        let end = (k + RESTART).min(count);
                        for (w, vi) in q.weights[j + k..j + end].iter().zip(&v[j + k..j + end]) {
                            acc += z * (w * vi);
                            z *= rot;
                        }
                        k = end;
                    }
                    j += count;
                }
                acc * (norm * wi)
            })
            .collect()
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match &self.dense {
            Some(m) => {
                let cols = self.ys.len();
                m.par_chunks(cols).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
            }
            None => self.sweep(&self.x_pos, &self.xs.weights, &self.ys, v, 1.0),
        }
    }

    fn apply_adjoint(&self, u: &[Complex64]) -> Vec<Complex64> {
        match &self.dense {
            Some(m) => {
                let cols = self.ys.len();
                (0..cols)
                    .into_par_iter()
                    .map(|j| u.iter().enumerate().map(|(i, ui)| m[i * cols + j].conj() * ui).sum())
                    .collect()
            }
            None => self.sweep(&self.y_pos, &self.ys.weights, &self.xs, u, -1.0),
        }
    }

    /// Top singular value: Lanczos on `M*M` from the all-ones vector, i.e. a Krylov
    /// acceleration of power iteration. Plain power iteration stalls on the
    /// plateau of singular values near 1 that full boxes produce.
    fn top_singular_value(&self) -> f64 {
        let n = self.ys.len();
        if n == 0 || self.xs.len() == 0 {
            return 0.0;
        }
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
        let norm = |a: &[Complex64]| a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut basis: Vec<Vec<Complex64>> = vec![vec![Complex64::new((n as f64).powf(-0.5), 0.0); n]];
        let (mut alphas, mut betas) = (Vec::new(), Vec::new());
        let mut theta = 0.0f64;
        for _ in 0..LANCZOS_MAX_STEPS.min(n) {
            let q = basis.last().unwrap();
            let mut w = self.apply_adjoint(&self.apply(q));
            alphas.push(dot(q, &w).re);
            // Full reorthogonalisation, twice for stability.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
                }
            }
            let next = tridiagonal_max_eigenvalue(&alphas, &betas);
            let converged = (next - theta).abs() <= RITZ_TOL * next;
            theta = next;
            let beta = norm(&w);
            if converged || beta <= 1e-14 * theta.max(f64::MIN_POSITIVE) {
                break;
            }
            betas.push(beta);
            basis.push(w.into_iter().map(|z| z / beta).collect());
        }
        theta.max(0.0).sqrt()
    }
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal `a` and
/// off-diagonal `b`, by Sturm-sequence bisection.
fn tridiagonal_max_eigenvalue(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len();
    let radius = |i: usize| (if i > 0 { b[i - 1].abs() } else { 0.0 }) + (if i + 1 < k { b[i].abs() } else { 0.0 });
    let mut lo = (0..k).map(|i| a[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..k).map(|i| a[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    // Number of eigenvalues strictly below x.
    let below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..k {
            let off = if i > 0 { b[i - 1] * b[i - 1] } else { 0.0 };
            d = a[i] - x - off / d;
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) < k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A norm with its grid-doubling certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FupNorm {
    /// Value on the doubled grid.
    pub norm: f64,
    pub doubling_delta: f64,
    /// Nodes on the doubled grid, `(#X, #Y)`.
    pub nodes: (usize, usize),
}

/// `‖1_X F_h^* 1_Y‖` at `grid_per_h` and `2·grid_per_h` nodes per `h`.
pub fn fup_norm(x: &ThickenedSet, y: &ThickenedSet, h: f64, grid_per_h: usize) -> Result<FupNorm, FupError> {
    if !(h > 0.0) || grid_per_h == 0 {
        return Err(FupError::InvalidArgument("need h > 0 and grid_per_h ≥ 1".into()));
    }
    if y.total_length() == 0.0 || x.total_length() == 0.0 {
        return Ok(FupNorm { norm: 0.0, doubling_delta: 0.0, nodes: (0, 0) });
    }
    let coarse = Kernel::new(x, y, h, grid_per_h).top_singular_value();
    let fine_kernel = Kernel::new(x, y, h, 2 * grid_per_h);
    let fine = fine_kernel.top_singular_value();
    let delta = (fine - coarse).abs();
    if delta > GRID_DOUBLING_TOL {
        return Err(FupError::GridTooCoarse { h, delta });
    }
    Ok(FupNorm { norm: fine, doubling_delta: delta, nodes: (fine_kernel.xs.len(), fine_kernel.ys.len()) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FupResult {
    /// Decreasing.
    pub h_ladder: Vec<f64>,
    pub norms: Vec<f64>,
    pub doubling_deltas: Vec<f64>,
    /// Slope of `log norm` against `log h`, so that `norm ≈ C h^β`.
    pub beta_fit: f64,
    pub grid_per_h: usize,
}

pub fn fup_exponent(k1: &SetSpec, k2: &SetSpec, h_ladder: &[f64], grid_per_h: usize) -> Result<FupResult, FupError> {
    if h_ladder.len() < 3 {
        return Err(FupError::InvalidArgument("need at least three scales".into()));
    }
    let mut hs = h_ladder.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let mut norms = Vec::with_capacity(hs.len());
    let mut deltas = Vec::with_capacity(hs.len());
    for &h in &hs {
        let r = fup_norm(&thicken(k1, h)?, &thicken(k2, h)?, h, grid_per_h)?;
        norms.push(r.norm);
        deltas.push(r.doubling_delta);
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(FupResult { h_ladder: hs, norms, doubling_deltas: deltas, beta_fit: linear_fit(&xs, &ys).0, grid_per_h })
}

/// Largest `|K(z, z') - μ̂₂((z - z')/h)|` over sampled pairs in `[0, 1]²`, with
/// `K` summed in the factorised form `Σ m_k e^{-2πi z y_k/h} e^{2πi z' y_k/h}`.
/// The first pair is diagonal.
pub fn kernel_check(m2: &DiscreteMeasure, h: f64, sample_pairs: usize, seed: u64) -> Result<f64, FupError> {
    if !(h > 0.0) || sample_pairs == 0 {
        return Err(FupError::InvalidArgument("need h > 0 and at least one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..sample_pairs {
        let z: f64 = rng.gen();
        let zp: f64 = if i == 0 { z } else { rng.gen() };
        let reference = fourier_transform(m2, (z - zp) / h)?;
        let direct: Complex64 = m2
            .positions()
            .iter()
            .zip(m2.masses())
            .map(|(&y, &q)| Complex64::from_polar(q, -TAU * z * y / h) * Complex64::from_polar(1.0, TAU * zp * y / h))
            .sum();
        worst = worst.max((direct - reference).norm());
    }
    Ok(worst)
}

/// Range of the weights `Υ^±(x) = μ(B(x, 2h)) / (4h^{δ^±})` on samples of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpsilonReport {
    pub min_upsilon_minus: f64,
    pub max_upsilon_plus: f64,
    /// `C⁻/4`: `μ(B(x, 2h)) ≥ μ(B(x₀, h)) ≥ C⁻h^{δ⁻}` for a nearby `x₀ ∈ K`.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub samples: usize,
    pub holds: bool,
}

pub fn upsilon_check(
    mu: &DiscreteMeasure,
    frostman: &FrostmanReport,
    x: &ThickenedSet,
    h: f64,
    per_interval: usize,
) -> UpsilonReport {
    let pts: Vec<f64> = x
        .intervals
        .iter()
        .flat_map(|v| {
            (0..per_interval.max(1)).map(move |k| v.lo + v.len() * (k as f64 + 0.5) / per_interval.max(1) as f64)
        })
        .collect();
    let (lo_scale, hi_scale) = (4.0 * h.powf(frostman.delta_minus), 4.0 * h.powf(frostman.delta_plus));
    let mut min_minus = f64::INFINITY;
    let mut max_plus = 0.0f64;
    for &p in &pts {
        let mass = mu.ball(p, 2.0 * h);
        min_minus = min_minus.min(mass / lo_scale);
        max_plus = max_plus.max(mass / hi_scale);
    }
    let lower_bound = frostman.c_minus / 4.0;
    let upper_bound = frostman.c_plus;
    UpsilonReport {
        min_upsilon_minus: min_minus,
        max_upsilon_plus: max_plus,
        lower_bound,
        upper_bound,
        samples: pts.len(),
        holds: min_minus >= lower_bound && max_plus <= upper_bound,
    }
}

/// `(2πh)^{-1/2}` normalisation used by [`fup_norm`].
pub fn semiclassical_normalisation(h: f64) -> f64 {
    (2.0 * PI * h).powf(-0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Ifs;
    use crate::measures::{frostman_exponents, measure_refine};

    fn unit(h: f64) -> ThickenedSet {
        thicken(&SetSpec::interval(0.0, 1.0), h).unwrap()
    }

    #[test]
    fn dense_and_matrix_free_agree() {
        let x = thicken(&SetSpec::Points(vec![0.1, 0.5, 0.8]), 0.05).unwrap();
        let y = thicken(&SetSpec::Points(vec![0.3, 0.7]), 0.05).unwrap();
        let k = Kernel::new(&x, &y, 0.05, 8);
        assert!(k.dense.is_some());
        let v: Vec<Complex64> = (0..k.ys.len()).map(|j| Complex64::new(j as f64, 1.0)).collect();
        let dense = k.apply(&v);
        let free = k.sweep(&k.x_pos, &k.xs.weights, &k.ys, &v, 1.0);
        assert!(dense.iter().zip(&free).all(|(a, b)| (a - b).norm() < 1e-10));
        let u: Vec<Complex64> = (0..k.xs.len()).map(|i| Complex64::new(1.0, i as f64)).collect();
        let dense_t = k.apply_adjoint(&u);
        let free_t = k.sweep(&k.y_pos, &k.ys.weights, &k.xs, &u, -1.0);
        assert!(dense_t.iter().zip(&free_t).all(|(a, b)| (a - b).norm() < 1e-10));
    }

    #[test]
    fn tridiagonal_eigenvalue() {
        assert!((tridiagonal_max_eigenvalue(&[2.0, 2.0], &[1.0]) - 3.0).abs() < 1e-12);
        assert!((tridiagonal_max_eigenvalue(&[0.5], &[]) - 0.5).abs() < 1e-15);
        // 1D Laplacian: 2 - 2cos(kπ/(n+1)).
        let n = 20;
        let top = 2.0 + 2.0 * (PI / (n as f64 + 1.0)).cos();
        assert!((tridiagonal_max_eigenvalue(&vec![2.0; n], &vec![-1.0; n - 1]) - top).abs() < 1e-12);
    }

    #[test]
    fn full_boxes_are_nearly_unitary() {
        let r = fup_norm(&unit(0.01), &unit(0.01), 0.01, 8).unwrap();
        assert!(r.norm >= 0.9 && r.norm <= 1.0 + 1e-6, "{r:?}");
        assert!(r.doubling_delta < 1e-3);
        assert!((semiclassical_normalisation(0.01) - (TAU * 0.01).powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn empty_frequency_set_gives_zero() {
        let r = fup_norm(&unit(0.01), &ThickenedSet::empty(0.01), 0.01, 8).unwrap();
        assert_eq!(r.norm, 0.0);
    }

    #[test]
    fn translation_covariance() {
        let x = thicken(&SetSpec::Points(vec![0.2, 0.6]), 0.02).unwrap();
        let y = thicken(&SetSpec::Points(vec![0.1, 0.4, 0.9]), 0.02).unwrap();
        let a = fup_norm(&x, &y, 0.02, 8).unwrap().norm;
        let b = fup_norm(&x.shifted(0.375), &y.shifted(0.375), 0.02, 8).unwrap().norm;
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn kernel_identity_for_lebesgue() {
        let m = measure_refine(&Ifs::builtin("dyadic").unwrap(), 2f64.powi(-12)).unwrap();
        assert!(kernel_check(&m, 0.01, 100, 5).unwrap() <= 1e-6);
        assert!(kernel_check(&m, 0.001, 10, 5).is_err());
    }

    #[test]
    fn upsilon_weights_on_the_cantor_set() {
        let ifs = Ifs::builtin("cantor3").unwrap();
        let m = measure_refine(&ifs, 3f64.powi(-12)).unwrap();
        let f = frostman_exponents(&m, 3f64.powi(-9), 3f64.powi(-2), 20, 16).unwrap();
        let h = 3f64.powi(-4);
        let near = thicken(&SetSpec::Attractor(ifs), h).unwrap();
        let r = upsilon_check(&m, &f, &near, h, 5);
        assert!(r.holds && r.samples == 40, "{r:?}");
        // Inside the middle gap the weight vanishes.
        let gap = thicken(&SetSpec::interval(0.45, 0.55), 0.01).unwrap();
        assert!(!upsilon_check(&m, &f, &gap, 0.01, 5).holds);
    }
}
