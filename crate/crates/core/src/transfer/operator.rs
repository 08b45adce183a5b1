use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GridFunction, TransferError};
use crate::ifs::{ContractionMap, Ifs};
use crate::partition::PartitionResult;

/// `s = r + ib`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexExponent {
    pub r: f64,
    pub b: f64,
}

impl ComplexExponent {
    pub fn new(r: f64, b: f64) -> Self {
        Self { r, b }
    }

    pub fn imaginary(b: f64) -> Self {
        Self { r: 0.0, b }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.r, self.b)
    }

    /// `|d|^s`.
    pub fn power_of(&self, d: f64) -> Complex64 {
        (self.as_complex() * d.abs().ln()).exp()
    }
}

/// One weighted inverse branch `p·|φ'|^s·f∘φ`.
#[derive(Debug, Clone)]
pub struct Branch {
    pub weight: f64,
    pub map: ContractionMap,
}

impl Branch {
    /// Value and derivative of the branch term at `x`.
    pub fn term(&self, s: ComplexExponent, f: &GridFunction, x: f64) -> (Complex64, Complex64) {
        let jet = self.map.jet_unchecked(x);
        let pow = s.power_of(jet.d1);
        let (fv, fd) = f.eval(jet.value);
        let value = pow * fv * self.weight;
        let derivative = (s.as_complex() * jet.log_derivative_slope() * fv + fd * jet.d1) * pow * self.weight;
        (value, derivative)
    }
}

/// `Σ p|φ'|^s f∘φ` with the derivative channel from the product and chain rules.
pub fn apply_branches(branches: &[Branch], s: ComplexExponent, f: &GridFunction) -> GridFunction {
    let n = f.grid_size();
    let (values, derivatives): (Vec<_>, Vec<_>) = (0..n)
        .into_par_iter()
        .map(|k| {
            let x = f.node(k);
            branches.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |acc, br| {
                let (v, d) = br.term(s, f, x);
                (acc.0 + v, acc.1 + d)
            })
        })
        .unzip();
    GridFunction::new(values, derivatives).expect("finite operator output")
}

pub fn ifs_branches(ifs: &Ifs) -> Vec<Branch> {
    ifs.maps().iter().zip(ifs.probs()).map(|(m, &p)| Branch { weight: p, map: m.clone() }).collect()
}

/// Branches of `L_{s,w}` with the conditional weights `p_{a,w}`.
pub fn group_branches(ifs: &Ifs, partition: &PartitionResult, group: usize) -> Result<Vec<Branch>, TransferError> {
    let words = partition.groups.get(group).ok_or(TransferError::UnknownGroup(group))?;
    Ok(words
        .iter()
        .zip(&partition.conditional_probs[group])
        .map(|(w, &p)| Branch { weight: p, map: ifs.compose_word(w).expect("partition word").collapsed() })
        .collect())
}

/// `L_s f = Σ_a p_a |φ_a'|^s f∘φ_a`.
pub fn apply_transfer(ifs: &Ifs, s: ComplexExponent, f: &GridFunction) -> GridFunction {
    apply_branches(&ifs_branches(ifs), s, f)
}

/// `L_{s,w} f = Σ_{a∈w} p_{a,w}|φ_a'|^s f∘φ_a`.
pub fn apply_sub_transfer(
    ifs: &Ifs,
    partition: &PartitionResult,
    group: usize,
    s: ComplexExponent,
    f: &GridFunction,
) -> Result<GridFunction, TransferError> {
    Ok(apply_branches(&group_branches(ifs, partition, group)?, s, f))
}

/// Norms of `L_s^n f_0` and the fitted decay rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGapReport {
    pub b_values: Vec<f64>,
    pub r: f64,
    pub grid_size: Vec<usize>,
    /// `norms_by_n[i][n-1]` is `‖L_s^n f_0‖_b` for `b = b_values[i]`.
    pub norms_by_n: Vec<Vec<f64>>,
    /// `exp` of the least-squares slope of `log‖L^n f‖_b` over the tail half.
    pub fitted_rho: Vec<f64>,
    /// Slope of the fitted log-prefactor against `log|b|`; needs two or more `b`.
    pub fitted_prefactor_exponent: Option<f64>,
    /// Relative change of the last norm when the grid is doubled.
    pub grid_delta: Vec<f64>,
}

pub const OVERFLOW_NORM: f64 = 1e12;

/// The b-norm used for decay curves; `b = 0` falls back to the plain `C¹` norm.
pub fn decay_norm(f: &GridFunction, b: f64) -> f64 {
    f.b_norm(if b == 0.0 { 1.0 } else { b }).expect("nonzero b")
}

fn norm_curve(ifs: &Ifs, s: ComplexExponent, f0: &GridFunction, n_max: usize) -> Result<Vec<f64>, TransferError> {
    let branches = ifs_branches(ifs);
    let mut f = f0.clone();
    let mut norms = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        f = apply_branches(&branches, s, &f);
        let norm = decay_norm(&f, s.b);
        if !(norm <= OVERFLOW_NORM) {
            return Err(TransferError::Overflow { n, norm });
        }
        norms.push(norm);
    }
    Ok(norms)
}

/// Least-squares `(slope, intercept)` of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}

/// Fits `log‖L^n f‖ ≈ n log ρ + c` over `n ∈ [⌈n_max/2⌉, n_max]`.
pub fn fit_tail(norms: &[f64]) -> (f64, f64) {
    let start = norms.len().div_ceil(2).max(1);
    let xs: Vec<f64> = (start..=norms.len()).map(|n| n as f64).collect();
    let ys: Vec<f64> = norms[start - 1..].iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    (slope.exp(), intercept)
}

/// Applies `L_s` `n_max` times to `f0` on its own grid.
pub fn iterate_norms(
    ifs: &Ifs,
    s: ComplexExponent,
    f0: &GridFunction,
    n_max: usize,
) -> Result<SpectralGapReport, TransferError> {
    if n_max < 5 {
        return Err(TransferError::InvalidArgument("n_max must be at least 5".into()));
    }
    let norms = norm_curve(ifs, s, f0, n_max)?;
    let (rho, _) = fit_tail(&norms);
    Ok(SpectralGapReport {
        b_values: vec![s.b],
        r: s.r,
        grid_size: vec![f0.grid_size()],
        norms_by_n: vec![norms],
        fitted_rho: vec![rho],
        fitted_prefactor_exponent: None,
        grid_delta: vec![f64::NAN],
    })
}

/// Grid doublings attempted by [`spectral_gap_sweep`] before giving up.
pub const MAX_GRID_DOUBLINGS: usize = 2;
pub const GRID_TOL: f64 = 1e-6;

/// Decay curves of `L_{r+ib}^n 1` for each `b`, each on a grid doubled until
/// the final norm moves less than [`GRID_TOL`] (relative).
pub fn spectral_gap_sweep(
    ifs: &Ifs,
    b_values: &[f64],
    r: f64,
    n_max: usize,
    grid_size: usize,
) -> Result<SpectralGapReport, TransferError> {
    if n_max < 5 {
        return Err(TransferError::InvalidArgument("n_max must be at least 5".into()));
    }
    // Per b: final grid size, norm curve and grid-doubling delta.
    type Run = Result<(usize, Vec<f64>, f64), TransferError>;
    let runs: Vec<Run> = b_values
        .par_iter()
        .map(|&b| {
            let s = ComplexExponent::new(r, b);
            let one = |g| GridFunction::constant(g, Complex64::new(1.0, 0.0));
            let mut g = grid_size;
            let mut norms = norm_curve(ifs, s, &one(g), n_max)?;
            let mut delta = f64::INFINITY;
            for _ in 0..MAX_GRID_DOUBLINGS {
                let finer = norm_curve(ifs, s, &one(2 * g - 1), n_max)?;
                let last = norms[n_max - 1];
                delta = (finer[n_max - 1] - last).abs() / last.abs().max(f64::MIN_POSITIVE);
                norms = finer;
                g = 2 * g - 1;
                if delta < GRID_TOL {
                    break;
                }
            }
            Ok((g, norms, delta))
        })
        .collect();
    let mut report = SpectralGapReport {
        b_values: b_values.to_vec(),
        r,
        grid_size: Vec::new(),
        norms_by_n: Vec::new(),
        fitted_rho: Vec::new(),
        fitted_prefactor_exponent: None,
        grid_delta: Vec::new(),
    };
    let mut intercepts = Vec::new();
    for run in runs {
        let (g, norms, delta) = run?;
        let (rho, c) = fit_tail(&norms);
        report.grid_size.push(g);
        report.fitted_rho.push(rho);
        report.norms_by_n.push(norms);
        report.grid_delta.push(delta);
        intercepts.push(c);
    }
    let usable: Vec<(f64, f64)> =
        b_values.iter().zip(&intercepts).filter(|(b, _)| **b != 0.0).map(|(b, c)| (b.abs().ln(), *c)).collect();
    if usable.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        report.fitted_prefactor_exponent = Some(linear_fit(&xs, &ys).0);
    }
    Ok(report)
}

/// Largest number of words a disintegration check may enumerate per point.
pub const DISINTEGRATION_BUDGET: usize = 1 << 22;

/// Points at which [`disintegration_residual`] compares both sides.
pub const DISINTEGRATION_POINTS: usize = 65;

/// Relative sup-distance between the block operator `L_s^n` over `A^N` and the
/// regrouped sum `Σ_{w∈Ω^n} q_w L_{s,w_n}∘⋯∘L_{s,w_1}`, both evaluated
/// pointwise on a subsample of the grid of `f`.
///
/// The left side runs letter by letter through `A^{nN}`; the right side runs
/// through the groups with collapsed block maps and conditional weights.
pub fn disintegration_residual(
    ifs: &Ifs,
    partition: &PartitionResult,
    s: ComplexExponent,
    f: &GridFunction,
    n: usize,
) -> Result<f64, TransferError> {
    if n == 0 {
        return Err(TransferError::InvalidArgument("n must be positive".into()));
    }
    let letters = n * partition.block_length;
    let words = (ifs.alphabet_size() as f64).powi(letters as i32);
    if words > DISINTEGRATION_BUDGET as f64 {
        return Err(TransferError::BudgetExceeded(DISINTEGRATION_BUDGET));
    }
    let groups: Vec<Vec<Branch>> =
        (0..partition.omega_size()).map(|g| group_branches(ifs, partition, g)).collect::<Result<_, _>>()?;
    let step = ((f.grid_size() - 1) / (DISINTEGRATION_POINTS - 1)).max(1);
    let points: Vec<f64> = (0..f.grid_size()).step_by(step).map(|k| f.node(k)).collect();
    let pairs: Vec<(Complex64, Complex64)> = points
        .par_iter()
        .map(|&x| {
            let lhs = letter_sum(ifs, s, f, x, 0.0, 1.0, letters);
            let rhs = group_sum(partition, &groups, s, f, x, 0.0, 1.0, n);
            (lhs, rhs)
        })
        .collect();
    let scale = pairs.iter().map(|p| p.0.norm()).fold(0.0, f64::max);
    let diff = pairs.iter().map(|p| (p.0 - p.1).norm()).fold(0.0, f64::max);
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// `Σ_{a∈A^depth} p_a |φ_a'(x)|^s f(φ_a x)` by recursion on the innermost letter.
fn letter_sum(ifs: &Ifs, s: ComplexExponent, f: &GridFunction, x: f64, log_d: f64, w: f64, depth: usize) -> Complex64 {
    if depth == 0 {
        return (s.as_complex() * log_d).exp() * f.eval(x).0 * w;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, &p) in ifs.maps().iter().zip(ifs.probs()) {
        let j = m.jet_unchecked(x);
        acc += letter_sum(ifs, s, f, j.value, log_d + j.d1.abs().ln(), w * p, depth - 1);
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn group_sum(
    partition: &PartitionResult,
    groups: &[Vec<Branch>],
    s: ComplexExponent,
    f: &GridFunction,
    x: f64,
    log_d: f64,
    w: f64,
    depth: usize,
) -> Complex64 {
    if depth == 0 {
        return (s.as_complex() * log_d).exp() * f.eval(x).0 * w;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (g, branches) in groups.iter().enumerate() {
        let q = partition.group_weights[g];
        for br in branches {
            let j = br.map.jet_unchecked(x);
            acc += group_sum(partition, groups, s, f, j.value, log_d + j.d1.abs().ln(), w * q * br.weight, depth - 1);
        }
    }
    acc
}

/// Outcome of [`classify_word`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordClass {
    pub good: bool,
    /// Blocks `(w*)^N` among the first `⌊n/2N⌋`.
    pub count: usize,
    /// `q_{w*}^N · n / (5N)`.
    pub threshold: f64,
}

/// Good/bad classification of a string over `Ω` with blocks of `n_blocks` letters.
pub fn classify_word(
    w_string: &[usize],
    partition: &PartitionResult,
    n_blocks: usize,
) -> Result<WordClass, TransferError> {
    if n_blocks == 0 || w_string.len() < 2 * n_blocks {
        return Err(TransferError::TooShort { len: w_string.len(), needed: 2 * n_blocks.max(1) });
    }
    if let Some(&g) = w_string.iter().find(|&&g| g >= partition.omega_size()) {
        return Err(TransferError::UnknownGroup(g));
    }
    let blocks = w_string.len() / (2 * n_blocks);
    let count = (0..blocks)
        .filter(|&i| w_string[i * n_blocks..(i + 1) * n_blocks].iter().all(|&g| g == partition.star))
        .count();
    let q_star = partition.group_weights[partition.star];
    let threshold = q_star.powi(n_blocks as i32) * w_string.len() as f64 / (5.0 * n_blocks as f64);
    Ok(WordClass { good: count as f64 >= threshold, count, threshold })
}
