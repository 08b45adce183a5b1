use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{zeta_table, FourierError, RegularWordSet};
use crate::ifs::{Ifs, Word};
use crate::measures::ErgodicReport;

/// `n = ⌊((2k+1)λ + ε₀) log|ξ|⌋`.
pub fn block_length_rule(k: usize, lambda: f64, eps0: f64, xi: f64) -> usize {
    (((2 * k + 1) as f64 * lambda + eps0) * xi.abs().ln()).floor().max(0.0) as usize
}

/// Parameters of the exponential-sum bound at block length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumProductParams {
    pub k: usize,
    pub eps: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// `R = e^{εn}`.
    pub r_bound: f64,
    pub n: usize,
    /// `[e^{ε₀n/2}, e^{(ε₀+ε)n}]`.
    pub eta_window: (f64, f64),
}

pub const DEFAULT_K: usize = 2;
pub const DEFAULT_EPS: f64 = 0.25;
pub const DEFAULT_EPS0: f64 = 0.5;
pub const DEFAULT_EPS1: f64 = 0.1;
pub const DEFAULT_EPS2: f64 = 0.05;

impl SumProductParams {
    pub fn new(k: usize, eps: f64, eps0: f64, eps1: f64, eps2: f64, n: usize) -> Result<Self, FourierError> {
        if k == 0 || n == 0 || [eps, eps0, eps1, eps2].iter().any(|v| !(*v > 0.0)) {
            return Err(FourierError::InvalidArgument("k, n and all ε must be positive".into()));
        }
        let nf = n as f64;
        Ok(Self {
            k,
            eps,
            eps0,
            eps1,
            eps2,
            r_bound: (eps * nf).exp(),
            n,
            eta_window: ((eps0 * nf / 2.0).exp(), ((eps0 + eps) * nf).exp()),
        })
    }

    pub fn shipped(n: usize) -> Self {
        Self::new(DEFAULT_K, DEFAULT_EPS, DEFAULT_EPS0, DEFAULT_EPS1, DEFAULT_EPS2, n).expect("valid defaults")
    }

    /// `[R⁻²|η|⁻¹, |η|^{-ε₁}]`.
    pub fn sigma_range(&self, eta: f64) -> (f64, f64) {
        (1.0 / (self.r_bound * self.r_bound * eta.abs()), eta.abs().powf(-self.eps1))
    }

    /// `[e^{-ε₀(n-⌊ε₀n⌋)}, e^{-ε₀ε₁n/2}]`, the σ-range in block-length form.
    pub fn block_sigma_range(&self) -> (f64, f64) {
        let nf = self.n as f64;
        let head = (self.eps0 * nf).floor();
        ((-self.eps0 * (nf - head)).exp(), (-self.eps0 * self.eps1 * nf / 2.0).exp())
    }
}

/// `#{(b, c) : |ζ(b) - ζ(c)| ≤ σ} / N²` over ordered pairs, diagonal included.
pub fn nonconcentration_count(values: &[f64], sigma: f64) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut close = 0usize;
    let mut hi = 0usize;
    for i in 0..n {
        hi = hi.max(i);
        while hi + 1 < n && v[hi + 1] - v[i] <= sigma {
            hi += 1;
        }
        close += hi - i;
    }
    (n + 2 * close) as f64 / (n * n) as f64
}

/// `|N^{-k} Σ e(η ζ₁(b₁)⋯ζ_k(b_k))|`, exact for `k ≤ 2` and Monte-Carlo beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumResult {
    pub modulus: f64,
    /// Zero for exact sums.
    pub standard_error: f64,
    pub sampled: bool,
}

fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

pub fn exp_sum(tables: &[Vec<f64>], eta: f64, samples: usize, seed: u64) -> Result<ExpSumResult, FourierError> {
    if tables.is_empty() || tables.iter().any(|t| t.is_empty()) {
        return Err(FourierError::InvalidArgument("need k ≥ 1 non-empty tables".into()));
    }
    match tables {
        [t] => {
            let s: Complex64 = t.iter().map(|&z| e(eta * z)).sum();
            Ok(ExpSumResult { modulus: s.norm() / t.len() as f64, standard_error: 0.0, sampled: false })
        }
        [t1, t2] => {
            // Rows in parallel, total in order, so the result is independent of scheduling.
            let rows: Vec<Complex64> = t1.par_iter().map(|&z1| t2.iter().map(|&z2| e(eta * z1 * z2)).sum()).collect();
            let s: Complex64 = rows.iter().sum();
            let count = (t1.len() * t2.len()) as f64;
            Ok(ExpSumResult { modulus: s.norm() / count, standard_error: 0.0, sampled: false })
        }
        _ => {
            if samples < 2 {
                return Err(FourierError::InvalidArgument("sampling needs at least two samples".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sq = 0.0;
            for _ in 0..samples {
                let prod: f64 = tables.iter().map(|t| t[rng.gen_range(0..t.len())]).product();
                let z = e(eta * prod);
                sum += z;
                sq += z.norm_sqr();
            }
            let mean = sum / samples as f64;
            let var = (sq / samples as f64 - mean.norm_sqr()).max(0.0);
            Ok(ExpSumResult { modulus: mean.norm(), standard_error: (var / samples as f64).sqrt(), sampled: true })
        }
    }
}

/// One `(a-block, j, σ)` evaluation of the pair-fraction statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonconcRecord {
    pub block: usize,
    pub j: usize,
    pub sigma: f64,
    pub fraction: f64,
    /// `σ^{ε₀/4}`.
    pub bound: f64,
    pub pass: bool,
}

/// Samples `blocks` tuples `a_0 … a_k` from the regular words and compares the
/// pair fraction of every `ζ_j` table against `σ^{ε₀/4}` on `sigmas` points of
/// the block σ-range.
pub fn nonconcentration_experiment(
    ifs: &Ifs,
    report: &ErgodicReport,
    set: &RegularWordSet,
    params: &SumProductParams,
    blocks: usize,
    sigmas: usize,
    seed: u64,
) -> Result<Vec<NonconcRecord>, FourierError> {
    if set.is_empty() || blocks == 0 || sigmas < 2 {
        return Err(FourierError::InvalidArgument("need regular words, blocks ≥ 1 and sigmas ≥ 2".into()));
    }
    let (lo, hi) = params.block_sigma_range();
    let ladder: Vec<f64> = (0..sigmas).map(|i| lo * (hi / lo).powf(i as f64 / (sigmas - 1) as f64)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for block in 0..blocks {
        let a: Vec<Word> = (0..=params.k).map(|_| set.words[rng.gen_range(0..set.len())].clone()).collect();
        for j in 1..=params.k {
            let table = zeta_table(ifs, &a[j - 1], &a[j], &set.words, report);
            for &sigma in &ladder {
                let fraction = nonconcentration_count(&table, sigma);
                let bound = sigma.powf(params.eps0 / 4.0);
                records.push(NonconcRecord { block, j, sigma, fraction, bound, pass: fraction <= bound });
            }
        }
    }
    Ok(records)
}
