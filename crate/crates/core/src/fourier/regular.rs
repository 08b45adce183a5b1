use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FourierError;
use crate::ifs::{ContractionMap, Ifs, Word};
use crate::measures::ErgodicReport;

/// Largest `#A^n` that [`regular_words`] will enumerate.
pub const REGULAR_WORD_BUDGET: usize = 1 << 22;

/// Words of length `n` whose prefixes of length `⌊ε₀n⌋ … n` all have Birkhoff
/// averages of `τ` and `ψ` within `ε` of `λ` and `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularWordSet {
    pub n: usize,
    pub eps: f64,
    pub eps0: f64,
    pub words: Vec<Word>,
    pub lambda_ref: f64,
    pub entropy_ref: f64,
    /// `m_p` mass of the words that fail.
    pub complement_mass: f64,
}

impl RegularWordSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// First prefix length that is checked.
    pub fn first_checked(&self) -> usize {
        first_checked(self.n, self.eps0)
    }
}

fn first_checked(n: usize, eps0: f64) -> usize {
    ((eps0 * n as f64).floor() as usize).max(1)
}

/// Midpoint of `φ_w([0, 1])`.
pub fn cylinder_centre(map: &ContractionMap) -> f64 {
    let (lo, hi) = map.image_endpoints();
    0.5 * (lo + hi)
}

/// `S_l τ(a) = -log|φ'_{a_1…a_l}(x_l)|` for `l = 1..=n`, with `x_l` the centre of
/// `φ_{a_{l+1}…a_n}([0,1])`, and `S_l ψ(a) = -log p_{a_1…a_l}`.
fn birkhoff_sums(ifs: &Ifs, letters: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let n = letters.len();
    let mut centres = vec![0.5; n + 1];
    let mut suffix = ContractionMap::affine(1.0, 0.0);
    for l in (0..n).rev() {
        suffix = ifs.map(letters[l]).then_inner(&suffix).collapsed();
        centres[l] = cylinder_centre(&suffix);
    }
    let mut prefix = ContractionMap::affine(1.0, 0.0);
    let mut tau = Vec::with_capacity(n);
    let mut psi = Vec::with_capacity(n);
    let mut log_p = 0.0;
    for l in 1..=n {
        prefix = prefix.then_inner(ifs.map(letters[l - 1])).collapsed();
        log_p += ifs.probs()[letters[l - 1]].ln();
        tau.push(-prefix.jet_unchecked(centres[l]).d1.abs().ln());
        psi.push(-log_p);
    }
    (tau, psi)
}

/// `R_n(ε, ε₀)` by exhaustive enumeration of `A^n`.
pub fn regular_words(
    ifs: &Ifs,
    report: &ErgodicReport,
    n: usize,
    eps: f64,
    eps0: f64,
) -> Result<RegularWordSet, FourierError> {
    if n == 0 || !(eps > 0.0) || !(0.0..=1.0).contains(&eps0) {
        return Err(FourierError::InvalidArgument("need n ≥ 1, ε > 0 and ε₀ ∈ [0, 1]".into()));
    }
    let k = ifs.alphabet_size();
    let total = (k as f64).powi(n as i32);
    if total > REGULAR_WORD_BUDGET as f64 {
        return Err(FourierError::BudgetExceeded(REGULAR_WORD_BUDGET));
    }
    let (lambda, h) = (report.lyapunov, report.entropy);
    let start = first_checked(n, eps0);
    let results: Vec<(Word, bool, f64)> = Word::all(k, n)
        .into_par_iter()
        .map(|w| {
            let (tau, psi) = birkhoff_sums(ifs, w.letters());
            let ok = (start..=n).all(|l| {
                let lf = l as f64;
                (tau[l - 1] / lf - lambda).abs() < eps && (psi[l - 1] / lf - h).abs() < eps
            });
            let p = ifs.word_prob(&w);
            (w, ok, p)
        })
        .collect();
    let mut words = Vec::new();
    let mut complement_mass = 0.0;
    for (w, ok, p) in results {
        if ok {
            words.push(w);
        } else {
            complement_mass += p;
        }
    }
    Ok(RegularWordSet { n, eps, eps0, words, lambda_ref: lambda, entropy_ref: h, complement_mass })
}

/// `ζ_j(b) = e^{2λn}|φ'_{a_{j-1}b}(x_{a_j})|` for `j = 1..=k`, with `x_{a_j}` the
/// centre of `φ_{a_j}([0, 1])` and `n` the common block length.
pub fn zeta_values(ifs: &Ifs, a_blocks: &[Word], b_word: &Word, report: &ErgodicReport) -> Vec<f64> {
    let n = b_word.len() as f64;
    let scale = (2.0 * report.lyapunov * n).exp();
    let b_map = ifs.compose_word(b_word).expect("valid word");
    a_blocks
        .windows(2)
        .map(|pair| {
            let head = ifs.compose_word(&pair[0]).expect("valid word").then_inner(&b_map).collapsed();
            let x = cylinder_centre(&ifs.compose_word(&pair[1]).expect("valid word"));
            scale * head.jet_unchecked(x).d1.abs()
        })
        .collect()
}

/// `ζ_j` over a whole table of `b` words, for one `j`.
pub fn zeta_table(ifs: &Ifs, prev: &Word, next: &Word, bs: &[Word], report: &ErgodicReport) -> Vec<f64> {
    let prev_map = ifs.compose_word(prev).expect("valid word");
    let x = cylinder_centre(&ifs.compose_word(next).expect("valid word"));
    bs.par_iter()
        .map(|b| {
            let scale = (2.0 * report.lyapunov * b.len() as f64).exp();
            let m = prev_map.then_inner(&ifs.compose_word(b).expect("valid word")).collapsed();
            scale * m.jet_unchecked(x).d1.abs()
        })
        .collect()
}
