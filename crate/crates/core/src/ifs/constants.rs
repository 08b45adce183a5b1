use serde::{Deserialize, Serialize};

use super::{ContractionMap, Ifs, IfsError, Word};
use crate::interval::{merge, Interval};

/// Empirical contraction, distortion and UNI constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    /// `(sup_w sup_x |φ_w'|)^{-1/depth}`.
    pub gamma_est: f64,
    /// `(inf_w inf_x |φ_w'|)^{-1/depth}`.
    pub gamma1_est: f64,
    /// `max_a sup|φ_a'| / inf|φ_a'|`.
    pub distortion_est: f64,
    /// Margin band of the best-separated distinct pair of depth-`depth` words on `[0, 1]`.
    pub uni_min: f64,
    pub uni_max: f64,
    pub depth: usize,
    pub grid_points: usize,
}

/// Stop refining a sup/inf estimate once it moves less than this under grid doubling.
const REFINE_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 8;

fn uniform_grid(iv: Interval, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |k| iv.lo + iv.len() * k as f64 / (n - 1) as f64)
}

/// Min and max of `f` over endpoint-inclusive grids of `domains`, doubled until stable.
fn refined_extrema(domains: &[Interval], grid_points: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let total: f64 = domains.iter().map(|d| d.len()).sum::<f64>().max(f64::MIN_POSITIVE);
    let sample = |n: usize| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in domains {
            let share = ((n as f64) * d.len() / total).ceil() as usize + 2;
            for x in uniform_grid(*d, share) {
                let v = f(x);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    };
    let mut n = grid_points;
    let mut prev = sample(n);
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let next = sample(n);
        let moved = (next.0 - prev.0).abs().max((next.1 - prev.1).abs());
        prev = next;
        if moved < REFINE_TOL {
            break;
        }
    }
    prev
}

/// Estimates `γ`, `γ₁`, the distortion constant and a UNI band.
pub fn contraction_bounds(ifs: &Ifs, depth: usize, grid_points: usize) -> Result<ConstantsReport, IfsError> {
    if depth == 0 || grid_points < 2 {
        return Err(IfsError::InvalidArgument("depth >= 1 and grid_points >= 2 required".into()));
    }
    let unit = [Interval::unit()];
    let mut sup = 0.0f64;
    let mut inf = f64::INFINITY;
    for w in ifs.words(depth) {
        let m = ifs.compose_word(&w)?.collapsed();
        let (lo, hi) = refined_extrema(&unit, grid_points, |x| m.jet_unchecked(x).d1.abs());
        sup = sup.max(hi);
        inf = inf.min(lo);
    }
    let gamma = sup.powf(-1.0 / depth as f64);
    if gamma <= 1.0 {
        return Err(IfsError::NotContracting(gamma));
    }
    let gamma1 = inf.powf(-1.0 / depth as f64);
    let mut distortion = 1.0f64;
    for m in ifs.maps() {
        let (lo, hi) = refined_extrema(&unit, grid_points, |x| m.jet_unchecked(x).d1.abs());
        distortion = distortion.max(hi / lo);
    }
    let words = ifs.words(depth);
    let mut band = (0.0, 0.0);
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let m = uni_margin(ifs, a, b, UniDomain::Interval, grid_points)?;
            if m.0 > band.0 || band == (0.0, 0.0) {
                band = m;
            }
        }
    }
    Ok(ConstantsReport {
        gamma_est: gamma,
        gamma1_est: gamma1,
        distortion_est: distortion,
        uni_min: band.0,
        uni_max: band.1,
        depth,
        grid_points,
    })
}

/// Where the UNI margin is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UniDomain {
    /// All of `[0, 1]`.
    Interval,
    /// The `δ`-neighbourhood of the attractor, clipped to `[0, 1]`.
    Neighborhood(f64),
}

/// `(min, max)` of `|φ_a''/φ_a' − φ_b''/φ_b'|` over the domain.
pub fn uni_margin(
    ifs: &Ifs,
    word_a: &Word,
    word_b: &Word,
    domain: UniDomain,
    grid_points: usize,
) -> Result<(f64, f64), IfsError> {
    if grid_points < 16 {
        return Err(IfsError::InvalidArgument("grid_points must be at least 16".into()));
    }
    let fa = ifs.compose_word(word_a)?.collapsed();
    let fb = ifs.compose_word(word_b)?.collapsed();
    let domains = match domain {
        UniDomain::Interval => vec![Interval::unit()],
        UniDomain::Neighborhood(delta) => attractor_neighborhood(ifs, delta)?,
    };
    Ok(refined_extrema(&domains, grid_points, |x| uni_gap(&fa, &fb, x)))
}

/// `|φ_a''/φ_a' − φ_b''/φ_b'|(x)`.
pub fn uni_gap(fa: &ContractionMap, fb: &ContractionMap, x: f64) -> f64 {
    (fa.jet_unchecked(x).log_derivative_slope() - fb.jet_unchecked(x).log_derivative_slope()).abs()
}

/// Cover intervals at scale `δ`, inflated by `δ`, merged and clipped to `[0, 1]`.
pub fn attractor_neighborhood(ifs: &Ifs, delta: f64) -> Result<Vec<Interval>, IfsError> {
    if !(delta > 0.0) {
        return Err(IfsError::InvalidArgument(format!("neighbourhood radius must be positive, got {delta}")));
    }
    let cover = attractor_cover(ifs, delta.min(1.0), DEFAULT_COVER_BUDGET)?;
    let parts = cover
        .into_iter()
        .map(|c| {
            let iv = c.image.inflate(delta);
            Interval::new(iv.lo.max(0.0), iv.hi.min(1.0))
        })
        .collect();
    Ok(merge(parts))
}

/// One ε-cutoff cylinder: `diam φ_w(I) < ε` while its parent's is `≥ ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverWord {
    pub word: Word,
    pub image: Interval,
}

pub const DEFAULT_COVER_BUDGET: usize = 2_000_000;

/// ε-cutoff words in lexicographic order. Their images cover the attractor.
pub fn attractor_cover(ifs: &Ifs, eps: f64, budget: usize) -> Result<Vec<CoverWord>, IfsError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(IfsError::InvalidArgument(format!("eps must lie in (0, 1], got {eps}")));
    }
    let k = ifs.alphabet_size();
    let mut out = Vec::new();
    // Depth-first with letters pushed in reverse so that output is lexicographic.
    let mut stack: Vec<(Word, ContractionMap)> = vec![(Word::empty(), ContractionMap::affine(1.0, 0.0))];
    let mut visited = 0usize;
    while let Some((w, m)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(IfsError::CoverBudgetExceeded(budget));
        }
        for a in (0..k).rev() {
            let child = m.then_inner(ifs.map(a)).collapsed();
            let (lo, hi) = child.image_endpoints();
            let cw = w.push(a);
            if hi - lo < eps {
                out.push(CoverWord { word: cw, image: Interval::new(lo, hi) });
            } else {
                stack.push((cw, child));
            }
        }
    }
    // Children are emitted before deeper siblings are explored; restore lexicographic order.
    out.sort_by(|a, b| a.word.cmp(&b.word));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss23_constants() {
        let ifs = Ifs::builtin("gauss23").unwrap();
        let r = contraction_bounds(&ifs, 1, 64).unwrap();
        assert!((r.gamma_est - 4.0).abs() < 1e-12);
        assert!((r.gamma1_est - 16.0).abs() < 1e-12);
        assert!((r.distortion_est - 2.25).abs() < 1e-12);
        assert!((r.uni_min - 1.0 / 6.0).abs() < 1e-9);
        assert!((r.uni_max - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn parabolic_map_is_not_contracting() {
        let ifs = Ifs::builtin("figure1").unwrap();
        assert!(matches!(contraction_bounds(&ifs, 3, 32), Err(IfsError::NotContracting(_))));
    }

    #[test]
    fn uni_gauss23_letters() {
        let ifs = Ifs::builtin("gauss23").unwrap();
        let (lo, hi) = uni_margin(&ifs, &Word::new(vec![0]), &Word::new(vec![1]), UniDomain::Interval, 64).unwrap();
        // 2/((2+x)(3+x)) on [0, 1]
        assert!((lo - 1.0 / 6.0).abs() < 1e-12 && (hi - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn uni_vanishes_for_affine_and_identical_words() {
        let dy = Ifs::builtin("dyadic").unwrap();
        let m = uni_margin(&dy, &Word::new(vec![0]), &Word::new(vec![1]), UniDomain::Neighborhood(0.01), 32).unwrap();
        assert_eq!(m, (0.0, 0.0));
        let g = Ifs::builtin("gauss23").unwrap();
        let w = Word::new(vec![0, 1]);
        assert_eq!(uni_margin(&g, &w, &w, UniDomain::Interval, 32).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn dyadic_cover_counts() {
        let ifs = Ifs::builtin("dyadic").unwrap();
        assert_eq!(attractor_cover(&ifs, 0.6, 100).unwrap().len(), 2);
        assert_eq!(attractor_cover(&ifs, 0.3, 100).unwrap().len(), 4);
        assert_eq!(attractor_cover(&ifs, 1.0, 100).unwrap().len(), 2);
        assert!(matches!(attractor_cover(&ifs, 1e-6, 10), Err(IfsError::CoverBudgetExceeded(_))));
    }

    #[test]
    fn cover_is_lexicographic_and_covers_fixed_points() {
        let ifs = Ifs::builtin("gauss23").unwrap();
        let cover = attractor_cover(&ifs, 0.01, 100_000).unwrap();
        assert!(cover.windows(2).all(|w| w[0].word < w[1].word));
        for m in ifs.maps() {
            let x = m.fixed_point();
            assert!(cover.iter().any(|c| c.image.widened().contains(x)));
        }
    }
}
