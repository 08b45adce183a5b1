use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ComplexExponent, GridFunction, TransferError};
use crate::ifs::{uni_margin, ContractionMap, Ifs, UniDomain, Word};
use crate::interval::Interval;
use crate::measures::{cover_measure, pushforward, DiscreteMeasure};
use crate::partition::{interval_cover, IntervalCover, PartitionResult, DEFAULT_COVER_NODES, UNI_FLOOR};

/// Parameters of the damped operators `N_s^J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DolgopyatConfig {
    /// Cone aperture `A` of `C_{A|b|}`.
    pub cone_a: f64,
    /// Damping depth `θ`.
    pub theta: f64,
    /// Cover scale `ε = ε′/|b|`.
    pub eps_prime: f64,
    /// Number `N` of `w*` letters per application.
    pub block_n: usize,
    /// Fraction of the gap between `∂V_j` and the kernel used by each cutoff ramp.
    pub cutoff_smoothing: f64,
}

impl DolgopyatConfig {
    pub fn validate(&self) -> Result<(), TransferError> {
        let ok = self.cone_a > 1.0
            && (0.0..0.5).contains(&self.theta)
            && self.eps_prime > 0.0
            && self.block_n >= 1
            && self.cutoff_smoothing > 0.0
            && self.cutoff_smoothing <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(TransferError::InvalidArgument(format!("invalid Dolgopyat configuration {self:?}")))
        }
    }
}

/// Measured constants behind [`default_config`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DolgopyatConstants {
    /// `sup |φ_a''/φ_a'|` over words of `(w*)^k`, `k ≤ N + 2`.
    pub c0: f64,
    /// `‖χ_j'‖_∞ · ε′/|b|`, maximised over the cutoffs.
    pub a3: f64,
    /// `sup |φ_a'|` over `a ∈ (w*)^N`.
    pub block_contraction: f64,
    pub cover_a1_lower: f64,
    pub cover_a1_upper: f64,
    pub cover_a2: f64,
}

pub const DEFAULT_EPS_PRIME: f64 = 1.0;

/// Sample points per unit interval when estimating `C₀`.
const C0_GRID: usize = 1025;

/// Words of `(w*)^n`, each a sequence of picks from `{α₁, α₂}`.
fn star_words(partition: &PartitionResult, n: usize) -> Vec<(Vec<usize>, Word)> {
    Word::all(2, n)
        .into_iter()
        .map(|picks| {
            let word = picks.letters().iter().fold(Word::empty(), |acc, &i| acc.concat(&partition.star_group()[i]));
            (picks.letters().to_vec(), word)
        })
        .collect()
}

fn sup_abs_derivative(m: &ContractionMap) -> f64 {
    (0..C0_GRID).map(|k| m.jet_unchecked(k as f64 / (C0_GRID - 1) as f64).d1.abs()).fold(0.0, f64::max)
}

/// The shipped configuration: `N` smallest with `sup|φ_a'| < 1/4` on `(w*)^N`,
/// `θ = min(ε′, 0.1)/2` and `A = 2C₀ + 4A₃ + 1`, with `A₃` read off the
/// cutoffs of the cover for `K_w` at `ε = ε′/|b|`.
pub fn default_config(
    ifs: &Ifs,
    partition: &PartitionResult,
    w_string: &[usize],
    b: f64,
    eps_prime: f64,
) -> Result<(DolgopyatConfig, DolgopyatConstants), TransferError> {
    let mut block_n = 1;
    let block_contraction = loop {
        let sup = star_words(partition, block_n)
            .iter()
            .map(|(_, w)| sup_abs_derivative(&ifs.compose_word(w).expect("partition word").collapsed()))
            .fold(0.0, f64::max);
        if sup < 0.25 {
            break sup;
        }
        block_n += 1;
        if block_n > 16 {
            return Err(TransferError::InvalidArgument("w* maps do not contract below 1/4".into()));
        }
    };
    let mut c0 = 0.0f64;
    for k in 1..=block_n + 2 {
        for (_, w) in star_words(partition, k) {
            let m = ifs.compose_word(&w).expect("partition word").collapsed();
            for t in 0..C0_GRID {
                c0 = c0.max(m.jet_unchecked(t as f64 / (C0_GRID - 1) as f64).log_derivative_slope().abs());
            }
        }
    }
    let theta = eps_prime.min(0.1) / 2.0;
    let provisional = DolgopyatConfig { cone_a: 2.0, theta, eps_prime, block_n, cutoff_smoothing: 1.0 };
    let setup = DolgopyatSetup::new(ifs, partition, w_string, b, provisional)?;
    let a3 = setup.max_cutoff_slope() * setup.epsilon();
    let cfg = DolgopyatConfig { cone_a: 2.0 * c0 + 4.0 * a3 + 1.0, ..provisional };
    let constants = DolgopyatConstants {
        c0,
        a3,
        block_contraction,
        cover_a1_lower: setup.cover.a1_lower,
        cover_a1_upper: setup.cover.a1_upper,
        cover_a2: setup.cover.a2,
    };
    Ok((cfg, constants))
}

/// `C¹` smoothstep bump: 0 outside the tile, 1 on the kernel hull.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub support: Interval,
    pub plateau: Interval,
    pub rise_start: f64,
    pub fall_end: f64,
}

fn smoothstep(t: f64) -> (f64, f64) {
    let t = t.clamp(0.0, 1.0);
    (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t))
}

impl Cutoff {
    fn new(support: Interval, plateau: Interval, smoothing: f64) -> Self {
        Self {
            support,
            plateau,
            rise_start: plateau.lo - smoothing * (plateau.lo - support.lo),
            fall_end: plateau.hi + smoothing * (support.hi - plateau.hi),
        }
    }

    /// `(χ(x), χ'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if x <= self.rise_start || x >= self.fall_end {
            (0.0, 0.0)
        } else if x < self.plateau.lo {
            let w = self.plateau.lo - self.rise_start;
            let (v, d) = smoothstep((x - self.rise_start) / w);
            (v, d / w)
        } else if x <= self.plateau.hi {
            (1.0, 0.0)
        } else {
            let w = self.fall_end - self.plateau.hi;
            let (v, d) = smoothstep((self.fall_end - x) / w);
            (v, -d / w)
        }
    }

    /// `1.5 / (narrowest ramp)`, the sup of `|χ'|`.
    pub fn max_slope(&self) -> f64 {
        let w = (self.plateau.lo - self.rise_start).min(self.fall_end - self.plateau.hi);
        1.5 / w
    }
}

/// A damping set `J ⊂ J_s`: `damped[i][j]` for branch `i ∈ {0, 1}` and tile `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DampingSet {
    pub damped: [Vec<bool>; 2],
}

impl DampingSet {
    pub fn empty(tiles: usize) -> Self {
        Self { damped: [vec![false; tiles], vec![false; tiles]] }
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..2).flat_map(|i| self.damped[i].iter().enumerate().filter(|(_, &d)| d).map(move |(j, _)| (i, j))).collect()
    }

    pub fn len(&self) -> usize {
        self.damped.iter().map(|v| v.iter().filter(|&&d| d).count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which half of the uniform-bound dichotomy held on a `Z_j^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dichotomy {
    /// `|f| ≤ ¾H` throughout.
    Small,
    /// `|f| ≥ ¼H` throughout.
    Large,
    /// Neither; the dichotomy predicate fails at the sampled points.
    Neither,
}

/// Runtime record of the uniform-bound and triangle-lemma quantities on one hit tile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaudRecord {
    pub tile: usize,
    pub dichotomy: [Dichotomy; 2],
    /// Largest `max(|z₁/z₂|, |z₂/z₁|)` over the samples.
    pub ratio_bound: f64,
    /// Smallest `|arg(z₁/z₂)|` over the samples.
    pub min_angle: f64,
    pub theta_max: [f64; 2],
}

/// Output of [`DolgopyatSetup::select_j`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub set: DampingSet,
    pub dense: bool,
    /// Hit tiles with no selected index within distance two.
    pub uncovered: Vec<usize>,
    pub naud: Vec<NaudRecord>,
}

/// Pointwise comparison of `|L^N_{s,w*} f|` with `N_s^J H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub holds: bool,
    /// `max |L^N_{s,w*} f| / N_s^J H` over the check points.
    pub worst_ratio: f64,
    pub derivative_holds: bool,
    /// `max |(L^N_{s,w*} f)'| / (A|b| N_s^J H)`.
    pub worst_derivative_ratio: f64,
    pub points: usize,
}

/// Cone membership at the check points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub holds: bool,
    /// `max |g'| / (A|b| g)`; at most one inside the cone.
    pub worst_ratio: f64,
    pub min_value: f64,
}

/// Samples per tile for the Θ tests; the domination check uses a shifted set.
pub const TILE_SAMPLES: usize = 17;

/// Relative slack for pointwise inequalities evaluated in floating point.
pub const CHECK_SLACK: f64 = 1e-12;

struct StarWord {
    weight: f64,
    map: ContractionMap,
    /// `Some(i)` when the word is `α_i^N`.
    alpha: Option<usize>,
}

/// Cover, cutoffs and `(w*)^N` branches for one `(w, b, cfg)`.
pub struct DolgopyatSetup {
    pub cfg: DolgopyatConfig,
    pub b: f64,
    pub cover: IntervalCover,
    pub cutoffs: Vec<Option<Cutoff>>,
    /// UNI margin of `(α₁, α₂)` on `[0, 1]`.
    pub uni_margin: f64,
    words: Vec<StarWord>,
}

impl DolgopyatSetup {
    pub fn new(
        ifs: &Ifs,
        partition: &PartitionResult,
        w_string: &[usize],
        b: f64,
        cfg: DolgopyatConfig,
    ) -> Result<Self, TransferError> {
        cfg.validate()?;
        if b == 0.0 {
            return Err(TransferError::ZeroB);
        }
        let eps = cfg.eps_prime / b.abs();
        let cover = interval_cover(ifs, partition, w_string, eps, DEFAULT_COVER_NODES)?;
        let cutoffs = cover
            .intervals
            .iter()
            .zip(&cover.kernel)
            .map(|(v, k)| k.map(|k| Cutoff::new(*v, k, cfg.cutoff_smoothing)))
            .collect();
        let weight = 0.5f64.powi(cfg.block_n as i32);
        let words = star_words(partition, cfg.block_n)
            .into_iter()
            .map(|(picks, w)| {
                let alpha = picks.iter().all(|&i| i == picks[0]).then_some(picks[0]);
                StarWord { weight, map: ifs.compose_word(&w).expect("partition word").collapsed(), alpha }
            })
            .collect();
        let (a1, a2) = &partition.alpha;
        let (uni, _) = uni_margin(ifs, a1, a2, UniDomain::Interval, 64)?;
        Ok(Self { cfg, b, cover, cutoffs, uni_margin: uni, words })
    }

    pub fn epsilon(&self) -> f64 {
        self.cover.epsilon
    }

    pub fn tiles(&self) -> usize {
        self.cover.len()
    }

    /// Indices `j` with `V_j ∩ K_w ≠ ∅`.
    pub fn hit_tiles(&self) -> Vec<usize> {
        (0..self.tiles()).filter(|&j| self.cover.hit[j]).collect()
    }

    /// `J_s`: every hit tile on both branches.
    pub fn full_set(&self) -> DampingSet {
        DampingSet { damped: [self.cover.hit.clone(), self.cover.hit.clone()] }
    }

    pub fn max_cutoff_slope(&self) -> f64 {
        self.cutoffs.iter().flatten().map(|c| c.max_slope()).fold(0.0, f64::max)
    }

    pub fn check_set(&self, set: &DampingSet) -> Result<(), TransferError> {
        for (i, row) in set.damped.iter().enumerate() {
            if row.len() != self.tiles() {
                return Err(TransferError::InvalidArgument("damping set has the wrong number of tiles".into()));
            }
            if let Some(j) = (0..row.len()).find(|&j| row[j] && !self.cover.hit[j]) {
                return Err(TransferError::InvalidIndex { branch: i, tile: j });
            }
        }
        Ok(())
    }

    fn alpha_word(&self, i: usize) -> &StarWord {
        self.words.iter().find(|w| w.alpha == Some(i)).expect("α_i^N is a word of (w*)^N")
    }

    /// `(χ_J∘φ_a)(x)` and its derivative for the word `a`, using
    /// `χ_J(φ_{α_i^N} x) = 1 - θχ_j(x)` on damped tiles.
    fn damping_at(&self, set: &DampingSet, word: &StarWord, x: f64) -> (f64, f64) {
        let Some(i) = word.alpha else { return (1.0, 0.0) };
        if self.cfg.theta == 0.0 {
            return (1.0, 0.0);
        }
        let Some(j) = self.cover.locate(x) else { return (1.0, 0.0) };
        // Tiles share endpoints where every cutoff vanishes, so one tile suffices.
        match (&self.cutoffs[j], set.damped[i][j]) {
            (Some(c), true) => {
                let (v, d) = c.eval(x);
                (1.0 - self.cfg.theta * v, -self.cfg.theta * d)
            }
            _ => (1.0, 0.0),
        }
    }

    /// `N_s^J H (x)` and its derivative, summed directly over `(w*)^N`.
    pub fn apply_at(&self, set: &DampingSet, r: f64, h: &GridFunction, x: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut deriv = 0.0;
        for word in &self.words {
            let jet = word.map.jet_unchecked(x);
            let pow = jet.d1.abs().powf(r);
            let (hv, hd) = h.eval(jet.value);
            let (chi, dchi) = self.damping_at(set, word, x);
            value += word.weight * pow * chi * hv.re;
            deriv += word.weight
                * pow
                * (r * jet.log_derivative_slope() * chi * hv.re + dchi * hv.re + chi * hd.re * jet.d1);
        }
        (value, deriv)
    }

    /// `N_s^J H` on the grid of `h`.
    pub fn apply(&self, set: &DampingSet, s: ComplexExponent, h: &GridFunction) -> Result<GridFunction, TransferError> {
        self.check_set(set)?;
        let out: Vec<(f64, f64)> =
            (0..h.grid_size()).into_par_iter().map(|k| self.apply_at(set, s.r, h, h.node(k))).collect();
        GridFunction::new(
            out.iter().map(|p| Complex64::new(p.0, 0.0)).collect(),
            out.iter().map(|p| Complex64::new(p.1, 0.0)).collect(),
        )
    }

    /// `L^N_{s,w*} f (x)` and its derivative, summed over `(w*)^N`.
    pub fn sub_transfer_at(&self, s: ComplexExponent, f: &GridFunction, x: f64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for word in &self.words {
            let jet = word.map.jet_unchecked(x);
            let pow = s.power_of(jet.d1);
            let (fv, fd) = f.eval(jet.value);
            value += pow * fv * word.weight;
            deriv += (s.as_complex() * jet.log_derivative_slope() * fv + fd * jet.d1) * pow * word.weight;
        }
        (value, deriv)
    }

    /// `(z₁, z₂, D₁, D₂)` at `x`: the two α-branch terms of `f` with exponent
    /// `s` and of `H` with exponent `r`.
    fn alpha_terms(&self, s: ComplexExponent, f: &GridFunction, h: &GridFunction, x: f64) -> [(Complex64, f64); 2] {
        [0, 1].map(|i| {
            let jet = self.alpha_word(i).map.jet_unchecked(x);
            let z = s.power_of(jet.d1) * f.eval(jet.value).0;
            let d = jet.d1.abs().powf(s.r) * h.eval(jet.value).0.re;
            (z, d)
        })
    }

    /// `(Θ₁(x), Θ₂(x))`.
    pub fn theta_values(&self, s: ComplexExponent, f: &GridFunction, h: &GridFunction, x: f64) -> [f64; 2] {
        let [(z1, d1), (z2, d2)] = self.alpha_terms(s, f, h, x);
        let num = (z1 + z2).norm();
        let damp = 1.0 - 2.0 * self.cfg.theta;
        [num / (damp * d1 + d2), num / (d1 + damp * d2)]
    }

    /// Endpoints, kernel ends and evenly spaced interior points of tile `j`.
    pub fn tile_samples(&self, j: usize, count: usize, shifted: bool) -> Vec<f64> {
        let v = self.cover.intervals[j];
        let offset = if shifted { 0.5 } else { 0.0 };
        let mut pts: Vec<f64> =
            (0..count).map(|k| v.lo + v.len() * ((k as f64 + offset) / (count - 1) as f64).min(1.0)).collect();
        if let Some(k) = self.cover.kernel[j] {
            pts.extend([k.lo, k.hi, k.mid()]);
        }
        if let Some(c) = self.cutoffs[j] {
            pts.extend([0.5 * (c.rise_start + c.plateau.lo), 0.5 * (c.plateau.hi + c.fall_end)]);
        }
        pts.into_iter().map(|x| x.clamp(0.0, 1.0)).collect()
    }

    /// Grid nodes of `grid` together with shifted samples of every hit tile.
    pub fn check_points(&self, grid: &GridFunction) -> Vec<f64> {
        let mut pts: Vec<f64> = grid.nodes().collect();
        for j in self.hit_tiles() {
            pts.extend(self.tile_samples(j, 2 * TILE_SAMPLES - 1, true));
        }
        pts
    }

    /// Builds `J = {(i, j) : Θ_i ≤ 1 on the samples of V_j}` and tests density.
    pub fn select_j(&self, s: ComplexExponent, f: &GridFunction, h: &GridFunction) -> Result<Selection, TransferError> {
        let a = self.cfg.cone_a;
        if !cone_check(h, a, self.b) {
            return Err(TransferError::PreconditionViolated("H is not in the cone".into()));
        }
        for k in 0..f.grid_size() {
            let hv = h.values()[k].re;
            if f.values()[k].norm() > hv * (1.0 + CHECK_SLACK)
                || f.derivatives()[k].norm() > a * self.b.abs() * hv * (1.0 + CHECK_SLACK)
            {
                return Err(TransferError::PreconditionViolated(format!("|f| ≤ H or |f'| ≤ A|b|H fails at node {k}")));
            }
        }
        let tiles = self.tiles();
        let mut set = DampingSet::empty(tiles);
        let hits = self.hit_tiles();
        let naud: Vec<NaudRecord> = hits
            .par_iter()
            .map(|&j| {
                let mut theta_max = [0.0f64; 2];
                let mut small = [true; 2];
                let mut large = [true; 2];
                let mut ratio_bound = 0.0f64;
                let mut min_angle = f64::INFINITY;
                for x in self.tile_samples(j, TILE_SAMPLES, false) {
                    let th = self.theta_values(s, f, h, x);
                    theta_max = [theta_max[0].max(th[0]), theta_max[1].max(th[1])];
                    let terms = self.alpha_terms(s, f, h, x);
                    for i in 0..2 {
                        let u = self.alpha_word(i).map.value(x);
                        let (fu, hu) = (f.eval(u).0.norm(), h.eval(u).0.re);
                        small[i] &= fu <= 0.75 * hu;
                        large[i] &= fu >= 0.25 * hu;
                    }
                    let (z1, z2) = (terms[0].0, terms[1].0);
                    if z1.norm() > 0.0 && z2.norm() > 0.0 {
                        let q = z1 / z2;
                        ratio_bound = ratio_bound.max(q.norm().max(1.0 / q.norm()));
                        min_angle = min_angle.min(q.arg().abs());
                    }
                }
                let dichotomy = [0, 1].map(|i| {
                    if small[i] {
                        Dichotomy::Small
                    } else if large[i] {
                        Dichotomy::Large
                    } else {
                        Dichotomy::Neither
                    }
                });
                NaudRecord { tile: j, dichotomy, ratio_bound, min_angle, theta_max }
            })
            .collect();
        for rec in &naud {
            for i in 0..2 {
                set.damped[i][rec.tile] = rec.theta_max[i] <= 1.0;
            }
        }
        let selected = |j: usize| set.damped[0][j] || set.damped[1][j];
        let uncovered: Vec<usize> =
            hits.iter().copied().filter(|&j| !(j.saturating_sub(2)..=(j + 2).min(tiles - 1)).any(selected)).collect();
        let selection = Selection { dense: uncovered.is_empty(), set, uncovered, naud };
        if !selection.dense && self.uni_margin > UNI_FLOOR {
            return Err(TransferError::DensityFailed(Box::new(selection)));
        }
        Ok(selection)
    }

    /// Cone membership of `N_s^J H` at the check points.
    pub fn cone_stability(&self, set: &DampingSet, r: f64, h: &GridFunction) -> ConeReport {
        let bound = self.cfg.cone_a * self.b.abs();
        let (worst, min_value) = self
            .check_points(h)
            .par_iter()
            .map(|&x| {
                let (v, d) = self.apply_at(set, r, h, x);
                (d.abs() / (bound * v), v)
            })
            .reduce(|| (0.0, f64::INFINITY), |a, b| (a.0.max(b.0), a.1.min(b.1)));
        ConeReport { holds: min_value > 0.0 && worst <= 1.0 + CHECK_SLACK, worst_ratio: worst, min_value }
    }

    /// `|L^N_{s,w*} f| ≤ N_s^J H` and the derivative bound at the check points.
    pub fn domination(
        &self,
        set: &DampingSet,
        s: ComplexExponent,
        f: &GridFunction,
        h: &GridFunction,
    ) -> DominationReport {
        let bound = self.cfg.cone_a * self.b.abs();
        let pts = self.check_points(h);
        let (worst, worst_d) = pts
            .par_iter()
            .map(|&x| {
                let (lv, ld) = self.sub_transfer_at(s, f, x);
                let (nv, _) = self.apply_at(set, s.r, h, x);
                (lv.norm() / nv, ld.norm() / (bound * nv))
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        DominationReport {
            holds: worst <= 1.0 + CHECK_SLACK,
            worst_ratio: worst,
            derivative_holds: worst_d <= 1.0 + CHECK_SLACK,
            worst_derivative_ratio: worst_d,
            points: pts.len(),
        }
    }

    /// `μ_w` at the kernels of the cover and its pushforward `μ_{(w*)^N w}`.
    pub fn l2_measures(&self) -> Result<(DiscreteMeasure, DiscreteMeasure), TransferError> {
        let mu_w = cover_measure(&self.cover).map_err(|e| TransferError::InvalidArgument(e.to_string()))?;
        let branches: Vec<(f64, ContractionMap)> = self.words.iter().map(|w| (w.weight, w.map.clone())).collect();
        let mu_star_w = pushforward(&mu_w, &branches).map_err(|e| TransferError::InvalidArgument(e.to_string()))?;
        Ok((mu_w, mu_star_w))
    }

    /// `∫|N_s^J H|² dμ_w / ∫H² dμ_{(w*)^N w}`.
    pub fn l2_ratio(
        &self,
        set: &DampingSet,
        r: f64,
        h: &GridFunction,
        mu_w: &DiscreteMeasure,
        mu_star_w: &DiscreteMeasure,
    ) -> f64 {
        let num = mu_w.integrate(|x| self.apply_at(set, r, h, x).0.powi(2));
        let den = mu_star_w.integrate(|x| h.eval(x).0.norm_sqr());
        num / den
    }
}

/// `g > 0` and `|g'| ≤ A|b| g` at every node.
pub fn cone_check(g: &GridFunction, a: f64, b: f64) -> bool {
    g.values().iter().zip(g.derivatives()).all(|(v, d)| {
        v.re > 0.0 && v.im.abs() <= CHECK_SLACK * v.re && d.norm() <= a * b.abs() * v.re * (1.0 + CHECK_SLACK)
    })
}

/// `(w*)^N` prefix of a string over `Ω`, for the right-hand measure of the L² bound.
pub fn star_prefixed(partition: &PartitionResult, block_n: usize, w_string: &[usize]) -> Vec<usize> {
    std::iter::repeat_n(partition.star, block_n).chain(w_string.iter().copied()).collect()
}
