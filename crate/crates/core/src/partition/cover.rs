use serde::{Deserialize, Serialize};

use super::{PartitionError, PartitionResult};
use crate::ifs::{ContractionMap, Ifs, Word};
use crate::interval::Interval;

/// Ordered closed intervals covering `[0, 1]`, adapted to a random attractor `K_w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalCover {
    pub intervals: Vec<Interval>,
    /// `hit[j]` iff `V_j` meets `K_w`.
    pub hit: Vec<bool>,
    /// Hull of `K_w ∩ V_j` for hit intervals.
    pub kernel: Vec<Option<Interval>>,
    /// `μ_w` mass carried by each kernel (zero on unhit intervals).
    pub kernel_mass: Vec<f64>,
    /// Realised `A₁′ = min|V_j|/ε`.
    pub a1_lower: f64,
    /// Realised `A₁ = max|V_j|/ε`.
    pub a1_upper: f64,
    /// Realised `A₂ = min_{hit j} dist(∂V_j, K_w)/|V_j|`.
    pub a2: f64,
    pub epsilon: f64,
}

/// Outcome of [`IntervalCover::verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub tiles_unit_interval: bool,
    pub lengths_within_bounds: bool,
    pub neighbour_structure: bool,
    pub boundary_separated: bool,
}

impl CoverReport {
    pub fn all_pass(&self) -> bool {
        self.tiles_unit_interval && self.lengths_within_bounds && self.neighbour_structure && self.boundary_separated
    }
}

impl IntervalCover {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Index of an interval containing `x` (the left one on shared endpoints).
    pub fn locate(&self, x: f64) -> Option<usize> {
        let j = self.intervals.partition_point(|iv| iv.hi < x);
        (j < self.intervals.len() && self.intervals[j].contains(x)).then_some(j)
    }

    pub fn verify(&self) -> CoverReport {
        let v = &self.intervals;
        let tiles = !v.is_empty()
            && v[0].lo <= 0.0
            && v[v.len() - 1].hi >= 1.0
            && v.windows(2).all(|w| w[0].hi == w[1].lo)
            && v.iter().all(|iv| iv.len() > 0.0);
        let (lo, hi) = (self.epsilon * self.a1_lower, self.epsilon * self.a1_upper);
        let slack = 1e-12 * self.epsilon;
        let lengths = v.iter().all(|iv| iv.len() >= lo - slack && iv.len() <= hi + slack);
        let h = |j: isize| j >= 0 && (j as usize) < v.len() && self.hit[j as usize];
        let neighbours = (0..v.len() as isize)
            .filter(|&j| h(j))
            .all(|j| (h(j - 1) && h(j + 1)) || (h(j - 2) && h(j - 1)) || (h(j + 1) && h(j + 2)));
        let separated = self.a2 > 0.0
            && v.iter().zip(&self.kernel).all(|(iv, k)| match k {
                Some(k) => (k.lo - iv.lo).min(iv.hi - k.hi) >= self.a2 * iv.len() * (1.0 - 1e-9),
                None => true,
            });
        CoverReport {
            tiles_unit_interval: tiles,
            lengths_within_bounds: lengths,
            neighbour_structure: neighbours,
            boundary_separated: separated,
        }
    }
}

pub const DEFAULT_COVER_NODES: usize = 1_000_000;

/// Letters available at depth `k` of the tree over `w_1 … w_n (w*)^∞`.
fn options<'a>(p: &'a PartitionResult, w_string: &[usize], k: usize) -> &'a [Word] {
    &p.groups[group_at(p, w_string, k)]
}

fn probs<'a>(p: &'a PartitionResult, w_string: &[usize], k: usize) -> &'a [f64] {
    &p.conditional_probs[group_at(p, w_string, k)]
}

fn group_at(p: &PartitionResult, w_string: &[usize], k: usize) -> usize {
    w_string.get(k).copied().unwrap_or(p.star)
}

fn image(m: &ContractionMap, iv: Interval) -> Interval {
    Interval::spanning(m.value(iv.lo), m.value(iv.hi))
}

/// Hull of the attractor of `{φ_{α₁}, φ_{α₂}}`.
pub fn star_hull(ifs: &Ifs, p: &PartitionResult) -> Interval {
    let maps: Vec<ContractionMap> =
        p.star_group().iter().map(|w| ifs.compose_word(w).expect("valid word").collapsed()).collect();
    let mut h = Interval::unit();
    for _ in 0..200 {
        let next = maps.iter().map(|m| image(m, h)).reduce(|a, b| a.hull(&b)).expect("two maps");
        let moved = (next.lo - h.lo).abs().max((next.hi - h.hi).abs());
        h = next;
        if moved == 0.0 {
            break;
        }
    }
    h
}

/// Hulls of `K` restricted to the tail `w_k … w_n (w*)^∞`, for `k = 0..=n`.
pub fn tail_hulls(ifs: &Ifs, p: &PartitionResult, w_string: &[usize]) -> Vec<Interval> {
    let n = w_string.len();
    let mut hulls = vec![Interval::unit(); n + 1];
    hulls[n] = star_hull(ifs, p);
    for k in (0..n).rev() {
        hulls[k] = p.groups[w_string[k]]
            .iter()
            .map(|w| image(&ifs.compose_word(w).expect("valid word").collapsed(), hulls[k + 1]))
            .reduce(|a, b| a.hull(&b))
            .expect("non-empty group");
    }
    hulls
}

fn hull_at(hulls: &[Interval], k: usize) -> Interval {
    hulls[k.min(hulls.len() - 1)]
}

/// Builds the cover `V_1 … V_q` for `K_w` at scale `ε`.
///
/// Every ε-cutoff cylinder of the `w`-restricted tree contributes the hulls of
/// its grandchildren, each of which gets a closed interval. The space between
/// cylinders is tiled by pieces of length `ε`, the final piece of each gap
/// absorbing the remainder; a gap shorter than `ε` widens the tile on its left.
pub fn interval_cover(
    ifs: &Ifs,
    p: &PartitionResult,
    w_string: &[usize],
    eps: f64,
    budget: usize,
) -> Result<IntervalCover, PartitionError> {
    if w_string.iter().any(|&g| g >= p.groups.len()) {
        return Err(PartitionError::InvalidArgument("Ω index out of range".into()));
    }
    let hulls = tail_hulls(ifs, p, w_string);
    if !(eps > 0.0) || eps >= hulls[0].len() {
        return Err(PartitionError::DegenerateCover(format!("ε = {eps} is not below diam K_w = {}", hulls[0].len())));
    }
    let block = |w: &Word| ifs.compose_word(w).expect("valid word").collapsed();

    // Cutoff nodes: (depth, composed map, mass).
    let mut cutoffs: Vec<(usize, ContractionMap, f64)> = Vec::new();
    let mut stack = vec![(0usize, ContractionMap::affine(1.0, 0.0), 1.0)];
    let mut visited = 0usize;
    while let Some((k, m, mass)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(PartitionError::BudgetExceeded(budget));
        }
        for (w, q) in options(p, w_string, k).iter().zip(probs(p, w_string, k)) {
            let child = m.then_inner(&block(w)).collapsed();
            if child.image_diameter() < eps {
                cutoffs.push((k + 1, child, mass * q));
            } else {
                stack.push((k + 1, child, mass * q));
            }
        }
    }
    if cutoffs.len() < 2 {
        return Err(PartitionError::DegenerateCover(format!("{} cutoff cylinder(s) at ε = {eps}", cutoffs.len())));
    }

    // Grandchild hulls of every cutoff, clusters sorted left to right.
    let mut clusters: Vec<Vec<(Interval, f64)>> = cutoffs
        .iter()
        .map(|(k, m, mass)| {
            let mut kids = Vec::new();
            for (u, qu) in options(p, w_string, *k).iter().zip(probs(p, w_string, *k)) {
                let mu = m.then_inner(&block(u));
                for (v, qv) in options(p, w_string, k + 1).iter().zip(probs(p, w_string, k + 1)) {
                    let muv = mu.then_inner(&block(v)).collapsed();
                    kids.push((image(&muv, hull_at(&hulls, k + 2)), mass * qu * qv));
                }
            }
            kids.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
            kids
        })
        .collect();
    clusters.sort_by(|a, b| a[0].0.lo.total_cmp(&b[0].0.lo));

    // Intervals around each hull. Inside a cluster the endpoints are gap
    // midpoints; the outer margins take half the distance to the neighbouring
    // cluster, capped at ε.
    let mut intervals: Vec<Interval> = Vec::new();
    let mut hit: Vec<bool> = Vec::new();
    let mut kernel: Vec<Option<Interval>> = Vec::new();
    let mut kernel_mass: Vec<f64> = Vec::new();
    let mut cursor = 0.0f64;
    for (ci, cluster) in clusters.iter().enumerate() {
        let kids: Vec<Interval> = cluster.iter().map(|c| c.0).collect();
        let last = *kids.last().expect("non-empty cluster");
        let left_gap = if ci == 0 { kids[0].lo } else { kids[0].lo - clusters[ci - 1].last().unwrap().0.hi };
        let right_gap = if ci + 1 == clusters.len() { 1.0 - last.hi } else { clusters[ci + 1][0].0.lo - last.hi };
        let left = kids[0].lo - (left_gap / 2.0).min(eps).max(0.0);
        let right = last.hi + (right_gap / 2.0).min(eps).max(0.0);
        fill_gap(cursor, left, eps, &mut intervals, &mut hit, &mut kernel);
        kernel_mass.resize(intervals.len(), 0.0);
        let left = intervals.last().map_or(left, |v| v.hi);
        for (t, kid) in kids.iter().enumerate() {
            let lo = if t == 0 { left } else { 0.5 * (kids[t - 1].hi + kid.lo) };
            let hi = if t + 1 == kids.len() { right } else { 0.5 * (kid.hi + kids[t + 1].lo) };
            intervals.push(Interval::new(lo, hi));
            hit.push(true);
            kernel.push(Some(*kid));
            kernel_mass.push(cluster[t].1);
        }
        cursor = right;
    }
    fill_gap(cursor, 1.0, eps, &mut intervals, &mut hit, &mut kernel);
    kernel_mass.resize(intervals.len(), 0.0);
    if let Some(first) = intervals.first_mut() {
        first.lo = first.lo.min(0.0);
    }

    let a1_lower = intervals.iter().map(|v| v.len()).fold(f64::INFINITY, f64::min) / eps;
    let a1_upper = intervals.iter().map(|v| v.len()).fold(0.0, f64::max) / eps;
    let a2 = intervals
        .iter()
        .zip(&kernel)
        .filter_map(|(v, k)| k.map(|k| (k.lo - v.lo).min(v.hi - k.hi) / v.len()))
        .fold(f64::INFINITY, f64::min);
    Ok(IntervalCover { intervals, hit, kernel, kernel_mass, a1_lower, a1_upper, a2, epsilon: eps })
}

fn fill_gap(
    from: f64,
    to: f64,
    eps: f64,
    intervals: &mut Vec<Interval>,
    hit: &mut Vec<bool>,
    kernel: &mut Vec<Option<Interval>>,
) {
    let g = to - from;
    if g <= 0.0 {
        return;
    }
    if g < eps {
        if let Some(last) = intervals.last_mut() {
            last.hi = to;
            return;
        }
    }
    let count = ((g / eps).floor() as usize).max(1);
    let mut lo = from;
    for c in 0..count {
        let hi = if c + 1 == count { to } else { from + (c + 1) as f64 * eps };
        intervals.push(Interval::new(lo, hi));
        hit.push(false);
        kernel.push(None);
        lo = hi;
    }
}
