//! Closed intervals with outward-rounded construction for separation checks.

use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Relative widening applied by [`Interval::widened`].
const ROUNDING_PAD: f64 = 4.0 * f64::EPSILON;

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0)
    }

    /// From two endpoints in any order.
    pub fn spanning(a: f64, b: f64) -> Self {
        Self::new(a.min(b), a.max(b))
    }

    /// Pads both ends by a few ulps so that float rounding in the endpoints
    /// cannot make two touching images look disjoint.
    pub fn widened(self) -> Self {
        let pad = |v: f64| ROUNDING_PAD * v.abs().max(f64::MIN_POSITIVE);
        Self::new(self.lo - pad(self.lo), self.hi + pad(self.hi))
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when the closed intervals share no point.
    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    /// Distance between the intervals (zero when they meet).
    pub fn gap(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn inflate(&self, r: f64) -> Interval {
        Interval::new(self.lo - r, self.hi + r)
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        (self.lo - x).max(x - self.hi).max(0.0)
    }
}

/// Merges overlapping or touching intervals; the output is sorted and disjoint.
pub fn merge(mut parts: Vec<Interval>) -> Vec<Interval> {
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
    for iv in parts {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn touching_is_not_disjoint() {
        let a = Interval::new(0.0, 0.5);
        let b = Interval::new(0.5, 1.0);
        assert!(!a.disjoint(&b));
        assert!(!a.widened().disjoint(&b.widened()));
        assert!(a.disjoint(&Interval::new(0.6, 0.7)));
        assert!((a.gap(&Interval::new(0.6, 0.7)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn merge_joins_touching() {
        let m = merge(vec![Interval::new(0.5, 1.0), Interval::new(0.0, 0.5), Interval::new(2.0, 3.0)]);
        assert_eq!(m, vec![Interval::new(0.0, 1.0), Interval::new(2.0, 3.0)]);
    }
}
