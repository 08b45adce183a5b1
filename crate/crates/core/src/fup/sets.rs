use serde::{Deserialize, Serialize};

use super::FupError;
use crate::ifs::{attractor_cover, Ifs, DEFAULT_COVER_BUDGET};
use crate::interval::{merge, Interval};

/// A compact subset of the line, before thickening.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetSpec {
    Points(Vec<f64>),
    Intervals(Vec<Interval>),
    /// The attractor of an IFS, resolved into cylinders shorter than the thickening scale.
    Attractor(Ifs),
}

impl SetSpec {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::Intervals(vec![Interval::new(lo, hi)])
    }

    fn pieces(&self, h: f64) -> Result<Vec<Interval>, FupError> {
        Ok(match self {
            Self::Points(p) => p.iter().map(|&x| Interval::new(x, x)).collect(),
            Self::Intervals(v) => v.clone(),
            Self::Attractor(ifs) => {
                attractor_cover(ifs, h.min(1.0), DEFAULT_COVER_BUDGET)?.into_iter().map(|c| c.image).collect()
            }
        })
    }
}

/// `K + B(0, h)` as sorted disjoint closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickenedSet {
    pub intervals: Vec<Interval>,
    pub scale_h: f64,
}

impl ThickenedSet {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|v| v.len()).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|v| v.contains(x))
    }

    /// The same set moved by `t`.
    pub fn shifted(&self, t: f64) -> Self {
        Self {
            intervals: self.intervals.iter().map(|v| Interval::new(v.lo + t, v.hi + t)).collect(),
            scale_h: self.scale_h,
        }
    }

    pub fn empty(h: f64) -> Self {
        Self { intervals: Vec::new(), scale_h: h }
    }
}

pub fn thicken(set: &SetSpec, h: f64) -> Result<ThickenedSet, FupError> {
    if !(h > 0.0) {
        return Err(FupError::InvalidArgument(format!("h must be positive, got {h}")));
    }
    let grown = set.pieces(h)?.into_iter().map(|v| v.inflate(h)).collect();
    Ok(ThickenedSet { intervals: merge(grown), scale_h: h })
}
