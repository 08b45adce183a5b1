use serde::{Deserialize, Serialize};

use super::IfsError;

/// Value, first and second derivative of a map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    /// `d1''/d1'`, the derivative of `log|d1|`.
    pub fn log_derivative_slope(&self) -> f64 {
        self.d2 / self.d1
    }
}

/// A real-analytic injective contraction of `[0, 1]`.
///
/// `Composed(vec![f, g, h])` is `f ∘ g ∘ h`; its derivatives come from the chain rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ContractionMap {
    Affine {
        slope: f64,
        offset: f64,
    },
    Moebius {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        /// `ad - bc` carried exactly through [`ContractionMap::collapsed`]; deep words
        /// give nearly rank-one matrices whose determinant cancels in floating point.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        det: Option<f64>,
    },
    Composed {
        maps: Vec<ContractionMap>,
    },
}

/// Tolerance for evaluating a map slightly outside `[0, 1]`.
pub const DOMAIN_SLACK: f64 = 1e-12;

impl ContractionMap {
    pub fn affine(slope: f64, offset: f64) -> Self {
        Self::Affine { slope, offset }
    }

    pub fn moebius(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::Moebius { a, b, c, d, det: None }
    }

    pub fn identity() -> Self {
        Self::Composed { maps: Vec::new() }
    }

    /// `self ∘ inner`.
    pub fn then_inner(&self, inner: &ContractionMap) -> Self {
        let mut maps = self.leaves();
        maps.extend(inner.leaves());
        Self::Composed { maps }
    }

    fn leaves(&self) -> Vec<ContractionMap> {
        match self {
            Self::Composed { maps } => maps.iter().flat_map(|m| m.leaves()).collect(),
            leaf => vec![leaf.clone()],
        }
    }

    /// Checks the kind-specific invariants: finite coefficients, a pole-free
    /// denominator on `[0, 1]`, a non-vanishing derivative and `φ([0,1]) ⊂ [0,1]`.
    pub fn validate(&self) -> Result<(), IfsError> {
        match *self {
            Self::Affine { slope, offset } => {
                if !(slope.is_finite() && offset.is_finite()) || slope == 0.0 {
                    return Err(IfsError::InvalidMap("affine slope must be finite and nonzero".into()));
                }
            }
            Self::Moebius { a, b, c, d, .. } => {
                if ![a, b, c, d].iter().all(|v| v.is_finite()) {
                    return Err(IfsError::InvalidMap("non-finite Möbius coefficient".into()));
                }
                let (q0, q1) = (d, c + d);
                if q0 == 0.0 || q1 == 0.0 || q0.signum() != q1.signum() {
                    return Err(IfsError::InvalidMap("Möbius denominator vanishes on [0,1]".into()));
                }
                if self.determinant() == 0.0 {
                    return Err(IfsError::InvalidMap("degenerate Möbius map (ad - bc = 0)".into()));
                }
            }
            Self::Composed { ref maps } => {
                for m in maps {
                    m.validate()?;
                }
                return Ok(());
            }
        }
        let (lo, hi) = self.image_endpoints();
        if lo < -DOMAIN_SLACK || hi > 1.0 + DOMAIN_SLACK {
            return Err(IfsError::InvalidMap(format!("image [{lo}, {hi}] leaves [0,1]")));
        }
        Ok(())
    }

    /// Evaluates without the domain check.
    pub fn jet_unchecked(&self, x: f64) -> Jet {
        match *self {
            Self::Affine { slope, offset } => Jet { value: slope * x + offset, d1: slope, d2: 0.0 },
            Self::Moebius { a, b, c, d, .. } => {
                let q = c * x + d;
                let det = self.determinant();
                Jet { value: (a * x + b) / q, d1: det / (q * q), d2: -2.0 * c * det / (q * q * q) }
            }
            Self::Composed { ref maps } => {
                let mut jet = Jet { value: x, d1: 1.0, d2: 0.0 };
                for m in maps.iter().rev() {
                    let outer = m.jet_unchecked(jet.value);
                    jet = Jet {
                        value: outer.value,
                        d1: outer.d1 * jet.d1,
                        d2: outer.d2 * jet.d1 * jet.d1 + outer.d1 * jet.d2,
                    };
                }
                jet
            }
        }
    }

    pub fn jet(&self, x: f64) -> Result<Jet, IfsError> {
        if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
            return Err(IfsError::DomainError(x));
        }
        Ok(self.jet_unchecked(x))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet_unchecked(x).value
    }

    /// `φ⁻¹(y)` for `y` in the image.
    pub fn inverse_value(&self, y: f64) -> f64 {
        match *self {
            Self::Affine { slope, offset } => (y - offset) / slope,
            Self::Moebius { a, b, c, d, .. } => (d * y - b) / (a - c * y),
            Self::Composed { ref maps } => maps.iter().fold(y, |acc, m| m.inverse_value(acc)),
        }
    }

    /// Sorted endpoints of `φ([0, 1])`; maps are monotone.
    pub fn image_endpoints(&self) -> (f64, f64) {
        let (u, v) = (self.value(0.0), self.value(1.0));
        if u <= v {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn image_diameter(&self) -> f64 {
        let (lo, hi) = self.image_endpoints();
        hi - lo
    }

    /// An equivalent map with runs of affine and Möbius leaves multiplied out
    /// into single Möbius leaves. Exact up to rounding; used on hot paths.
    pub fn collapsed(&self) -> ContractionMap {
        match self {
            Self::Composed { .. } => {
                let leaves = self.leaves();
                if leaves.is_empty() {
                    return Self::affine(1.0, 0.0);
                }
                let mut m = [1.0, 0.0, 0.0, 1.0];
                let mut det = 1.0;
                for leaf in &leaves {
                    let n = leaf.matrix();
                    m = [
                        m[0] * n[0] + m[1] * n[2],
                        m[0] * n[1] + m[1] * n[3],
                        m[2] * n[0] + m[3] * n[2],
                        m[2] * n[1] + m[3] * n[3],
                    ];
                    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                    for v in &mut m {
                        *v /= scale;
                    }
                    det *= leaf.determinant() / (scale * scale);
                }
                if m[2] == 0.0 {
                    Self::affine(m[0] / m[3], m[1] / m[3])
                } else {
                    Self::Moebius { a: m[0], b: m[1], c: m[2], d: m[3], det: Some(det) }
                }
            }
            leaf => leaf.clone(),
        }
    }

    /// Determinant of the matrix returned by `matrix`.
    fn determinant(&self) -> f64 {
        match *self {
            Self::Affine { slope, .. } => slope,
            Self::Moebius { a, b, c, d, det } => det.unwrap_or(a * d - b * c),
            Self::Composed { .. } => self.collapsed().determinant(),
        }
    }

    fn matrix(&self) -> [f64; 4] {
        match *self {
            Self::Affine { slope, offset } => [slope, offset, 0.0, 1.0],
            Self::Moebius { a, b, c, d, .. } => [a, b, c, d],
            Self::Composed { .. } => self.collapsed().matrix(),
        }
    }

    /// A fixed point in `[0, 1]` by bisection on `φ(x) - x`.
    pub fn fixed_point(&self) -> f64 {
        let g = |x: f64| self.value(x) - x;
        let (mut lo, mut hi) = (0.0, 1.0);
        if g(lo) <= 0.0 {
            return lo;
        }
        if g(hi) >= 0.0 {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_jet_at_zero() {
        let j = ContractionMap::moebius(1.0, 0.0, 1.0, 1.0).jet(0.0).unwrap();
        assert_eq!((j.value, j.d1, j.d2), (0.0, 1.0, -2.0));
    }

    #[test]
    fn affine_jet() {
        let j = ContractionMap::affine(0.5, 0.5).jet(1.0).unwrap();
        assert_eq!((j.value, j.d1, j.d2), (1.0, 0.5, 0.0));
    }

    #[test]
    fn out_of_domain() {
        let m = ContractionMap::affine(0.5, 0.0);
        assert!(matches!(m.jet(1.5), Err(IfsError::DomainError(_))));
    }

    #[test]
    fn composed_chain_rule_matches_closed_form() {
        // 1/(2 + 1/(3 + x)) = (3 + x)/(7 + 2x)
        let f = ContractionMap::moebius(0.0, 1.0, 1.0, 2.0);
        let g = ContractionMap::moebius(0.0, 1.0, 1.0, 3.0);
        let fg = f.then_inner(&g);
        let closed = ContractionMap::moebius(1.0, 3.0, 2.0, 7.0);
        for &x in &[0.0, 0.3, 0.77, 1.0] {
            let (u, v) = (fg.jet(x).unwrap(), closed.jet(x).unwrap());
            assert!((u.value - v.value).abs() < 1e-15);
            assert!((u.d1 - v.d1).abs() < 1e-15);
            assert!((u.d2 - v.d2).abs() < 1e-15);
            let w = fg.collapsed().jet(x).unwrap();
            assert!((w.d2 - v.d2).abs() < 1e-14);
        }
    }

    #[test]
    fn deep_collapse_keeps_the_derivative() {
        let f = ContractionMap::moebius(0.0, 1.0, 1.0, 2.0);
        let g = ContractionMap::moebius(0.0, 1.0, 1.0, 3.0);
        let deep = (0..60).fold(ContractionMap::identity(), |acc, k| acc.then_inner(if k % 3 == 0 { &g } else { &f }));
        let flat = deep.collapsed();
        for &x in &[0.0, 0.4, 1.0] {
            let (u, v) = (deep.jet(x).unwrap(), flat.jet(x).unwrap());
            assert!(u.d1.abs() < 1e-40);
            assert!((u.d1 - v.d1).abs() <= 1e-12 * u.d1.abs(), "{u:?} {v:?}");
            assert!((u.d2 - v.d2).abs() <= 1e-12 * u.d2.abs());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f = ContractionMap::moebius(0.0, 1.0, 1.0, 2.0).then_inner(&ContractionMap::affine(-0.5, 0.75));
        for &x in &[0.0, 0.4, 1.0] {
            assert!((f.inverse_value(f.value(x)) - x).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_pole_in_domain() {
        assert!(ContractionMap::moebius(1.0, 0.0, 1.0, -0.5).validate().is_err());
        assert!(ContractionMap::affine(2.0, 0.0).validate().is_err());
        assert!(ContractionMap::moebius(1.0, 0.0, 1.0, 1.0).validate().is_ok());
    }

    #[test]
    fn fixed_points() {
        assert!((ContractionMap::affine(0.5, 0.5).fixed_point() - 1.0).abs() < 1e-12);
        let f = ContractionMap::moebius(1.0, 0.5, 1.0, 1.5);
        assert!((f.fixed_point() - 0.5).abs() < 1e-12);
    }
}
