use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TransferError;

/// A `C¹` function on `[0, 1]` stored as values and derivatives at the nodes
/// `k / (n - 1)`. Off-grid evaluation is cubic Hermite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<Complex64>,
    derivatives: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>, derivatives: Vec<Complex64>) -> Result<Self, TransferError> {
        if values.len() < 2 || values.len() != derivatives.len() {
            return Err(TransferError::InvalidArgument("grid needs at least two nodes and matching channels".into()));
        }
        if values.iter().chain(&derivatives).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(TransferError::InvalidArgument("grid data must be finite".into()));
        }
        Ok(Self { values, derivatives })
    }

    /// Samples `f(x) -> (value, derivative)` at the nodes.
    pub fn from_fn(grid_size: usize, f: impl Fn(f64) -> (Complex64, Complex64)) -> Self {
        let n = grid_size.max(2);
        let (values, derivatives) = (0..n).map(|k| f(node(n, k))).unzip();
        Self { values, derivatives }
    }

    pub fn from_real(grid_size: usize, f: impl Fn(f64) -> (f64, f64)) -> Self {
        Self::from_fn(grid_size, |x| {
            let (v, d) = f(x);
            (Complex64::new(v, 0.0), Complex64::new(d, 0.0))
        })
    }

    pub fn constant(grid_size: usize, c: Complex64) -> Self {
        let n = grid_size.max(2);
        Self { values: vec![c; n], derivatives: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn node(&self, k: usize) -> f64 {
        node(self.values.len(), k)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|k| self.node(k))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn derivatives(&self) -> &[Complex64] {
        &self.derivatives
    }

    /// Hermite value and derivative at `x`, clamped to `[0, 1]`.
    pub fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let n = self.values.len();
        let h = 1.0 / (n - 1) as f64;
        let pos = (x.clamp(0.0, 1.0) / h).min((n - 1) as f64);
        let k = (pos.floor() as usize).min(n - 2);
        let t = pos - k as f64;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.derivatives[k] * h, self.derivatives[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value =
            y0 * (2.0 * t3 - 3.0 * t2 + 1.0) + m0 * (t3 - 2.0 * t2 + t) + y1 * (-2.0 * t3 + 3.0 * t2) + m1 * (t3 - t2);
        let slope = y0 * (6.0 * t2 - 6.0 * t)
            + m0 * (3.0 * t2 - 4.0 * t + 1.0)
            + y1 * (-6.0 * t2 + 6.0 * t)
            + m1 * (3.0 * t2 - 2.0 * t);
        (value, slope / h)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sup_derivative(&self) -> f64 {
        self.derivatives.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖f‖_∞ + ‖f'‖_∞ / |b|` over the nodes.
    pub fn b_norm(&self, b: f64) -> Result<f64, TransferError> {
        if b == 0.0 {
            return Err(TransferError::ZeroB);
        }
        Ok(self.sup_norm() + self.sup_derivative() / b.abs())
    }

    /// Resamples onto another grid size by Hermite evaluation.
    pub fn resample(&self, grid_size: usize) -> Self {
        Self::from_fn(grid_size, |x| self.eval(x))
    }

    /// Pointwise product with a real-coefficient function `u` given by value and derivative.
    pub fn times(&self, u: &GridFunction) -> Self {
        let values = self.values.iter().zip(&u.values).map(|(a, b)| a * b).collect();
        let derivatives = (0..self.values.len())
            .map(|k| self.derivatives[k] * u.values[k] + self.values[k] * u.derivatives[k])
            .collect();
        Self { values, derivatives }
    }
}

fn node(n: usize, k: usize) -> f64 {
    if k + 1 == n {
        1.0
    } else {
        k as f64 / (n - 1) as f64
    }
}
