use serde::{Deserialize, Serialize};

use super::MeasureError;
use crate::ifs::{ContractionMap, Ifs};
use crate::interval::Interval;
use crate::partition::{star_hull, tail_hulls, IntervalCover, PartitionResult};

/// Sum-to-one tolerance for atom masses.
pub const MASS_TOL: f64 = 1e-10;

/// Cylinders lighter than this are not refined further. Their total mass is
/// at most `budget * NEGLIGIBLE_MASS`.
pub const NEGLIGIBLE_MASS: f64 = 1e-250;

/// Default cap on the number of atoms a refinement may produce.
pub const DEFAULT_ATOM_BUDGET: usize = 4_000_000;

/// Finitely many weighted atoms on `[0, 1]`, sorted by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    positions: Vec<f64>,
    masses: Vec<f64>,
    /// Largest diameter of a generating cylinder.
    resolution: f64,
    provenance: String,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    positions: Vec<f64>,
    masses: Vec<f64>,
    resolution: f64,
    provenance: String,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = MeasureError;
    fn try_from(raw: RawMeasure) -> Result<Self, MeasureError> {
        DiscreteMeasure::new(raw.positions, raw.masses, raw.resolution, raw.provenance)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure { positions: m.positions, masses: m.masses, resolution: m.resolution, provenance: m.provenance }
    }
}

impl DiscreteMeasure {
    /// Sorts the atoms by position and checks the mass and resolution invariants.
    pub fn new(
        positions: Vec<f64>,
        masses: Vec<f64>,
        resolution: f64,
        provenance: impl Into<String>,
    ) -> Result<Self, MeasureError> {
        if positions.is_empty() || positions.len() != masses.len() {
            return Err(MeasureError::InvalidMeasure("need matching, non-empty positions and masses".into()));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(MeasureError::InvalidMeasure(format!("resolution must be positive, got {resolution}")));
        }
        if masses.iter().any(|&m| !(m > 0.0 && m.is_finite())) || positions.iter().any(|x| !x.is_finite()) {
            return Err(MeasureError::InvalidMeasure("masses must be positive and positions finite".into()));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(MeasureError::InvalidMeasure(format!("masses sum to {total}")));
        }
        let mut atoms: Vec<(f64, f64)> = positions.into_iter().zip(masses).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (positions, masses): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
        let mut cumulative = Vec::with_capacity(masses.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for m in &masses {
            acc += m;
            cumulative.push(acc);
        }
        Ok(Self { positions, masses, resolution, provenance: provenance.into(), cumulative })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Mass of the closed interval `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        let i = self.positions.partition_point(|&x| x < lo);
        let j = self.positions.partition_point(|&x| x <= hi);
        if j <= i {
            0.0
        } else {
            self.cumulative[j] - self.cumulative[i]
        }
    }

    /// Mass of the closed ball `B(x, r)`.
    pub fn ball(&self, x: f64, r: f64) -> f64 {
        self.mass_in(x - r, x + r)
    }

    /// `Σ mass · f(position)`.
    pub fn integrate<T>(&self, f: impl Fn(f64) -> T) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
    {
        self.positions.iter().zip(&self.masses).map(|(&x, &m)| f(x) * m).sum()
    }

    /// Closed hull of the atom positions.
    pub fn hull(&self) -> Interval {
        Interval::new(self.positions[0], self.positions[self.positions.len() - 1])
    }

    /// Atom positions selected at evenly spaced mass quantiles.
    pub fn quantile_atoms(&self, count: usize) -> Vec<f64> {
        let total = self.total_mass();
        (0..count)
            .map(|k| {
                let target = total * (k as f64 + 0.5) / count as f64;
                let idx = self.cumulative.partition_point(|&c| c < target).clamp(1, self.len());
                self.positions[idx - 1]
            })
            .collect()
    }
}

/// A node of a refinement tree: tree depth, composed map and accumulated mass.
struct Node {
    depth: usize,
    map: ContractionMap,
    mass: f64,
}

/// Splits cylinders until their images of the depth-dependent `base` interval
/// are shorter than `tol`; each leaf becomes an atom at its image midpoint.
fn refine_tree(
    tol: f64,
    budget: usize,
    provenance: String,
    options: impl Fn(usize) -> Vec<(ContractionMap, f64)>,
    base: impl Fn(usize) -> Interval,
) -> Result<DiscreteMeasure, MeasureError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(MeasureError::InvalidArgument(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let mut positions = Vec::new();
    let mut masses = Vec::new();
    let mut resolution = 0.0f64;
    let mut stack = vec![Node { depth: 0, map: ContractionMap::identity(), mass: 1.0 }];
    while let Some(node) = stack.pop() {
        for (m, p) in options(node.depth) {
            let child = node.map.then_inner(&m).collapsed();
            let iv = base(node.depth + 1);
            let img = Interval::spanning(child.value(iv.lo), child.value(iv.hi));
            let mass = node.mass * p;
            // Near a parabolic fixed point the cylinder masses underflow long
            // before the images shrink; such crumbs stay unsplit and are left
            // out of the resolution.
            if mass < NEGLIGIBLE_MASS {
                if positions.len() >= budget {
                    return Err(MeasureError::BudgetExceeded(budget));
                }
                positions.push(img.mid());
                masses.push(mass);
            } else if img.len() < tol {
                if positions.len() >= budget {
                    return Err(MeasureError::BudgetExceeded(budget));
                }
                positions.push(img.mid());
                masses.push(mass);
                resolution = resolution.max(img.len());
            } else {
                stack.push(Node { depth: node.depth + 1, map: child, mass });
            }
        }
    }
    // Exact sum-to-one despite rounding in the products.
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    DiscreteMeasure::new(positions, masses, resolution.max(f64::MIN_POSITIVE), provenance)
}

/// The self-conformal measure `μ_p`: cylinders split until `diam φ_a(I) < tol`,
/// atom at the midpoint of `φ_a(I)` with mass `p_a`.
pub fn measure_refine(ifs: &Ifs, tol: f64) -> Result<DiscreteMeasure, MeasureError> {
    measure_refine_budget(ifs, tol, DEFAULT_ATOM_BUDGET)
}

pub fn measure_refine_budget(ifs: &Ifs, tol: f64, budget: usize) -> Result<DiscreteMeasure, MeasureError> {
    let branches: Vec<(ContractionMap, f64)> = ifs.maps().iter().cloned().zip(ifs.probs().iter().copied()).collect();
    refine_tree(tol, budget, format!("self-conformal measure, tol {tol:e}"), |_| branches.clone(), |_| Interval::unit())
}

/// The random measure `μ_w` for a string `w` over `Ω`, continued by the
/// equal-weight measure `μ*` of `{φ_{α₁}, φ_{α₂}}`. Cylinder images are taken
/// of the hull of the tail attractor, so every atom lies in the hull of `K_w`.
pub fn random_measure(
    ifs: &Ifs,
    partition: &PartitionResult,
    w_string: &[usize],
    tol: f64,
) -> Result<DiscreteMeasure, MeasureError> {
    if let Some(&g) = w_string.iter().find(|&&g| g >= partition.omega_size()) {
        return Err(MeasureError::InvalidArgument(format!("Ω index {g} out of range")));
    }
    let block = |g: usize| -> Vec<(ContractionMap, f64)> {
        partition.groups[g]
            .iter()
            .zip(&partition.conditional_probs[g])
            .map(|(w, &p)| (ifs.compose_word(w).expect("partition word").collapsed(), p))
            .collect()
    };
    let per_level: Vec<Vec<(ContractionMap, f64)>> = w_string.iter().map(|&g| block(g)).collect();
    let star = block(partition.star);
    let hulls =
        if w_string.is_empty() { vec![star_hull(ifs, partition)] } else { tail_hulls(ifs, partition, w_string) };
    let n = w_string.len();
    refine_tree(
        tol,
        DEFAULT_ATOM_BUDGET,
        format!("random measure for {w_string:?}, tol {tol:e}"),
        |k| if k < n { per_level[k].clone() } else { star.clone() },
        |k| hulls[k.min(hulls.len() - 1)],
    )
}

/// `μ_w` discretised at the kernels of a cover: one atom per hit interval, at
/// the kernel midpoint, carrying the exact mass of the cutoff cylinder.
pub fn cover_measure(cover: &IntervalCover) -> Result<DiscreteMeasure, MeasureError> {
    let (mut positions, mut masses) = (Vec::new(), Vec::new());
    let mut resolution = f64::MIN_POSITIVE;
    for (k, &m) in cover.kernel.iter().zip(&cover.kernel_mass) {
        if let Some(k) = k {
            positions.push(k.mid());
            masses.push(m);
            resolution = resolution.max(k.len());
        }
    }
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    DiscreteMeasure::new(positions, masses, resolution, format!("cover kernels at ε = {:e}", cover.epsilon))
}

/// `Σ_i p_i (φ_i)_* m` for weights summing to one.
pub fn pushforward(m: &DiscreteMeasure, branches: &[(f64, ContractionMap)]) -> Result<DiscreteMeasure, MeasureError> {
    let total: f64 = branches.iter().map(|b| b.0).sum();
    if branches.is_empty() || (total - 1.0).abs() > MASS_TOL {
        return Err(MeasureError::InvalidArgument(format!("branch weights sum to {total}")));
    }
    let mut positions = Vec::with_capacity(m.len() * branches.len());
    let mut masses = Vec::with_capacity(positions.capacity());
    for (p, map) in branches {
        for (&x, &q) in m.positions.iter().zip(&m.masses) {
            positions.push(map.value(x));
            masses.push(p * q / total);
        }
    }
    DiscreteMeasure::new(positions, masses, m.resolution, format!("pushforward of {}", m.provenance))
}
