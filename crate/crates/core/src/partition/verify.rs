use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{word_image, PartitionResult, UNI_POWERS};
use crate::ifs::{uni_margin, Ifs, UniDomain, Word};

/// Per-property outcome of [`verify_partition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    /// Groups form a disjoint union equal to `A^N`.
    pub union_ok: bool,
    /// Every group other than `w*` has two or three members.
    pub sizes_ok: bool,
    /// Images within each group are pairwise disjoint.
    pub separation_ok: bool,
    /// Smallest gap between images inside a group.
    pub separation_margin: f64,
    /// `φ_{α₁}(I) ∩ φ_{α₂}(I) = ∅`.
    pub star_disjoint_ok: bool,
    pub star_margin: f64,
    /// `p_{α₁} = p_{α₂}` and both conditional weights in `w*` equal 1/2.
    pub star_balanced_ok: bool,
    /// Group weights sum to one and conditional weights sum to one per group.
    pub weights_ok: bool,
    /// Smallest UNI margin of `(α₁^l, α₂^l)`, `l = 1..=4`. Diagnostic only:
    /// affine systems have zero margin yet admit valid partitions.
    pub uni_margin: f64,
}

impl PartitionReport {
    pub fn property1(&self) -> bool {
        self.union_ok && self.weights_ok
    }
    pub fn property2(&self) -> bool {
        self.sizes_ok
    }
    pub fn property3(&self) -> bool {
        self.separation_ok
    }
    pub fn property4(&self) -> bool {
        self.star_disjoint_ok && self.star_balanced_ok
    }
    pub fn all_pass(&self) -> bool {
        self.property1() && self.property2() && self.property3() && self.property4()
    }
}

/// Re-checks the partition properties from scratch.
pub fn verify_partition(ifs: &Ifs, p: &PartitionResult, uni_delta: f64) -> PartitionReport {
    let n = p.block_length;
    let mut seen: HashMap<&Word, usize> = HashMap::new();
    for g in &p.groups {
        for w in g {
            *seen.entry(w).or_default() += 1;
        }
    }
    let expected = ifs.alphabet_size().pow(n as u32);
    let union_ok = seen.len() == expected
        && seen.values().all(|&c| c == 1)
        && seen.keys().all(|w| w.len() == n && w.letters().iter().all(|&a| a < ifs.alphabet_size()));

    let sizes_ok =
        p.groups.iter().enumerate().all(|(i, g)| if i == p.star { g.len() == 2 } else { (2..=3).contains(&g.len()) });

    let mut separation_margin = f64::INFINITY;
    let mut separation_ok = true;
    for (i, g) in p.groups.iter().enumerate() {
        if i == p.star {
            continue;
        }
        let imgs: Vec<_> = g.iter().map(|w| word_image(ifs, w)).collect();
        for x in 0..imgs.len() {
            for y in x + 1..imgs.len() {
                separation_ok &= imgs[x].disjoint(&imgs[y]);
                separation_margin = separation_margin.min(imgs[x].gap(&imgs[y]));
            }
        }
    }

    let star = p.star_group();
    let (s0, s1) = (word_image(ifs, &star[0]), word_image(ifs, &star[1]));
    let star_disjoint_ok = star.len() == 2 && s0.disjoint(&s1);
    let star_margin = s0.gap(&s1);
    let star_balanced_ok = (ifs.word_prob(&star[0]) - ifs.word_prob(&star[1])).abs() <= 1e-15
        && p.conditional_probs[p.star].iter().all(|&c| (c - 0.5).abs() <= 1e-15);

    let total: f64 = p.group_weights.iter().sum();
    let weights_ok = (total - 1.0).abs() <= 1e-12
        && p.conditional_probs.iter().all(|c| (c.iter().sum::<f64>() - 1.0).abs() <= 1e-12)
        && p.groups
            .iter()
            .zip(&p.group_weights)
            .all(|(g, &q)| (g.iter().map(|a| ifs.word_prob(a)).sum::<f64>() - q).abs() <= 1e-15);

    let mut uni = f64::INFINITY;
    for l in 1..=UNI_POWERS {
        match uni_margin(ifs, &star[0].power(l), &star[1].power(l), UniDomain::Neighborhood(uni_delta), 32) {
            Ok((lo, _)) => uni = uni.min(lo),
            Err(_) => uni = f64::NAN,
        }
    }

    PartitionReport {
        union_ok,
        sizes_ok,
        separation_ok,
        separation_margin,
        star_disjoint_ok,
        star_margin,
        star_balanced_ok,
        weights_ok,
        uni_margin: uni,
    }
}

/// Number of length-`N` blocks `(w*)^N` among the first `⌊n/2N⌋`.
pub fn star_block_count(p: &PartitionResult, w_string: &[usize]) -> usize {
    let n = p.block_length;
    let blocks = w_string.len() / (2 * n);
    (0..blocks).filter(|&i| w_string[i * n..(i + 1) * n].iter().all(|&g| g == p.star)).count()
}

/// A string over `Ω` is good when it contains enough `(w*)^N` blocks:
/// at least `q_{w*}^N · n / (5N)` of them.
pub fn is_good_word(p: &PartitionResult, w_string: &[usize]) -> bool {
    let n = p.block_length as f64;
    let q_star = p.group_weights[p.star];
    let threshold = q_star.powf(n) * w_string.len() as f64 / (5.0 * n);
    star_block_count(p, w_string) as f64 >= threshold
}

/// `Σ_{w ∈ Ω^n} q_w`, summed by exhaustive enumeration.
pub fn omega_mass(p: &PartitionResult, n: usize) -> f64 {
    let m = p.omega_size();
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        total += idx.iter().map(|&g| p.group_weights[g]).product::<f64>();
        let mut pos = n;
        loop {
            if pos == 0 {
                return total;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}
