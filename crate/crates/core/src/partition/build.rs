use serde::{Deserialize, Serialize};

use super::PartitionError;
use crate::ifs::{uni_margin, Ifs, UniDomain, Word};
use crate::interval::Interval;

/// The sub-IFS partition `A^N = w* ∪ w_1 ∪ … ∪ w_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub block_length: usize,
    /// The UNI pair `(α₁, α₂)`; `groups[star]` holds the same two words.
    pub alpha: (Word, Word),
    /// Groups of block words; the special group `w*` sits at index `star`.
    pub groups: Vec<Vec<Word>>,
    pub star: usize,
    /// `q_w = Σ_{a∈w} p_a`.
    pub group_weights: Vec<f64>,
    /// `p_{a,w} = p_a / q_w`, aligned with `groups`.
    pub conditional_probs: Vec<Vec<f64>>,
    /// Index spacing beyond which enumerated images are disjoint.
    pub t_n: usize,
}

impl PartitionResult {
    pub fn omega_size(&self) -> usize {
        self.groups.len()
    }

    pub fn star_group(&self) -> &[Word] {
        &self.groups[self.star]
    }

    /// Recomputes `q_w` and `p_{a,w}` from the IFS probabilities.
    pub fn reweigh(&mut self, ifs: &Ifs) {
        self.group_weights = self.groups.iter().map(|g| g.iter().map(|a| ifs.word_prob(a)).sum()).collect();
        self.conditional_probs = self
            .groups
            .iter()
            .zip(&self.group_weights)
            .map(|(g, q)| g.iter().map(|a| ifs.word_prob(a) / q).collect())
            .collect();
    }
}

/// Closed image interval of a word, padded against rounding.
pub fn word_image(ifs: &Ifs, w: &Word) -> Interval {
    let m = ifs.compose_word(w).expect("word over the IFS alphabet").collapsed();
    let (lo, hi) = m.image_endpoints();
    Interval::new(lo, hi).widened()
}

/// Equal-length word pairs, shortest first. For each `c` in increasing order the
/// partner `d` is scanned from the lexicographically largest word downwards,
/// which favours pairs built from different letters.
pub fn find_disjoint_pair(ifs: &Ifs, max_depth: usize) -> Result<(Word, Word), PartitionError> {
    for len in 1..=max_depth {
        let words = ifs.words(len);
        let images: Vec<Interval> = words.iter().map(|w| word_image(ifs, w)).collect();
        for i in 0..words.len() {
            for j in (i + 1..words.len()).rev() {
                if images[i].disjoint(&images[j]) {
                    return Ok((words[i].clone(), words[j].clone()));
                }
            }
        }
    }
    Err(PartitionError::NotFound(max_depth))
}

/// Margins reported by [`build_uni_pair`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniPair {
    pub alpha1: Word,
    pub alpha2: Word,
    /// `(min, max)` margin of `(α₁^l, α₂^l)` for `l = 1..=4`.
    pub margins: Vec<(f64, f64)>,
    pub separation: f64,
    pub delta: f64,
}

/// Margins at or below this are treated as zero.
pub const UNI_FLOOR: f64 = 1e-12;
pub const UNI_POWERS: usize = 4;

/// `α₁ = d·b·c·a`, `α₂ = c·a·d·b` with the separation and UNI checks.
pub fn build_uni_pair(
    ifs: &Ifs,
    uni_words: (&Word, &Word),
    sep_words: (&Word, &Word),
    delta: f64,
) -> Result<UniPair, PartitionError> {
    let (a, b) = uni_words;
    let (c, d) = sep_words;
    if a.len() != b.len() || c.len() != d.len() {
        return Err(PartitionError::InvalidArgument("paired words must have equal length".into()));
    }
    let domain = UniDomain::Neighborhood(delta);
    let base = uni_margin(ifs, a, b, domain, 64)?;
    if base.0 <= UNI_FLOOR {
        return Err(PartitionError::UniFailed { power: 0, margin: base.0 });
    }
    let alpha1 = d.concat(b).concat(c).concat(a);
    let alpha2 = c.concat(a).concat(d).concat(b);
    let (i1, i2) = (word_image(ifs, &alpha1), word_image(ifs, &alpha2));
    if !i1.disjoint(&i2) {
        return Err(PartitionError::SeparationFailed(format!("images of {alpha1} and {alpha2} meet")));
    }
    let mut margins = Vec::with_capacity(UNI_POWERS);
    for l in 1..=UNI_POWERS {
        let m = uni_margin(ifs, &alpha1.power(l), &alpha2.power(l), domain, 64)?;
        if m.0 <= UNI_FLOOR {
            return Err(PartitionError::UniFailed { power: l, margin: m.0 });
        }
        margins.push(m);
    }
    Ok(UniPair { separation: i1.gap(&i2), alpha1, alpha2, margins, delta })
}

/// Best UNI pair of length `len`: the distinct pair with the largest minimum margin.
pub fn find_uni_words(ifs: &Ifs, len: usize, delta: f64) -> Result<(Word, Word), PartitionError> {
    let words = ifs.words(len);
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let (lo, _) = uni_margin(ifs, &words[i], &words[j], UniDomain::Neighborhood(delta), 32)?;
            if best.is_none_or(|(b, _, _)| lo > b) {
                best = Some((lo, i, j));
            }
        }
    }
    match best {
        Some((lo, i, j)) if lo > UNI_FLOOR => Ok((words[i].clone(), words[j].clone())),
        Some((lo, _, _)) => Err(PartitionError::UniFailed { power: 0, margin: lo }),
        None => Err(PartitionError::UniFailed { power: 0, margin: 0.0 }),
    }
}

/// Left-anchored stabbing number plus one: images `[l, l + D]` with `D` the
/// largest image diameter. Two enumerated images whose indices differ by at
/// least the returned value are disjoint.
pub fn stabbing_t(images: &[Interval]) -> usize {
    let d = images.iter().map(|iv| iv.len()).fold(0.0, f64::max);
    let mut best = 0usize;
    let mut start = 0usize;
    for (i, iv) in images.iter().enumerate() {
        while images[start].lo + d < iv.lo {
            start += 1;
        }
        best = best.max(i - start + 1);
    }
    best + 1
}

/// Enumerates `A^N ∖ {α₁, α₂}` by left endpoint, computes `T_N`, and forms
/// the pair groups with leftovers absorbed into triples.
pub fn build_partition(ifs: &Ifs, n: usize, alpha: (&Word, &Word)) -> Result<PartitionResult, PartitionError> {
    let (a1, a2) = alpha;
    if a1.len() != n || a2.len() != n {
        return Err(PartitionError::InvalidArgument(format!("alpha words must have length {n}")));
    }
    if a1 == a2 {
        return Err(PartitionError::InvalidArgument("alpha words must differ".into()));
    }
    if (ifs.word_prob(a1) - ifs.word_prob(a2)).abs() > 1e-15 {
        return Err(PartitionError::InvalidArgument("alpha words must have equal probability".into()));
    }
    let total = ifs.alphabet_size().checked_pow(n as u32).filter(|&t| t <= 1 << 24);
    let Some(total) = total else {
        return Err(PartitionError::InvalidArgument(format!("#A^{n} is too large to enumerate")));
    };
    if total < 6 {
        return Err(PartitionError::TooFewWords { n, t_n: 0 });
    }
    let mut rest: Vec<(Interval, Word)> =
        ifs.words(n).into_iter().filter(|w| w != a1 && w != a2).map(|w| (word_image(ifs, &w), w)).collect();
    rest.sort_by(|x, y| x.0.lo.total_cmp(&y.0.lo).then_with(|| x.1.cmp(&y.1)));
    let images: Vec<Interval> = rest.iter().map(|r| r.0).collect();
    let t = stabbing_t(&images);
    let k_words = rest.len();
    let q = k_words / (2 * t);
    if q == 0 {
        return Err(PartitionError::TooFewWords { n, t_n: t });
    }
    // 1-based enumeration a_1..a_K as in the construction.
    let word_at = |i: usize| rest[i - 1].1.clone();
    let mut groups: Vec<Vec<Word>> = Vec::with_capacity(q * t + 1);
    for j in 0..q {
        for k in 1..=t {
            groups.push(vec![word_at(k + 2 * j * t), word_at(k + 2 * j * t + t)]);
        }
    }
    for i in (2 * t * q + 1)..=k_words {
        let l = i - 2 * t * q - 1;
        let (j, k) = (l / t, l % t + 1);
        let last_member = k + 2 * j * t + t;
        if j >= q || i < last_member + t {
            return Err(PartitionError::TooFewWords { n, t_n: t });
        }
        groups[j * t + (k - 1)].push(word_at(i));
    }
    for g in &groups {
        let imgs: Vec<Interval> = g.iter().map(|w| word_image(ifs, w)).collect();
        for x in 0..imgs.len() {
            for y in x + 1..imgs.len() {
                if !imgs[x].disjoint(&imgs[y]) {
                    return Err(PartitionError::SeparationFailed(format!("group {{{}}}", join_words(g))));
                }
            }
        }
    }
    if !word_image(ifs, a1).disjoint(&word_image(ifs, a2)) {
        return Err(PartitionError::SeparationFailed(format!("alpha pair {a1}, {a2}")));
    }
    let star = groups.len();
    groups.push(vec![a1.clone(), a2.clone()]);
    let mut result = PartitionResult {
        block_length: n,
        alpha: (a1.clone(), a2.clone()),
        groups,
        star,
        group_weights: Vec::new(),
        conditional_probs: Vec::new(),
        t_n: t,
    };
    result.reweigh(ifs);
    Ok(result)
}

pub(crate) fn join_words(g: &[Word]) -> String {
    g.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
}

/// Searches `(M, L)` with `N = 2(M + L)` increasing and returns the first
/// partition that builds, starting from the shortest separated pair.
pub fn auto_partition(ifs: &Ifs, max_n: usize, delta: f64) -> Result<(PartitionResult, UniPair), PartitionError> {
    let (c0, d0) = find_disjoint_pair(ifs, 6)?;
    let mut last_err = PartitionError::NotFound(max_n);
    let mut n = 2 * (1 + c0.len());
    while n <= max_n {
        for m in 1..=(n / 2 - c0.len()) {
            let l = n / 2 - m;
            // Extending a separated pair on the right keeps it separated.
            let c = c0.concat(&Word::new(vec![0; l - c0.len()]));
            let d = d0.concat(&Word::new(vec![0; l - d0.len()]));
            let (a, b) = match find_uni_words(ifs, m, delta) {
                Ok(p) => p,
                Err(e) => {
                    last_err = e;
                    continue;
                }
            };
            let pair = match build_uni_pair(ifs, (&a, &b), (&c, &d), delta) {
                Ok(p) => p,
                Err(e) => {
                    last_err = e;
                    continue;
                }
            };
            match build_partition(ifs, n, (&pair.alpha1, &pair.alpha2)) {
                Ok(p) => return Ok((p, pair)),
                Err(e) => last_err = e,
            }
        }
        n += 2;
    }
    Err(last_err)
}
