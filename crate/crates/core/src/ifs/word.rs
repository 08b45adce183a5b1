use std::fmt;

use serde::{Deserialize, Serialize};

/// A finite word over the alphabet `{0, …, k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// `self` repeated `times` times.
    pub fn power(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// All words of length `n` over `k` letters, lexicographically ordered.
    pub fn all(k: usize, n: usize) -> Vec<Word> {
        let total = k.checked_pow(n as u32).expect("word count overflow");
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0; n];
                for slot in v.iter_mut().rev() {
                    *slot = idx % k;
                    idx /= k;
                }
                Word(v)
            })
            .collect()
    }

    /// Interleaves block words as `a0 b1 a1 b2 … bk ak`.
    ///
    /// Requires `b.len() + 1 == a.len()`.
    pub fn interleave(a: &[Word], b: &[Word]) -> Word {
        assert_eq!(a.len(), b.len() + 1, "interleave needs one more a-block than b-blocks");
        let mut v = a[0].0.clone();
        for (bj, aj) in b.iter().zip(&a[1..]) {
            v.extend_from_slice(&bj.0);
            v.extend_from_slice(&aj.0);
        }
        Word(v)
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for a in &self.0 {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_lexicographically() {
        let w = Word::all(2, 2);
        let got: Vec<String> = w.iter().map(|w| w.to_string()).collect();
        assert_eq!(got, ["00", "01", "10", "11"]);
        assert_eq!(Word::all(3, 0), vec![Word::empty()]);
    }

    #[test]
    fn interleave_orders_blocks() {
        let a = [Word::new(vec![0]), Word::new(vec![1]), Word::new(vec![2])];
        let b = [Word::new(vec![7, 7]), Word::new(vec![8])];
        assert_eq!(Word::interleave(&a, &b).letters(), &[0, 7, 7, 1, 8, 2]);
    }
}
