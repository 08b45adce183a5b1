use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ContractionMap, IfsError, Word};

/// Sum-to-one tolerance for probability vectors.
pub const PROB_TOL: f64 = 1e-12;

/// A finite conformal IFS on `[0, 1]` with a Bernoulli probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIfs", into = "RawIfs")]
pub struct Ifs {
    maps: Vec<ContractionMap>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIfs {
    maps: Vec<ContractionMap>,
    probs: Vec<f64>,
}

impl TryFrom<RawIfs> for Ifs {
    type Error = IfsError;
    fn try_from(raw: RawIfs) -> Result<Self, IfsError> {
        Ifs::new(raw.maps, raw.probs)
    }
}

impl From<Ifs> for RawIfs {
    fn from(ifs: Ifs) -> Self {
        RawIfs { maps: ifs.maps, probs: ifs.probs }
    }
}

/// Names accepted by [`Ifs::builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["figure1", "dyadic", "gauss23", "cantor3"];

impl Ifs {
    pub fn new(maps: Vec<ContractionMap>, probs: Vec<f64>) -> Result<Self, IfsError> {
        if maps.len() < 2 {
            return Err(IfsError::InvalidIfs("need at least two maps".into()));
        }
        if probs.len() != maps.len() {
            return Err(IfsError::InvalidIfs("probs and maps differ in length".into()));
        }
        if probs.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(IfsError::InvalidIfs("probabilities must be positive".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(IfsError::InvalidIfs(format!("probabilities sum to {total}, not 1")));
        }
        for m in &maps {
            m.validate()?;
        }
        let fixed: Vec<f64> = maps.iter().map(|m| m.fixed_point()).collect();
        let spread = fixed.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - fixed.iter().cloned().fold(f64::INFINITY, f64::min);
        if spread < 1e-9 {
            return Err(IfsError::InvalidIfs("all maps share a fixed point; attractor is a singleton".into()));
        }
        Ok(Self { maps, probs })
    }

    pub fn builtin(name: &str) -> Result<Self, IfsError> {
        let half = vec![0.5, 0.5];
        let maps = match name {
            "figure1" => vec![ContractionMap::moebius(1.0, 0.0, 1.0, 1.0), ContractionMap::moebius(1.0, 0.5, 1.0, 1.5)],
            "dyadic" => vec![ContractionMap::affine(0.5, 0.0), ContractionMap::affine(0.5, 0.5)],
            "gauss23" => vec![ContractionMap::moebius(0.0, 1.0, 1.0, 2.0), ContractionMap::moebius(0.0, 1.0, 1.0, 3.0)],
            "cantor3" => vec![ContractionMap::affine(1.0 / 3.0, 0.0), ContractionMap::affine(1.0 / 3.0, 2.0 / 3.0)],
            other => return Err(IfsError::UnknownBuiltin(other.to_string())),
        };
        Self::new(maps, half)
    }

    /// Reads JSON, or TOML when the extension is `.toml`.
    pub fn from_file(path: &Path) -> Result<Self, IfsError> {
        let text = std::fs::read_to_string(path).map_err(|e| IfsError::Io(e.to_string()))?;
        if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| IfsError::Parse(e.to_string()))
        } else {
            serde_json::from_str(&text).map_err(|e| IfsError::Parse(e.to_string()))
        }
    }

    /// Builtin name or path to a JSON/TOML file.
    pub fn resolve(spec: &str) -> Result<Self, IfsError> {
        if BUILTIN_NAMES.contains(&spec) {
            Self::builtin(spec)
        } else {
            Self::from_file(Path::new(spec))
        }
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.maps.len()
    }

    pub fn map(&self, letter: usize) -> &ContractionMap {
        &self.maps[letter]
    }

    /// `φ_{a1} ∘ … ∘ φ_{an}`; the empty word gives the identity.
    pub fn compose_word(&self, word: &Word) -> Result<ContractionMap, IfsError> {
        let mut maps = Vec::with_capacity(word.len());
        for &a in word.letters() {
            if a >= self.maps.len() {
                return Err(IfsError::InvalidWord(a));
            }
            maps.push(self.maps[a].clone());
        }
        Ok(ContractionMap::Composed { maps })
    }

    /// `p_{a1} ⋯ p_{an}`.
    pub fn word_prob(&self, word: &Word) -> f64 {
        word.letters().iter().map(|&a| self.probs[a]).product()
    }

    /// All words of length `n` in lexicographic order.
    pub fn words(&self, n: usize) -> Vec<Word> {
        Word::all(self.maps.len(), n)
    }

    /// Entropy `-Σ p log p` of the Bernoulli measure.
    pub fn entropy(&self) -> f64 {
        -self.probs.iter().map(|p| p * p.ln()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        for name in BUILTIN_NAMES {
            Ifs::builtin(name).unwrap();
        }
        assert!(matches!(Ifs::builtin("nope"), Err(IfsError::UnknownBuiltin(_))));
    }

    #[test]
    fn json_round_trip() {
        let ifs = Ifs::builtin("figure1").unwrap();
        let text = serde_json::to_string(&ifs).unwrap();
        assert!(text.contains("\"kind\":\"moebius\""));
        let back: Ifs = serde_json::from_str(&text).unwrap();
        assert_eq!(ifs, back);
    }

    #[test]
    fn rejects_bad_probs_and_singletons() {
        let maps = vec![ContractionMap::affine(0.5, 0.0), ContractionMap::affine(0.5, 0.5)];
        assert!(Ifs::new(maps.clone(), vec![0.5, 0.6]).is_err());
        let same = vec![ContractionMap::affine(0.5, 0.0), ContractionMap::affine(0.25, 0.0)];
        assert!(Ifs::new(same, vec![0.5, 0.5]).is_err());
        let text = r#"{"maps":[{"kind":"affine","slope":0.5,"offset":0}],"probs":[1.0]}"#;
        assert!(serde_json::from_str::<Ifs>(text).is_err());
    }

    #[test]
    fn empty_word_is_identity() {
        let ifs = Ifs::builtin("gauss23").unwrap();
        let id = ifs.compose_word(&Word::empty()).unwrap();
        let j = id.jet(0.3).unwrap();
        assert_eq!((j.value, j.d1, j.d2), (0.3, 1.0, 0.0));
    }

    #[test]
    fn word_order_is_outer_first() {
        let ifs = Ifs::builtin("dyadic").unwrap();
        // φ_1(φ_0(x)) = (x/2)/2 + 1/2
        let m = ifs.compose_word(&Word::new(vec![1, 0])).unwrap();
        assert!((m.value(1.0) - 0.75).abs() < 1e-15);
    }
}
