//! Conformal iterated function systems on `[0, 1]`: maps, words, builtins and
//! the contraction, distortion and UNI constants.

mod constants;
mod map;
mod system;
mod word;

pub use constants::{
    attractor_cover, attractor_neighborhood, contraction_bounds, uni_gap, uni_margin, ConstantsReport, CoverWord,
    UniDomain, DEFAULT_COVER_BUDGET,
};
pub use map::{ContractionMap, Jet, DOMAIN_SLACK};
pub use system::{Ifs, BUILTIN_NAMES, PROB_TOL};
pub use word::Word;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IfsError {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    #[error("unknown builtin IFS `{0}`")]
    UnknownBuiltin(String),
    #[error("letter {0} is outside the alphabet")]
    InvalidWord(usize),
    #[error("point {0} lies outside [0, 1]")]
    DomainError(f64),
    #[error("estimated contraction rate {0} does not exceed 1")]
    NotContracting(f64),
    #[error("cover exceeded its budget of {0} nodes")]
    CoverBudgetExceeded(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}
