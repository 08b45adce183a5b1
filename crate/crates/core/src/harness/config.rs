use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::ifs::{ContractionMap, Ifs, BUILTIN_NAMES, PROB_TOL};

/// Named experiments. The first block is parameterised by the configured IFS;
/// the rest are fixed suites that reproduce one acceptance check each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    UniCheck,
    Partition,
    SpectralGap,
    Measure,
    Fourier,
    Nonconc,
    Fup,
    Stochasticity,
    Disintegration,
    UniDichotomy,
    PartitionValidity,
    SpectralContrast,
    Dolgopyat,
    FourierContrast,
    Nonconcentration,
    FupNumerics,
    Formulas,
}

impl Experiment {
    pub const ALL: [Experiment; 17] = [
        Self::UniCheck,
        Self::Partition,
        Self::SpectralGap,
        Self::Measure,
        Self::Fourier,
        Self::Nonconc,
        Self::Fup,
        Self::Stochasticity,
        Self::Disintegration,
        Self::UniDichotomy,
        Self::PartitionValidity,
        Self::SpectralContrast,
        Self::Dolgopyat,
        Self::FourierContrast,
        Self::Nonconcentration,
        Self::FupNumerics,
        Self::Formulas,
    ];

    /// The fixed suites, in acceptance order.
    pub const SUITES: [Experiment; 10] = [
        Self::Stochasticity,
        Self::Disintegration,
        Self::UniDichotomy,
        Self::PartitionValidity,
        Self::SpectralContrast,
        Self::Dolgopyat,
        Self::FourierContrast,
        Self::Nonconcentration,
        Self::FupNumerics,
        Self::Formulas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::UniCheck => "uni-check",
            Self::Partition => "partition",
            Self::SpectralGap => "spectral-gap",
            Self::Measure => "measure",
            Self::Fourier => "fourier",
            Self::Nonconc => "nonconc",
            Self::Fup => "fup",
            Self::Stochasticity => "stochasticity",
            Self::Disintegration => "disintegration",
            Self::UniDichotomy => "uni-dichotomy",
            Self::PartitionValidity => "partition-validity",
            Self::SpectralContrast => "spectral-contrast",
            Self::Dolgopyat => "dolgopyat",
            Self::FourierContrast => "fourier-contrast",
            Self::Nonconcentration => "nonconcentration",
            Self::FupNumerics => "fup-numerics",
            Self::Formulas => "formulas",
        }
    }

    /// Experiments that draw random numbers and therefore need a seed.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Self::Measure | Self::Nonconc | Self::Fup | Self::Dolgopyat | Self::Nonconcentration | Self::FupNumerics
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::validation("experiment", format!("unknown experiment {s:?}")))
    }
}

/// A builtin name or an inline system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IfsRef {
    Builtin(String),
    Inline(Ifs),
}

impl IfsRef {
    pub fn resolve(&self) -> Result<Ifs, HarnessError> {
        match self {
            Self::Builtin(name) => Ifs::builtin(name).map_err(|e| HarnessError::validation("ifs", e.to_string())),
            Self::Inline(ifs) => Ok(ifs.clone()),
        }
    }
}

/// A validated experiment description with every knob filled in.
///
/// Knobs that an experiment does not read are carried along unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub ifs: IfsRef,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    /// Transfer-operator grid nodes.
    pub grid: usize,
    pub n_max: usize,
    pub b_values: Vec<f64>,
    pub r: f64,
    pub rho_bound: f64,
    /// Largest partition block length tried.
    pub max_n: usize,
    pub uni_delta: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    pub windows: usize,
    pub alpha_bound: f64,
    pub word_length: usize,
    pub eps: f64,
    pub blocks: usize,
    pub sigmas: usize,
    pub pass_fraction: f64,
    /// Random test functions, Monte-Carlo orbits or kernel pairs, by experiment.
    pub samples: usize,
    pub h_ladder: Vec<f64>,
    pub grid_per_h: usize,
    /// Measure refinement tolerance; `None` picks one from the frequencies in play.
    pub measure_tol: Option<f64>,
}

/// Top-level keys accepted by [`parse_config`].
pub const CONFIG_KEYS: [&str; 24] = [
    "experiment",
    "ifs",
    "seed",
    "output",
    "grid",
    "n_max",
    "b_values",
    "r",
    "rho_bound",
    "max_n",
    "uni_delta",
    "xi_min",
    "xi_max",
    "windows",
    "alpha_bound",
    "word_length",
    "eps",
    "blocks",
    "sigmas",
    "pass_fraction",
    "samples",
    "h_ladder",
    "grid_per_h",
    "measure_tol",
];

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        use Experiment::*;
        let ifs = match experiment {
            Disintegration => "figure1",
            FupNumerics | Fup => "cantor3",
            _ => "gauss23",
        };
        Self {
            experiment,
            ifs: IfsRef::Builtin(ifs.into()),
            seed: None,
            output: None,
            grid: match experiment {
                Dolgopyat | Disintegration => 257,
                Stochasticity => 33,
                _ => 4096,
            },
            n_max: match experiment {
                Stochasticity => 20,
                Disintegration => 3,
                _ => 30,
            },
            b_values: match experiment {
                Dolgopyat => vec![100.0],
                Disintegration => vec![50.0],
                _ => vec![50.0, 100.0, 200.0],
            },
            r: if experiment == Disintegration { 0.01 } else { 0.0 },
            rho_bound: 0.995,
            max_n: 12,
            uni_delta: 1e-3,
            xi_min: 10.0,
            xi_max: 1e4,
            windows: 10,
            alpha_bound: 0.05,
            word_length: 12,
            eps: 0.25,
            blocks: 20,
            sigmas: 8,
            pass_fraction: 0.95,
            samples: match experiment {
                Measure => 256,
                _ => 100,
            },
            h_ladder: (3..=6).map(|k| 3f64.powi(-k)).collect(),
            grid_per_h: 8,
            measure_tol: None,
        }
    }

    /// Range checks on every knob; the error names the offending key.
    pub fn validate(&self) -> Result<(), HarnessError> {
        fn check(ok: bool, key: &str, what: &str) -> Result<(), HarnessError> {
            if ok {
                Ok(())
            } else {
                Err(HarnessError::validation(key, what.to_string()))
            }
        }
        let finite = |v: f64| v.is_finite();
        self.ifs.resolve()?;
        if self.experiment.is_stochastic() && self.seed.is_none() {
            return Err(HarnessError::validation("seed", format!("required by {}", self.experiment)));
        }
        check((9..=65_537).contains(&self.grid), "grid", "must lie in [9, 65537]")?;
        check(
            (5..=500).contains(&self.n_max) || self.experiment == Experiment::Disintegration,
            "n_max",
            "must lie in [5, 500]",
        )?;
        check(
            self.experiment != Experiment::Disintegration || (1..=3).contains(&self.n_max),
            "n_max",
            "disintegration supports 1 to 3 blocks",
        )?;
        check(
            !self.b_values.is_empty() && self.b_values.iter().all(|&b| finite(b)),
            "b_values",
            "must be a non-empty list of finite numbers",
        )?;
        check(self.r.abs() <= 1.0, "r", "must lie in [-1, 1]")?;
        check(self.rho_bound > 0.0 && self.rho_bound <= 2.0, "rho_bound", "must lie in (0, 2]")?;
        check((1..=20).contains(&self.max_n), "max_n", "must lie in [1, 20]")?;
        check(self.uni_delta > 0.0 && self.uni_delta <= 0.5, "uni_delta", "must lie in (0, 0.5]")?;
        check(self.xi_min > 0.0 && finite(self.xi_min), "xi_min", "must be positive")?;
        check(self.xi_max > self.xi_min && self.xi_max <= 1e6, "xi_max", "must lie in (xi_min, 1e6]")?;
        check((2..=1000).contains(&self.windows), "windows", "must lie in [2, 1000]")?;
        check(finite(self.alpha_bound), "alpha_bound", "must be finite")?;
        check((1..=22).contains(&self.word_length), "word_length", "must lie in [1, 22]")?;
        check(self.eps > 0.0 && self.eps <= 1.0, "eps", "must lie in (0, 1]")?;
        check((1..=10_000).contains(&self.blocks), "blocks", "must lie in [1, 10000]")?;
        check((2..=1000).contains(&self.sigmas), "sigmas", "must lie in [2, 1000]")?;
        check(self.pass_fraction > 0.0 && self.pass_fraction <= 1.0, "pass_fraction", "must lie in (0, 1]")?;
        check((1..=1_000_000).contains(&self.samples), "samples", "must lie in [1, 1000000]")?;
        check(
            self.h_ladder.len() >= 3 && self.h_ladder.iter().all(|&h| h > 0.0 && h < 1.0),
            "h_ladder",
            "needs three or more scales in (0, 1)",
        )?;
        check((1..=64).contains(&self.grid_per_h), "grid_per_h", "must lie in [1, 64]")?;
        check(self.measure_tol.is_none_or(|t| t > 0.0 && t <= 0.1), "measure_tol", "must lie in (0, 0.1]")?;
        Ok(())
    }
}

fn take<T: DeserializeOwned>(key: &str, value: toml::Value) -> Result<T, HarnessError> {
    value.try_into().map_err(|e: toml::de::Error| HarnessError::validation(key, e.message().to_string()))
}

fn parse_ifs(value: toml::Value) -> Result<IfsRef, HarnessError> {
    match value {
        toml::Value::String(name) => {
            if BUILTIN_NAMES.contains(&name.as_str()) {
                Ok(IfsRef::Builtin(name))
            } else {
                Err(HarnessError::validation("ifs", format!("unknown builtin {name:?}")))
            }
        }
        toml::Value::Table(mut t) => {
            if let Some(k) = t.keys().find(|k| !matches!(k.as_str(), "maps" | "probs")) {
                return Err(HarnessError::validation(k, "unknown key in inline ifs".into()));
            }
            let maps: Vec<ContractionMap> =
                take("maps", t.remove("maps").ok_or_else(|| HarnessError::validation("maps", "required".into()))?)?;
            let probs: Vec<f64> =
                take("probs", t.remove("probs").ok_or_else(|| HarnessError::validation("probs", "required".into()))?)?;
            let total: f64 = probs.iter().sum();
            if probs.len() != maps.len() || (total - 1.0).abs() > PROB_TOL || probs.iter().any(|&p| !(p > 0.0)) {
                return Err(HarnessError::validation(
                    "probs",
                    format!("must be positive, one per map, summing to 1 (sum {total})"),
                ));
            }
            Ifs::new(maps, probs).map(IfsRef::Inline).map_err(|e| HarnessError::validation("maps", e.to_string()))
        }
        _ => Err(HarnessError::validation("ifs", "expected a builtin name or a table".into())),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

/// Parses a TOML experiment document; unknown keys are rejected by name.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map(|s| line_column(text, s.start)).unwrap_or((0, 0));
        HarnessError::Parse { line, column, message: e.message().to_string() }
    })?;
    if let Some(k) = table.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(HarnessError::validation(k, "unknown key".into()));
    }
    let experiment: String = take(
        "experiment",
        table.remove("experiment").ok_or_else(|| HarnessError::validation("experiment", "required".into()))?,
    )?;
    let mut cfg = ExperimentConfig::defaults(experiment.parse()?);
    for (key, value) in table {
        let k = key.as_str();
        match k {
            "ifs" => cfg.ifs = parse_ifs(value)?,
            "seed" => cfg.seed = Some(take(k, value)?),
            "output" => cfg.output = Some(take(k, value)?),
            "grid" => cfg.grid = take(k, value)?,
            "n_max" => cfg.n_max = take(k, value)?,
            "b_values" => cfg.b_values = take(k, value)?,
            "r" => cfg.r = take(k, value)?,
            "rho_bound" => cfg.rho_bound = take(k, value)?,
            "max_n" => cfg.max_n = take(k, value)?,
            "uni_delta" => cfg.uni_delta = take(k, value)?,
            "xi_min" => cfg.xi_min = take(k, value)?,
            "xi_max" => cfg.xi_max = take(k, value)?,
            "windows" => cfg.windows = take(k, value)?,
            "alpha_bound" => cfg.alpha_bound = take(k, value)?,
            "word_length" => cfg.word_length = take(k, value)?,
            "eps" => cfg.eps = take(k, value)?,
            "blocks" => cfg.blocks = take(k, value)?,
            "sigmas" => cfg.sigmas = take(k, value)?,
            "pass_fraction" => cfg.pass_fraction = take(k, value)?,
            "samples" => cfg.samples = take(k, value)?,
            "h_ladder" => cfg.h_ladder = take(k, value)?,
            "grid_per_h" => cfg.grid_per_h = take(k, value)?,
            "measure_tol" => cfg.measure_tol = Some(take(k, value)?),
            _ => unreachable!("checked against CONFIG_KEYS"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(e: HarnessError) -> String {
        match e {
            HarnessError::Validation { key, .. } => key,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config("experiment = \"spectral-gap\"").unwrap();
        assert_eq!(cfg.grid, 4096);
        assert_eq!(cfg.ifs, IfsRef::Builtin("gauss23".into()));
        assert_eq!(cfg.b_values, vec![50.0, 100.0, 200.0]);
    }

    #[test]
    fn unknown_key_is_named() {
        assert_eq!(key_of(parse_config("experiment = \"spectral-gap\"\ngrdi = 10").unwrap_err()), "grdi");
    }

    #[test]
    fn unnormalised_inline_probs() {
        let doc = r#"
experiment = "spectral-gap"
[ifs]
probs = [0.5, 0.6]
maps = [{ kind = "moebius", a = 0.0, b = 1.0, c = 1.0, d = 2.0 }, { kind = "moebius", a = 0.0, b = 1.0, c = 1.0, d = 3.0 }]
"#;
        assert_eq!(key_of(parse_config(doc).unwrap_err()), "probs");
        let ok = parse_config(&doc.replace("0.6", "0.5")).unwrap();
        assert_eq!(IfsRef::Inline(Ifs::builtin("gauss23").unwrap()), ok.ifs);
    }

    #[test]
    fn stochastic_experiments_need_a_seed() {
        assert_eq!(key_of(parse_config("experiment = \"dolgopyat\"").unwrap_err()), "seed");
        assert!(parse_config("experiment = \"dolgopyat\"\nseed = 3").is_ok());
    }

    #[test]
    fn range_and_type_errors_name_the_key() {
        assert_eq!(key_of(parse_config("experiment = \"spectral-gap\"\ngrid = 3").unwrap_err()), "grid");
        assert_eq!(key_of(parse_config("experiment = \"spectral-gap\"\ngrid = \"big\"").unwrap_err()), "grid");
        assert_eq!(key_of(parse_config("experiment = \"warp\"").unwrap_err()), "experiment");
        assert_eq!(key_of(parse_config("grid = 10").unwrap_err()), "experiment");
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        match parse_config("experiment = \"fup\"\nseed = = 1") {
            Err(HarnessError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn echo_parses_back() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fup);
        cfg.seed = Some(9);
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
