use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError};

/// Non-finite floats travel through JSON as the strings `"NaN"`, `"inf"`, `"-inf"`.
mod lossless_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

mod lossless_opt {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrapped(#[serde(with = "super::lossless_f64")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrapped).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrapped>::deserialize(d)?.map(|w| w.0))
    }
}

/// One row of the long-format table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub series: String,
    #[serde(with = "lossless_opt")]
    pub x: Option<f64>,
    #[serde(with = "lossless_f64")]
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparison {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Self::Lt => value < bound,
            Self::Le => value <= bound,
            Self::Gt => value > bound,
            Self::Ge => value >= bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Gt => ">",
            Self::Ge => ">=",
        }
    }
}

/// `value <op> bound`; `pass` is recomputed from the two numbers on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    #[serde(with = "lossless_f64")]
    pub value: f64,
    pub comparison: Comparison,
    #[serde(with = "lossless_f64")]
    pub bound: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, bound: f64) -> Self {
        Self { name: name.into(), value, comparison, bound, pass: comparison.holds(value, bound) }
    }

    /// Whether `pass` agrees with the recorded numbers.
    pub fn consistent(&self) -> bool {
        self.pass == self.comparison.holds(self.value, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub config: ExperimentConfig,
    pub library_version: String,
    /// Not part of the CSV payload, which must be reproducible byte for byte.
    pub wall_clock_seconds: f64,
    pub x_label: String,
    pub y_label: String,
    pub records: Vec<Record>,
    pub verdicts: Vec<Verdict>,
}

impl ResultBundle {
    pub fn empty(config: ExperimentConfig) -> Self {
        Self {
            config,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: 0.0,
            x_label: "x".into(),
            y_label: "y".into(),
            records: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Values of the records in `series`, in order.
    pub fn series(&self, name: &str) -> Vec<(Option<f64>, f64)> {
        self.records.iter().filter(|r| r.series == name).map(|r| (r.x, r.y)).collect()
    }

    /// The single `y` of a summary row.
    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.records.iter().find(|r| r.series == name).map(|r| r.y)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Long-format CSV: `series,<x_label>,<y_label>` over the records, then one
/// `verdict:<name>:<op>` row per verdict carrying the bound and the value.
pub fn render_csv(bundle: &ResultBundle) -> Result<String, HarnessError> {
    let io = |e: csv::Error| HarnessError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["series", bundle.x_label.as_str(), bundle.y_label.as_str()]).map_err(io)?;
    for r in &bundle.records {
        let x = r.x.map(format_float).unwrap_or_default();
        w.write_record([r.series.as_str(), x.as_str(), format_float(r.y).as_str()]).map_err(io)?;
    }
    for v in &bundle.verdicts {
        let label = format!("verdict:{}:{}", v.name, v.comparison.symbol());
        w.write_record([label.as_str(), format_float(v.bound).as_str(), format_float(v.value).as_str()]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn render_json(bundle: &ResultBundle) -> Result<String, HarnessError> {
    serde_json::to_string_pretty(bundle).map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn render_report(bundle: &ResultBundle, format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Csv => render_csv(bundle),
        ReportFormat::Json => render_json(bundle),
    }
}

/// Writes the report to `path`, creating parent directories.
pub fn emit_report(bundle: &ResultBundle, format: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    let text = render_report(bundle, format)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

pub fn parse_json_report(text: &str) -> Result<ResultBundle, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Io(e.to_string()))
}

/// One `PASS`/`FAIL` line per verdict, for terminals.
pub fn summary(bundle: &ResultBundle) -> String {
    let mut out = String::new();
    for v in &bundle.verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{tag} {}/{}: {} {} {}",
            bundle.config.experiment,
            v.name,
            format_float(v.value),
            v.comparison.symbol(),
            format_float(v.bound)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Experiment, ExperimentConfig};

    fn bundle() -> ResultBundle {
        ResultBundle::empty(ExperimentConfig::defaults(Experiment::Fourier))
    }

    #[test]
    fn empty_bundle_is_header_only() {
        assert_eq!(render_csv(&bundle()).unwrap(), "series,x,y\n");
    }

    #[test]
    fn json_round_trip() {
        let mut b = bundle();
        b.records.push(Record { series: "a".into(), x: Some(0.1 + 0.2), y: f64::NAN });
        b.records.push(Record { series: "b".into(), x: None, y: 1.0 / 3.0 });
        b.verdicts.push(Verdict::new("v", f64::INFINITY, Comparison::Le, 1.0));
        let back = parse_json_report(&render_json(&b).unwrap()).unwrap();
        assert!(back.records[0].y.is_nan());
        assert_eq!(back.records[1..], b.records[1..]);
        assert_eq!(back.verdicts, b.verdicts);
        assert_eq!(back.config, b.config);
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let mut b = bundle();
        b.x_label = "xi_window".into();
        b.y_label = "sup_modulus".into();
        b.records.push(Record { series: "sup".into(), x: Some(10.0), y: 0.1 });
        b.records.push(Record { series: "alpha_fit".into(), x: None, y: 0.25 });
        let text = render_csv(&b).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "series,xi_window,sup_modulus");
        assert_eq!(lines[1], "sup,1.0000000000000000e1,1.0000000000000001e-1");
        assert_eq!(lines[2], "alpha_fit,,2.5000000000000000e-1");
        let parsed: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed, 0.1);
    }

    #[test]
    fn verdicts_follow_their_numbers() {
        let v = Verdict::new("x", 0.5, Comparison::Lt, 0.5);
        assert!(!v.pass && v.consistent());
        assert!(!Verdict::new("x", f64::NAN, Comparison::Ge, 0.0).pass);
    }
}
