//! Regression against frozen outputs in `tests/golden/`.
//!
//! To regenerate after an intentional numerical change, run
//! `CONFORMAL_GAP_BLESS=1 cargo test --test golden`, review the diff, and commit.

use std::path::PathBuf;

use conformal_gap::harness::{render_csv, run_experiment, Experiment, ExperimentConfig, ResultBundle};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Returns the frozen text, or writes `fresh` and returns it in bootstrap mode.
fn golden(name: &str, fresh: &str) -> String {
    let path = golden_path(name);
    if std::env::var_os("CONFORMAL_GAP_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, fresh).unwrap();
        eprintln!("bootstrap: wrote {}", path.display());
    }
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}; run with CONFORMAL_GAP_BLESS=1", path.display()))
}

fn rows(csv: &str) -> Vec<(String, String, f64)> {
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string(), r[2].parse().unwrap())
        })
        .collect()
}

fn spectral_gap_run() -> ResultBundle {
    let cfg = ExperimentConfig { b_values: vec![100.0], ..ExperimentConfig::defaults(Experiment::SpectralGap) };
    run_experiment(&cfg).unwrap()
}

fn fourier_run() -> ResultBundle {
    let cfg = ExperimentConfig { seed: Some(7), ..ExperimentConfig::defaults(Experiment::Fourier) };
    run_experiment(&cfg).unwrap()
}

#[test]
fn spectral_gap_rate_matches_golden() {
    let csv = render_csv(&spectral_gap_run()).unwrap();
    let frozen = golden("spectral_gap_gauss23_b100.csv", &csv);
    let rho = |text: &str| rows(text).into_iter().find(|r| r.0 == "ifs:fitted_rho").expect("fitted_rho row").2;
    let (now, then) = (rho(&csv), rho(&frozen));
    assert!((now - then).abs() <= 1e-9, "fitted_rho {now} vs golden {then}");
    assert!(now < 0.995);
}

#[test]
fn fourier_csv_matches_fixture() {
    let csv = render_csv(&fourier_run()).unwrap();
    let frozen = golden("fourier_gauss23.csv", &csv);
    assert_eq!(csv.lines().next(), Some("series,xi_window,sup_modulus"));
    assert_eq!(csv.lines().next(), frozen.lines().next());
    let (now, then) = (rows(&csv), rows(&frozen));
    assert_eq!(now.len(), then.len());
    for (a, b) in now.iter().zip(&then) {
        assert_eq!((&a.0, &a.1), (&b.0, &b.1));
        assert!((a.2 - b.2).abs() <= 1e-12 * b.2.abs().max(1.0), "{}: {} vs {}", a.0, a.2, b.2);
    }
    // Ten window rows, then the fit summary and its verdict.
    assert_eq!(now.iter().filter(|r| r.0 == "sup").count(), 10);
    assert!(now.iter().any(|r| r.0 == "alpha_fit" && r.1.is_empty()));
    assert!(now.iter().any(|r| r.0.starts_with("verdict:alpha_fit:")));
}

#[test]
fn fourier_rerun_is_byte_identical() {
    assert_eq!(render_csv(&fourier_run()).unwrap(), render_csv(&fourier_run()).unwrap());
}
