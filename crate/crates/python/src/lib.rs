//! Python bindings: IFS construction, self-conformal measures, spectral gap
//! sweeps, Fourier decay fits, FUP norms and the experiment harness.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use conformal_gap::fourier::{decay_fit, fourier_transform};
use conformal_gap::fup::{fup_norm as core_fup_norm, thicken, SetSpec};
use conformal_gap::harness::{parse_config, render_json, run_experiment, Experiment, ExperimentConfig};
use conformal_gap::ifs::{self, Word};
use conformal_gap::interval::Interval;
use conformal_gap::measures::{self, DiscreteMeasure};
use conformal_gap::partition::auto_partition;
use conformal_gap::transfer::spectral_gap_sweep;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A conformal iterated function system on [0, 1] with Bernoulli weights.
#[pyclass(name = "Ifs", frozen)]
struct PyIfs {
    inner: ifs::Ifs,
}

#[pymethods]
impl PyIfs {
    /// One of "figure1", "dyadic", "gauss23", "cantor3".
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        ifs::Ifs::builtin(name).map(|inner| Self { inner }).map_err(value_err)
    }

    /// Parse the JSON form: {"maps": [{"kind": "moebius", ...}], "probs": [...]}.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(runtime_err)
    }

    #[getter]
    fn alphabet_size(&self) -> usize {
        self.inner.alphabet_size()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    fn entropy(&self) -> f64 {
        self.inner.entropy()
    }

    /// Value and derivative of the composition `φ_{w1} ∘ … ∘ φ_{wn}` at `x`.
    fn word_jet(&self, word: Vec<usize>, x: f64) -> PyResult<(f64, f64)> {
        let map = self.inner.compose_word(&Word::new(word)).map_err(value_err)?;
        let jet = map.jet(x).map_err(value_err)?;
        Ok((jet.value, jet.d1))
    }

    /// Size of the automatically built partition and its distinguished group.
    #[pyo3(signature = (max_n=12, uni_delta=1e-3))]
    fn partition_size(&self, max_n: usize, uni_delta: f64) -> PyResult<(usize, usize)> {
        let (p, _) = auto_partition(&self.inner, max_n, uni_delta).map_err(runtime_err)?;
        Ok((p.block_length, p.omega_size()))
    }

    /// The self-conformal measure, refined until every cylinder is shorter than `tol`.
    fn measure(&self, tol: f64) -> PyResult<Measure> {
        measures::measure_refine(&self.inner, tol).map(|inner| Measure { inner }).map_err(runtime_err)
    }

    fn __repr__(&self) -> String {
        format!("Ifs(maps={}, probs={:?})", self.inner.alphabet_size(), self.inner.probs())
    }
}

/// A finite atomic probability measure on [0, 1].
#[pyclass(frozen)]
struct Measure {
    inner: DiscreteMeasure,
}

#[pymethods]
impl Measure {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn positions(&self) -> Vec<f64> {
        self.inner.positions().to_vec()
    }

    #[getter]
    fn masses(&self) -> Vec<f64> {
        self.inner.masses().to_vec()
    }

    #[getter]
    fn resolution(&self) -> f64 {
        self.inner.resolution()
    }

    /// `∫ e^{-2πiξx} dμ(x)`.
    fn fourier(&self, xi: f64) -> PyResult<Complex64> {
        fourier_transform(&self.inner, xi).map_err(value_err)
    }

    /// Fitted decay exponent of `sup|μ̂|` over geometric windows in `[xi_min, xi_max]`.
    #[pyo3(signature = (xi_min, xi_max, windows=10))]
    fn decay_fit<'py>(
        &self,
        py: Python<'py>,
        xi_min: f64,
        xi_max: f64,
        windows: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let fit = decay_fit(&self.inner, xi_min, xi_max, windows).map_err(value_err)?;
        let out = PyDict::new(py);
        out.set_item("xi", fit.xi_ladder)?;
        out.set_item("sup_modulus", fit.sup_moduli)?;
        out.set_item("alpha", fit.alpha_fit)?;
        out.set_item("residual", fit.fit_residual)?;
        Ok(out)
    }
}

/// Decay of `‖L_{r+ib}^n 1‖_b` for each `b`, with the fitted contraction rate.
#[pyfunction]
#[pyo3(signature = (ifs, b_values, r=0.0, n_max=30, grid=4096))]
fn spectral_gap<'py>(
    py: Python<'py>,
    ifs: &PyIfs,
    b_values: Vec<f64>,
    r: f64,
    n_max: usize,
    grid: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = py.detach(|| spectral_gap_sweep(&ifs.inner, &b_values, r, n_max, grid)).map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("b", report.b_values)?;
    out.set_item("norms", report.norms_by_n)?;
    out.set_item("rho", report.fitted_rho)?;
    out.set_item("grid", report.grid_size)?;
    Ok(out)
}

fn intervals(pairs: Vec<(f64, f64)>) -> PyResult<SetSpec> {
    if pairs.iter().any(|&(lo, hi)| lo.is_nan() || hi.is_nan() || lo > hi) {
        return Err(PyValueError::new_err("each interval needs lo <= hi"));
    }
    Ok(SetSpec::Intervals(pairs.into_iter().map(|(lo, hi)| Interval::new(lo, hi)).collect()))
}

/// `‖1_X F_h^* 1_Y‖` for the `h`-neighbourhoods of two unions of intervals.
#[pyfunction]
#[pyo3(signature = (x, y, h, grid_per_h=8))]
fn fup_norm(py: Python<'_>, x: Vec<(f64, f64)>, y: Vec<(f64, f64)>, h: f64, grid_per_h: usize) -> PyResult<f64> {
    let (x, y) = (intervals(x)?, intervals(y)?);
    py.detach(|| {
        let xs = thicken(&x, h)?;
        let ys = thicken(&y, h)?;
        core_fup_norm(&xs, &ys, h, grid_per_h)
    })
    .map(|r| r.norm)
    .map_err(runtime_err)
}

/// Run one experiment and return its JSON report.
///
/// `config` is TOML text in the harness format; when omitted the experiment's
/// defaults are used with the given seed.
#[pyfunction]
#[pyo3(signature = (name, seed=0, config=None))]
fn run_suite(py: Python<'_>, name: &str, seed: u64, config: Option<&str>) -> PyResult<String> {
    let cfg = match config {
        Some(text) => parse_config(text).map_err(value_err)?,
        None => {
            let experiment: Experiment = name.parse().map_err(value_err)?;
            ExperimentConfig { seed: Some(seed), ..ExperimentConfig::defaults(experiment) }
        }
    };
    let bundle = py.detach(|| run_experiment(&cfg)).map_err(runtime_err)?;
    render_json(&bundle).map_err(runtime_err)
}

#[pymodule]
fn conformal_gap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIfs>()?;
    m.add_class::<Measure>()?;
    m.add_function(wrap_pyfunction!(spectral_gap, m)?)?;
    m.add_function(wrap_pyfunction!(fup_norm, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("BUILTINS", ifs::BUILTIN_NAMES.to_vec())?;
    Ok(())
}
