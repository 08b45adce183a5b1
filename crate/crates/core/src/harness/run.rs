use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Comparison, ExperimentConfig, HarnessError, Record, ResultBundle, Verdict};
use crate::fourier::{
    auto_tolerance, block_length_rule, cylinder_centre, decay_fit, fourier_transform, nonconcentration_experiment,
    regular_words, zeta_values, SumProductParams, DEFAULT_EPS0, DEFAULT_EPS1, DEFAULT_EPS2, DEFAULT_K,
};
use crate::fup::{fup_exponent, fup_norm, kernel_check, schur_bound, theorem_beta, thicken, SetSpec};
use crate::harness::Experiment;
use crate::ifs::{uni_margin, Ifs, UniDomain, Word, BUILTIN_NAMES};
use crate::measures::{frostman_exponents, lyapunov_entropy, measure_refine, FROSTMAN_NOISE, MASS_TOL};
use crate::partition::{auto_partition, build_partition, verify_partition};
use crate::transfer::{
    apply_transfer, default_config, disintegration_residual, random_cone_function, random_dominated,
    spectral_gap_sweep, ComplexExponent, DolgopyatSetup, GridFunction, DEFAULT_EPS_PRIME, GRID_TOL,
};

use Comparison::{Ge, Gt, Le, Lt};

/// Accumulates the payload of one experiment.
struct Sink {
    x_label: &'static str,
    y_label: &'static str,
    records: Vec<Record>,
    verdicts: Vec<Verdict>,
}

impl Sink {
    fn new() -> Self {
        Self::labelled("x", "y")
    }

    fn labelled(x_label: &'static str, y_label: &'static str) -> Self {
        Self { x_label, y_label, records: Vec::new(), verdicts: Vec::new() }
    }

    fn point(&mut self, series: &str, x: f64, y: f64) {
        self.records.push(Record { series: series.to_string(), x: Some(x), y });
    }

    fn scalar(&mut self, series: &str, y: f64) {
        self.records.push(Record { series: series.to_string(), x: None, y });
    }

    fn verdict(&mut self, name: &str, value: f64, cmp: Comparison, bound: f64) {
        self.verdicts.push(Verdict::new(name, value, cmp, bound));
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.verdict(name, if ok { 1.0 } else { 0.0 }, Ge, 1.0);
    }
}

type Outcome = Result<Sink, String>;

fn ctx<E: std::fmt::Display>(what: &'static str) -> impl Fn(E) -> String {
    move |e| format!("{what}: {e}")
}

fn builtin(name: &str) -> Result<Ifs, String> {
    Ifs::builtin(name).map_err(|e| e.to_string())
}

/// Runs the configured experiment. Identical configs give bit-identical
/// records and verdicts; only `wall_clock_seconds` varies.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let ifs = cfg.ifs.resolve()?;
    let seed = cfg.seed.unwrap_or(0);
    let outcome = match cfg.experiment {
        Experiment::UniCheck => uni_check(&ifs),
        Experiment::Partition => partition(cfg, &ifs),
        Experiment::SpectralGap => spectral_gap(cfg, &ifs),
        Experiment::Measure => measure(cfg, &ifs, seed),
        Experiment::Fourier => fourier(cfg, &ifs),
        Experiment::Nonconc | Experiment::Nonconcentration => nonconc(cfg, &ifs, seed),
        Experiment::Fup => fup(cfg, &ifs, seed),
        Experiment::Stochasticity => stochasticity(cfg),
        Experiment::Disintegration => disintegration(cfg, &ifs),
        Experiment::UniDichotomy => uni_dichotomy(),
        Experiment::PartitionValidity => partition_validity(cfg),
        Experiment::SpectralContrast => spectral_contrast(cfg),
        Experiment::Dolgopyat => dolgopyat(cfg, &ifs, seed),
        Experiment::FourierContrast => fourier_contrast(cfg),
        Experiment::FupNumerics => fup_numerics(cfg, seed),
        Experiment::Formulas => formulas(),
    };
    let sink =
        outcome.map_err(|message| HarnessError::Experiment { experiment: cfg.experiment.to_string(), message })?;
    let mut bundle = ResultBundle::empty(cfg.clone());
    bundle.x_label = sink.x_label.into();
    bundle.y_label = sink.y_label.into();
    bundle.records = sink.records;
    bundle.verdicts = sink.verdicts;
    bundle.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(bundle)
}

/// Runs independent experiments on a pool of `threads` workers (0 = all cores),
/// returning results in input order.
pub fn run_all(configs: &[ExperimentConfig], threads: usize) -> Vec<Result<ResultBundle, HarnessError>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build();
    match pool {
        Ok(pool) => pool.install(|| configs.par_iter().map(run_experiment).collect()),
        Err(e) => configs.iter().map(|_| Err(HarnessError::Io(e.to_string()))).collect(),
    }
}

fn letter_pairs(ifs: &Ifs) -> Vec<(usize, usize)> {
    let k = ifs.alphabet_size();
    (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect()
}

fn uni_check(ifs: &Ifs) -> Outcome {
    let mut out = Sink::labelled("pair", "margin");
    let mut worst = f64::INFINITY;
    for (i, (a, b)) in letter_pairs(ifs).into_iter().enumerate() {
        let (lo, hi) = uni_margin(ifs, &Word::new(vec![a]), &Word::new(vec![b]), UniDomain::Interval, 1024)
            .map_err(ctx("uni_margin"))?;
        out.point("uni_min", i as f64, lo);
        out.point("uni_max", i as f64, hi);
        worst = worst.min(lo);
    }
    out.verdict("uni_margin_positive", worst, Gt, 0.0);
    Ok(out)
}

fn partition_verdicts(out: &mut Sink, tag: &str, ifs: &Ifs, p: &crate::partition::PartitionResult, uni_delta: f64) {
    let r = verify_partition(ifs, p, uni_delta);
    out.scalar(&format!("{tag}:block_length"), p.block_length as f64);
    out.scalar(&format!("{tag}:groups"), p.omega_size() as f64);
    out.scalar(&format!("{tag}:uni_margin"), r.uni_margin);
    out.flag(&format!("{tag}:property1"), r.property1());
    out.flag(&format!("{tag}:property2"), r.property2());
    out.flag(&format!("{tag}:property3"), r.property3());
    out.flag(&format!("{tag}:property4"), r.property4());
    out.verdict(&format!("{tag}:separation_margin"), r.separation_margin, Gt, 0.0);
    out.verdict(&format!("{tag}:star_margin"), r.star_margin, Gt, 0.0);
}

fn partition(cfg: &ExperimentConfig, ifs: &Ifs) -> Outcome {
    let (p, _) = auto_partition(ifs, cfg.max_n, cfg.uni_delta).map_err(ctx("auto_partition"))?;
    let mut out = Sink::new();
    partition_verdicts(&mut out, "partition", ifs, &p, cfg.uni_delta);
    Ok(out)
}

fn sweep_records(out: &mut Sink, tag: &str, r: &crate::transfer::SpectralGapReport) {
    for (i, &b) in r.b_values.iter().enumerate() {
        for (n, &v) in r.norms_by_n[i].iter().enumerate() {
            out.point(&format!("{tag}:norm:b={b}"), (n + 1) as f64, v);
        }
        out.point(&format!("{tag}:fitted_rho"), b, r.fitted_rho[i]);
        out.point(&format!("{tag}:grid_delta"), b, r.grid_delta[i]);
        out.point(&format!("{tag}:grid_size"), b, r.grid_size[i] as f64);
    }
    if let Some(e) = r.fitted_prefactor_exponent {
        out.scalar(&format!("{tag}:prefactor_exponent"), e);
    }
}

fn spectral_gap(cfg: &ExperimentConfig, ifs: &Ifs) -> Outcome {
    let r = spectral_gap_sweep(ifs, &cfg.b_values, cfg.r, cfg.n_max, cfg.grid).map_err(ctx("spectral_gap_sweep"))?;
    let mut out = Sink::labelled("n", "norm");
    sweep_records(&mut out, "ifs", &r);
    for (i, &b) in r.b_values.iter().enumerate() {
        out.verdict(&format!("fitted_rho:b={b}"), r.fitted_rho[i], Lt, cfg.rho_bound);
        out.verdict(&format!("grid_delta:b={b}"), r.grid_delta[i], Lt, GRID_TOL);
    }
    Ok(out)
}

fn measure(cfg: &ExperimentConfig, ifs: &Ifs, seed: u64) -> Outcome {
    let tol = cfg.measure_tol.unwrap_or(1e-5);
    let m = measure_refine(ifs, tol).map_err(ctx("measure_refine"))?;
    let h_min = (4.0 * m.resolution()).max(1e-4);
    let f = frostman_exponents(&m, h_min, 5e-2, 20, 16).map_err(ctx("frostman_exponents"))?;
    let e = lyapunov_entropy(ifs, cfg.samples, 200, seed).map_err(ctx("lyapunov_entropy"))?;
    let mut out = Sink::new();
    out.scalar("atoms", m.len() as f64);
    out.scalar("resolution", m.resolution());
    out.scalar("delta_minus", f.delta_minus);
    out.scalar("delta_plus", f.delta_plus);
    out.scalar("c_minus", f.c_minus);
    out.scalar("c_plus", f.c_plus);
    out.scalar("lyapunov", e.lyapunov);
    out.scalar("lyapunov_standard_error", e.standard_error);
    out.scalar("entropy", e.entropy);
    out.scalar("dimension_ratio", e.dimension_ratio);
    out.verdict("mass_defect", (m.total_mass() - 1.0).abs(), Le, MASS_TOL);
    out.verdict("frostman_spread", f.delta_plus - f.delta_minus, Le, FROSTMAN_NOISE);
    Ok(out)
}

fn fourier(cfg: &ExperimentConfig, ifs: &Ifs) -> Outcome {
    let tol = cfg.measure_tol.unwrap_or(auto_tolerance(cfg.xi_max));
    let m = measure_refine(ifs, tol).map_err(ctx("measure_refine"))?;
    let fit = decay_fit(&m, cfg.xi_min, cfg.xi_max, cfg.windows).map_err(ctx("decay_fit"))?;
    let mut out = Sink::labelled("xi_window", "sup_modulus");
    for (&xi, &s) in fit.xi_ladder.iter().zip(&fit.sup_moduli) {
        out.point("sup", xi, s);
    }
    out.scalar("alpha_fit", fit.alpha_fit);
    out.scalar("fit_residual", fit.fit_residual);
    out.verdict("alpha_fit", fit.alpha_fit, Ge, cfg.alpha_bound);
    Ok(out)
}

fn nonconc(cfg: &ExperimentConfig, ifs: &Ifs, seed: u64) -> Outcome {
    let report = lyapunov_entropy(ifs, 256, 200, seed).map_err(ctx("lyapunov_entropy"))?;
    let n = cfg.word_length;
    let params = SumProductParams::new(DEFAULT_K, cfg.eps, DEFAULT_EPS0, DEFAULT_EPS1, DEFAULT_EPS2, n)
        .map_err(ctx("parameters"))?;
    let set = regular_words(ifs, &report, n, cfg.eps, DEFAULT_EPS0).map_err(ctx("regular_words"))?;
    let records = nonconcentration_experiment(ifs, &report, &set, &params, cfg.blocks, cfg.sigmas, seed)
        .map_err(ctx("nonconcentration_experiment"))?;
    let mut out = Sink::labelled("sigma", "fraction");
    out.scalar("regular_words", set.len() as f64);
    out.scalar("complement_mass", set.complement_mass);
    for r in &records {
        out.point(&format!("fraction:j={}", r.j), r.sigma, r.fraction);
        if !r.pass {
            out.point(&format!("failure:block={}:j={}:bound={:e}", r.block, r.j, r.bound), r.sigma, r.fraction);
        }
    }
    let passed = records.iter().filter(|r| r.pass).count() as f64 / records.len() as f64;
    out.verdict("pass_fraction", passed, Ge, cfg.pass_fraction);

    // The ζ factors of one sampled tuple must multiply back to the derivative of
    // the interleaved word a₀b₁a₁…b_ka_k, up to bounded distortion.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let pick = |rng: &mut ChaCha8Rng| set.words[rng.gen_range(0..set.len())].clone();
    let a: Vec<Word> = (0..=params.k).map(|_| pick(&mut rng)).collect();
    let b: Vec<Word> = (0..params.k).map(|_| pick(&mut rng)).collect();
    let full = ifs.compose_word(&Word::interleave(&a, &b)).map_err(ctx("compose"))?.collapsed();
    let last = ifs.compose_word(&a[params.k]).map_err(ctx("compose"))?;
    let x = cylinder_centre(&last);
    let scale = 2.0 * report.lyapunov * n as f64;
    let mut predicted = last.jet_unchecked(x).d1.abs().ln();
    for j in 1..=params.k {
        let z = zeta_values(ifs, &a[j - 1..=j], &b[j - 1], &report);
        predicted += z[0].ln() - scale;
    }
    let actual = full.jet_unchecked(x).d1.abs().ln();
    out.verdict("interleave_log_distortion", (actual - predicted).abs(), Le, 1e-3);
    Ok(out)
}

fn fup_records(out: &mut Sink, tag: &str, k1: &SetSpec, k2: &SetSpec, cfg: &ExperimentConfig) -> Result<(), String> {
    let r = fup_exponent(k1, k2, &cfg.h_ladder, cfg.grid_per_h).map_err(ctx("fup_exponent"))?;
    for ((&h, &v), &d) in r.h_ladder.iter().zip(&r.norms).zip(&r.doubling_deltas) {
        out.point(&format!("{tag}:norm"), h, v);
        out.point(&format!("{tag}:doubling_delta"), h, d);
    }
    out.scalar(&format!("{tag}:beta_fit"), r.beta_fit);
    out.verdict(&format!("{tag}:beta_fit"), r.beta_fit, Gt, 0.0);
    out.verdict(&format!("{tag}:max_doubling_delta"), r.doubling_deltas.iter().cloned().fold(0.0, f64::max), Lt, 1e-3);
    out.verdict(&format!("{tag}:max_norm"), r.norms.iter().cloned().fold(0.0, f64::max), Le, 1.0 + 1e-6);
    Ok(())
}

fn kernel_record(out: &mut Sink, tag: &str, ifs: &Ifs, h: f64, pairs: usize, seed: u64) -> Result<(), String> {
    let m = measure_refine(ifs, auto_tolerance(1.0 / h)).map_err(ctx("measure_refine"))?;
    let err = kernel_check(&m, h, pairs, seed).map_err(ctx("kernel_check"))?;
    out.verdict(&format!("{tag}:kernel_error"), err, Le, 1e-5);
    Ok(())
}

fn fup(cfg: &ExperimentConfig, ifs: &Ifs, seed: u64) -> Outcome {
    let mut out = Sink::labelled("h", "norm");
    let k = SetSpec::Attractor(ifs.clone());
    fup_records(&mut out, "attractor", &k, &k, cfg)?;
    let h_min = cfg.h_ladder.iter().cloned().fold(f64::INFINITY, f64::min);
    kernel_record(&mut out, "attractor", ifs, h_min, cfg.samples, seed)?;
    Ok(out)
}

fn stochasticity(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Sink::labelled("n", "deviation");
    for name in BUILTIN_NAMES {
        let ifs = builtin(name)?;
        let mut f = GridFunction::constant(cfg.grid, Complex64::new(1.0, 0.0));
        let mut worst = 0.0f64;
        for n in 1..=cfg.n_max {
            f = apply_transfer(&ifs, ComplexExponent::new(0.0, 0.0), &f);
            let dev = f.values().iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
            out.point(name, n as f64, dev);
            worst = worst.max(dev);
        }
        out.verdict(&format!("{name}:max_deviation"), worst, Le, 1e-10);
    }
    Ok(out)
}

fn disintegration(cfg: &ExperimentConfig, ifs: &Ifs) -> Outcome {
    let (p, _) = auto_partition(ifs, cfg.max_n, cfg.uni_delta).map_err(ctx("auto_partition"))?;
    let s = ComplexExponent::new(cfg.r, cfg.b_values[0]);
    let f = GridFunction::from_fn(cfg.grid, |x| {
        let z = Complex64::new(0.0, 11.0 * x).exp();
        (z, z * Complex64::new(0.0, 11.0))
    });
    let mut out = Sink::labelled("blocks", "relative_residual");
    out.scalar("block_length", p.block_length as f64);
    let mut worst = 0.0f64;
    for n in 1..=cfg.n_max {
        let r = disintegration_residual(ifs, &p, s, &f, n).map_err(ctx("disintegration_residual"))?;
        out.point("residual", n as f64, r);
        worst = worst.max(r);
    }
    out.verdict("max_residual", worst, Le, 1e-9);
    Ok(out)
}

fn uni_dichotomy() -> Outcome {
    let mut out = Sink::labelled("pair", "margin");
    let (a, b) = (Word::new(vec![0]), Word::new(vec![1]));
    let gauss = uni_margin(&builtin("gauss23")?, &a, &b, UniDomain::Interval, 1024).map_err(ctx("uni_margin"))?;
    let dyadic = uni_margin(&builtin("dyadic")?, &a, &b, UniDomain::Interval, 1024).map_err(ctx("uni_margin"))?;
    out.scalar("gauss23:uni_min", gauss.0);
    out.scalar("gauss23:uni_max", gauss.1);
    out.scalar("dyadic:uni_min", dyadic.0);
    out.scalar("dyadic:uni_max", dyadic.1);
    // 2/((2+x)(3+x)) on [0, 1].
    out.verdict("gauss23:min_error", (gauss.0 - 1.0 / 6.0).abs(), Le, 1e-6);
    out.verdict("gauss23:max_error", (gauss.1 - 1.0 / 3.0).abs(), Le, 1e-6);
    out.verdict("dyadic:max_abs", dyadic.0.abs().max(dyadic.1.abs()), Le, 0.0);
    Ok(out)
}

fn partition_validity(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Sink::new();
    let dyadic = builtin("dyadic")?;
    let (a1, a2) = (Word::new(vec![0; 3]), Word::new(vec![1; 3]));
    let p = build_partition(&dyadic, 3, (&a1, &a2)).map_err(ctx("build_partition"))?;
    partition_verdicts(&mut out, "dyadic", &dyadic, &p, cfg.uni_delta);
    let figure1 = builtin("figure1")?;
    let (p, _) = auto_partition(&figure1, cfg.max_n, cfg.uni_delta).map_err(ctx("auto_partition"))?;
    partition_verdicts(&mut out, "figure1", &figure1, &p, cfg.uni_delta);
    Ok(out)
}

/// Largest spread of the fitted rates across `b` accepted as uniform.
pub const UNIFORMITY_SPREAD: f64 = 0.05;

fn spectral_contrast(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Sink::labelled("n", "norm");
    let g = spectral_gap_sweep(&builtin("gauss23")?, &cfg.b_values, cfg.r, cfg.n_max, cfg.grid)
        .map_err(ctx("spectral_gap_sweep"))?;
    sweep_records(&mut out, "gauss23", &g);
    for (i, &b) in g.b_values.iter().enumerate() {
        out.verdict(&format!("gauss23:fitted_rho:b={b}"), g.fitted_rho[i], Lt, cfg.rho_bound);
    }
    let hi = g.fitted_rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = g.fitted_rho.iter().cloned().fold(f64::INFINITY, f64::min);
    out.verdict("gauss23:rho_spread", hi - lo, Lt, UNIFORMITY_SPREAD);
    let d = spectral_gap_sweep(&builtin("dyadic")?, &[100.0], cfg.r, cfg.n_max, cfg.grid)
        .map_err(ctx("spectral_gap_sweep"))?;
    sweep_records(&mut out, "dyadic", &d);
    out.verdict("dyadic:rho_error", (d.fitted_rho[0] - 1.0).abs(), Le, 1e-9);
    Ok(out)
}

fn dolgopyat(cfg: &ExperimentConfig, ifs: &Ifs, seed: u64) -> Outcome {
    let b = cfg.b_values[0];
    let (p, _) = auto_partition(ifs, cfg.max_n, cfg.uni_delta).map_err(ctx("auto_partition"))?;
    let w = vec![p.star; 3];
    let (dc, _) = default_config(ifs, &p, &w, b, DEFAULT_EPS_PRIME).map_err(ctx("default_config"))?;
    let setup = DolgopyatSetup::new(ifs, &p, &w, b, dc).map_err(ctx("setup"))?;
    let (mu_w, mu_star_w) = setup.l2_measures().map_err(ctx("l2_measures"))?;
    let s = ComplexExponent::imaginary(b);
    let slope = dc.cone_a * b.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Sink::labelled("sample", "value");
    out.scalar("theta", dc.theta);
    out.scalar("cone_a", dc.cone_a);
    out.scalar("block_n", dc.block_n as f64);
    let (mut cone, mut l2, mut dom, mut dense) = (0usize, 0usize, 0usize, 0usize);
    let mut max_ratio = 0.0f64;
    for i in 0..cfg.samples {
        let h = random_cone_function(&mut rng, cfg.grid, slope);
        let f = random_dominated(&mut rng, &h, slope);
        let sel = match setup.select_j(s, &f, &h) {
            Ok(sel) => sel,
            Err(e) => {
                out.point(&format!("selection_error:{e}"), i as f64, 1.0);
                continue;
            }
        };
        dense += sel.dense as usize;
        let c = setup.cone_stability(&sel.set, 0.0, &h);
        let d = setup.domination(&sel.set, s, &f, &h);
        let ratio = setup.l2_ratio(&sel.set, 0.0, &h, &mu_w, &mu_star_w);
        out.point("selected", i as f64, sel.set.len() as f64);
        out.point("cone_worst_ratio", i as f64, c.worst_ratio);
        out.point("domination_worst_ratio", i as f64, d.worst_ratio);
        out.point("l2_ratio", i as f64, ratio);
        cone += c.holds as usize;
        dom += d.holds as usize;
        l2 += (ratio < 1.0) as usize;
        max_ratio = max_ratio.max(ratio);
    }
    let total = cfg.samples as f64;
    out.scalar("max_l2_ratio", max_ratio);
    out.scalar("dense_selections", dense as f64);
    out.verdict("cone_stable", cone as f64, Ge, total);
    out.verdict("l2_contracts", l2 as f64, Ge, total);
    out.verdict("dominated", dom as f64, Ge, total);
    Ok(out)
}

fn fourier_contrast(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Sink::labelled("xi_window", "sup_modulus");
    let gauss = measure_refine(&builtin("gauss23")?, auto_tolerance(cfg.xi_max)).map_err(ctx("measure_refine"))?;
    let fit = decay_fit(&gauss, cfg.xi_min, cfg.xi_max, cfg.windows).map_err(ctx("decay_fit"))?;
    for (&xi, &s) in fit.xi_ladder.iter().zip(&fit.sup_moduli) {
        out.point("gauss23", xi, s);
    }
    out.scalar("gauss23:alpha_fit", fit.alpha_fit);
    out.verdict("gauss23:alpha_fit", fit.alpha_fit, Ge, cfg.alpha_bound);

    let leb = measure_refine(&builtin("dyadic")?, 2f64.powi(-16)).map_err(ctx("measure_refine"))?;
    let fit = decay_fit(&leb, 2.0, 2048.0, 10).map_err(ctx("decay_fit"))?;
    for (&xi, &s) in fit.xi_ladder.iter().zip(&fit.sup_moduli) {
        out.point("lebesgue", xi, s);
    }
    out.scalar("lebesgue:alpha_fit", fit.alpha_fit);
    out.verdict("lebesgue:alpha_error", (fit.alpha_fit - 1.0).abs(), Le, 0.1);

    let cantor = measure_refine(&builtin("cantor3")?, 3f64.powi(-12)).map_err(ctx("measure_refine"))?;
    let values: Vec<f64> = (0..=6)
        .map(|k| fourier_transform(&cantor, 3f64.powi(k)).map(|z| z.norm()))
        .collect::<Result<_, _>>()
        .map_err(ctx("fourier_transform"))?;
    for (k, &v) in values.iter().enumerate() {
        out.point("cantor3", 3f64.powi(k as i32), v);
    }
    let spread = values.iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max);
    out.verdict("cantor3:modulus_spread", spread, Le, 1e-4);
    Ok(out)
}

fn fup_numerics(cfg: &ExperimentConfig, seed: u64) -> Outcome {
    let mut out = Sink::labelled("h", "norm");
    let h = 0.01;
    let unit = thicken(&SetSpec::interval(0.0, 1.0), h).map_err(ctx("thicken"))?;
    let box_norm = fup_norm(&unit, &unit, h, cfg.grid_per_h).map_err(ctx("fup_norm"))?;
    out.point("interval:norm", h, box_norm.norm);
    out.point("interval:doubling_delta", h, box_norm.doubling_delta);
    out.verdict("interval:norm_lower", box_norm.norm, Ge, 0.9);
    out.verdict("interval:norm_upper", box_norm.norm, Le, 1.0 + 1e-6);
    let cantor = builtin("cantor3")?;
    let k = SetSpec::Attractor(cantor.clone());
    fup_records(&mut out, "cantor3", &k, &k, cfg)?;
    let h_min = cfg.h_ladder.iter().cloned().fold(f64::INFINITY, f64::min);
    kernel_record(&mut out, "cantor3", &cantor, h_min, cfg.samples, seed)?;
    kernel_record(&mut out, "lebesgue", &builtin("dyadic")?, h, cfg.samples, seed)?;
    Ok(out)
}

fn formulas() -> Outcome {
    let mut out = Sink::new();
    let beta = theorem_beta(0.3, 0.3, 0.2).beta;
    out.scalar("theorem_beta", beta);
    out.verdict("theorem_beta_error", (beta - 0.25).abs(), Le, 0.0);
    let schur = schur_bound(0.2, 0.6, 1e-4).map_err(ctx("schur_bound"))?;
    out.scalar("schur_bound", schur);
    out.verdict("schur_bound_error", (schur - 0.46121).abs(), Le, 1e-5);
    let n = block_length_rule(1, 2f64.ln(), 0.1, 10f64.exp());
    out.scalar("block_length", n as f64);
    out.verdict("block_length_error", (n as f64 - 21.0).abs(), Le, 0.0);
    Ok(out)
}
