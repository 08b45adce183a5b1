//! Randomised invariants across the public API.

use num_complex::Complex64;
use proptest::prelude::*;

use conformal_gap::fourier::{exp_sum, fourier_transform};
use conformal_gap::fup::{fup_norm, thicken, SetSpec};
use conformal_gap::harness::{
    parse_json_report, render_json, Comparison, Experiment, ExperimentConfig, Record, ResultBundle, Verdict,
};
use conformal_gap::ifs::{uni_margin, ContractionMap, Ifs, UniDomain, Word, BUILTIN_NAMES};
use conformal_gap::interval::Interval;
use conformal_gap::measures::{measure_refine, MASS_TOL};
use conformal_gap::partition::build_partition;
use conformal_gap::transfer::{apply_transfer, ComplexExponent, GridFunction};

fn builtin() -> impl Strategy<Value = Ifs> {
    prop::sample::select(BUILTIN_NAMES.to_vec()).prop_map(|n| Ifs::builtin(n).unwrap())
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0usize..2, 1..=max_len).prop_map(Word::new)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn chain_rule_for_concatenated_words(ifs in builtin(), u in word(6), v in word(6), x in 0.0f64..=1.0) {
        let uv = ifs.compose_word(&u.concat(&v)).unwrap().jet(x).unwrap();
        let jv = ifs.compose_word(&v).unwrap().jet(x).unwrap();
        let ju = ifs.compose_word(&u).unwrap().jet(jv.value).unwrap();
        prop_assert!((uv.value - ju.value).abs() <= 1e-14);
        prop_assert!((uv.d1 - ju.d1 * jv.d1).abs() <= 1e-12 * uv.d1.abs());
    }

    #[test]
    fn derivative_sign_is_the_product_of_letter_signs(ifs in builtin(), w in word(12), x in 0.0f64..=1.0) {
        let sign: f64 = w.letters().iter().map(|&a| ifs.map(a).jet(0.5).unwrap().d1.signum()).product();
        let d = ifs.compose_word(&w).unwrap().collapsed().jet(x).unwrap().d1;
        prop_assert!(d != 0.0 && d.signum() == sign);
    }

    /// For 1/(k+x) the log-derivative slope is at most 1 in size and every map
    /// contracts by 1/4, so distortion of any word is below 1/(1 - 1/4).
    #[test]
    fn gauss_words_have_bounded_distortion(w in word(24), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let f = Ifs::builtin("gauss23").unwrap().compose_word(&w).unwrap().collapsed();
        let spread = (f.jet(x).unwrap().d1.abs().ln() - f.jet(y).unwrap().d1.abs().ln()).abs();
        prop_assert!(spread <= 4.0 / 3.0 * (x - y).abs() + 1e-9, "{spread}");
    }

    #[test]
    fn uni_margin_is_symmetric(ifs in builtin(), a in word(4), b in word(4)) {
        let ab = uni_margin(&ifs, &a, &b, UniDomain::Interval, 64).unwrap();
        let ba = uni_margin(&ifs, &b, &a, UniDomain::Interval, 64).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(0.0 <= ab.0 && ab.0 <= ab.1);
    }

    #[test]
    fn partition_weights_are_probabilities(n in 3usize..=6) {
        let ifs = Ifs::builtin("dyadic").unwrap();
        let p = build_partition(&ifs, n, (&Word::new(vec![0; n]), &Word::new(vec![1; n]))).unwrap();
        prop_assert!((p.group_weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (g, probs) in p.groups.iter().zip(&p.conditional_probs) {
            prop_assert_eq!(g.len(), probs.len());
            prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        let words: usize = p.groups.iter().map(Vec::len).sum();
        prop_assert_eq!(words, 1 << n);
    }

    #[test]
    fn grid_functions_reproduce_their_nodes(vals in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..40)) {
        let values: Vec<Complex64> = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let derivatives: Vec<Complex64> = vals.iter().map(|&(a, b)| Complex64::new(b, -a)).collect();
        let f = GridFunction::new(values.clone(), derivatives.clone()).unwrap();
        for k in 0..values.len() {
            let (v, d) = f.eval(f.node(k));
            prop_assert!((v - values[k]).norm() <= 1e-12);
            prop_assert!((d - derivatives[k]).norm() <= 1e-9 * (values.len() as f64));
        }
    }

    /// `|L_{r+ib} f| ≤ L_r |f|` pointwise, with both sides using the same interpolant.
    #[test]
    fn transfer_modulus_is_dominated(ifs in builtin(), r in 0.0f64..2.0, b in -200.0f64..200.0, freq in 0.0f64..20.0) {
        let f = GridFunction::from_fn(65, |x| {
            let z = Complex64::new(1.0 + x, x * x) * Complex64::new(0.0, freq * x).exp();
            (z, z * Complex64::new(0.0, freq) + Complex64::new(1.0, 2.0 * x) * Complex64::new(0.0, freq * x).exp())
        });
        let g = apply_transfer(&ifs, ComplexExponent::new(r, b), &f);
        for k in 0..g.grid_size() {
            let x = g.node(k);
            let bound: f64 = ifs.maps().iter().zip(ifs.probs()).map(|(m, &p)| {
                let j = m.jet(x).unwrap();
                p * j.d1.abs().powf(r) * f.eval(j.value).0.norm()
            }).sum();
            prop_assert!(g.values()[k].norm() <= bound * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn refined_measures_are_sorted_probabilities(ifs in builtin(), tol in 1e-4f64..1e-2) {
        let m = measure_refine(&ifs, tol).unwrap();
        prop_assert!((m.total_mass() - 1.0).abs() <= MASS_TOL);
        prop_assert!(m.masses().iter().all(|&q| q > 0.0));
        prop_assert!(m.positions().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(m.positions().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn entropy_is_exact(p in 0.01f64..0.99) {
        let maps = vec![ContractionMap::affine(0.5, 0.0), ContractionMap::affine(0.5, 0.5)];
        let ifs = Ifs::new(maps, vec![p, 1.0 - p]).unwrap();
        let exact = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln());
        prop_assert!((ifs.entropy() - exact).abs() <= 1e-15);
    }

    #[test]
    fn fourier_transform_symmetries(ifs in builtin(), xi in 0.0f64..100.0) {
        let m = measure_refine(&ifs, 1e-4).unwrap();
        prop_assert!((fourier_transform(&m, 0.0).unwrap().norm() - 1.0).abs() <= 1e-12);
        let (plus, minus) = (fourier_transform(&m, xi).unwrap(), fourier_transform(&m, -xi).unwrap());
        prop_assert!((plus - minus.conj()).norm() <= 1e-12);
        prop_assert!(plus.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn exp_sum_at_zero_frequency_is_one(
        tables in prop::collection::vec(prop::collection::vec(0.1f64..10.0, 1..30), 1..4),
        seed in any::<u64>(),
    ) {
        let r = exp_sum(&tables, 0.0, 64, seed).unwrap();
        prop_assert!((r.modulus - 1.0).abs() <= 1e-12);
        prop_assert_eq!(r.sampled, tables.len() > 2);
    }
}

fn intervals(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..0.1), 1..=max)
}

fn set(parts: &[(f64, f64)], h: f64) -> conformal_gap::fup::ThickenedSet {
    let spec = SetSpec::Intervals(parts.iter().map(|&(lo, len)| Interval::new(lo, lo + len)).collect());
    thicken(&spec, h).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn fup_norm_is_a_contraction(x in intervals(3), y in intervals(3), h in 0.02f64..0.05) {
        let r = fup_norm(&set(&x, h), &set(&y, h), h, 8).unwrap();
        prop_assert!(r.norm <= 1.0 + 1e-6, "{}", r.norm);
    }

    /// Enlarging Y cannot lower the norm beyond the certified discretisation error.
    #[test]
    fn fup_norm_is_monotone_in_frequency_set(x in intervals(2), y in intervals(2), extra in intervals(2), h in 0.02f64..0.05) {
        let small = fup_norm(&set(&x, h), &set(&y, h), h, 8).unwrap();
        let mut larger = y.clone();
        larger.extend(extra);
        let big = fup_norm(&set(&x, h), &set(&larger, h), h, 8).unwrap();
        let slack = small.doubling_delta * small.norm + big.doubling_delta * big.norm + 1e-9;
        prop_assert!(small.norm <= big.norm + slack, "{} > {}", small.norm, big.norm);
    }

    #[test]
    fn fup_norm_is_translation_invariant(x in intervals(2), y in intervals(2), h in 0.02f64..0.05, t in -2.0f64..2.0) {
        let (xs, ys) = (set(&x, h), set(&y, h));
        let a = fup_norm(&xs, &ys, h, 8).unwrap().norm;
        let b = fup_norm(&xs.shifted(t), &ys.shifted(t), h, 8).unwrap().norm;
        prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

fn comparison() -> impl Strategy<Value = Comparison> {
    prop::sample::select(vec![Comparison::Lt, Comparison::Le, Comparison::Gt, Comparison::Ge])
}

fn float() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), Just(f64::INFINITY), Just(f64::NEG_INFINITY)]
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn configs_round_trip_through_json(idx in 0usize..Experiment::ALL.len(), seed in any::<u64>(), grid in 2usize..100_000) {
        let cfg = ExperimentConfig { seed: Some(seed), grid, ..ExperimentConfig::defaults(Experiment::ALL[idx]) };
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
    }

    #[test]
    fn bundles_round_trip_through_json(
        rows in prop::collection::vec(("[a-z:=0-9]{1,12}", prop::option::of(float()), float()), 0..20),
        verdicts in prop::collection::vec((float(), comparison(), float()), 0..5),
        wall in 0.0f64..100.0,
    ) {
        let mut b = ResultBundle::empty(ExperimentConfig::defaults(Experiment::Formulas));
        b.wall_clock_seconds = wall;
        b.records = rows.into_iter().map(|(series, x, y)| Record { series, x, y }).collect();
        b.verdicts = verdicts.into_iter().enumerate().map(|(i, (v, c, bd))| Verdict::new(format!("v{i}"), v, c, bd)).collect();
        prop_assert_eq!(parse_json_report(&render_json(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn verdicts_follow_their_numbers(value in float(), bound in float(), cmp in comparison()) {
        let v = Verdict::new("v", value, cmp, bound);
        let expected = match cmp {
            Comparison::Lt => value < bound,
            Comparison::Le => value <= bound,
            Comparison::Gt => value > bound,
            Comparison::Ge => value >= bound,
        };
        prop_assert_eq!(v.pass, expected);
        prop_assert!(v.consistent());
    }
}
