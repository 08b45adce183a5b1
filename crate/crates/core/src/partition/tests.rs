use super::*;
use crate::ifs::{ContractionMap, Ifs, Word};

fn w(v: &[usize]) -> Word {
    Word::new(v.to_vec())
}

fn dyadic_n3() -> (Ifs, PartitionResult) {
    let ifs = Ifs::builtin("dyadic").unwrap();
    let p = build_partition(&ifs, 3, (&w(&[0, 0, 0]), &w(&[1, 1, 1]))).unwrap();
    (ifs, p)
}

#[test]
fn disjoint_pairs_for_builtins() {
    let dy = Ifs::builtin("dyadic").unwrap();
    assert_eq!(find_disjoint_pair(&dy, 4).unwrap(), (w(&[0, 0]), w(&[1, 1])));
    let g = Ifs::builtin("gauss23").unwrap();
    let (c, d) = find_disjoint_pair(&g, 4).unwrap();
    assert_eq!((c.clone(), d.clone()), (w(&[0, 0]), w(&[1, 1])));
    // φ00(I) = [2/5, 3/7], φ11(I) = [3/10, 4/13]
    let (ic, id) = (word_image(&g, &c), word_image(&g, &d));
    assert!((ic.lo - 0.4).abs() < 1e-14 && (ic.hi - 3.0 / 7.0).abs() < 1e-14);
    assert!((id.lo - 0.3).abs() < 1e-14 && (id.hi - 4.0 / 13.0).abs() < 1e-14);
}

#[test]
fn heavy_overlap_has_no_shallow_pair() {
    let ifs =
        Ifs::new(vec![ContractionMap::affine(0.9, 0.0), ContractionMap::affine(0.9, 0.1)], vec![0.5, 0.5]).unwrap();
    assert_eq!(find_disjoint_pair(&ifs, 3), Err(PartitionError::NotFound(3)));
}

#[test]
fn gauss23_uni_pair() {
    let g = Ifs::builtin("gauss23").unwrap();
    let u = build_uni_pair(&g, (&w(&[0]), &w(&[1])), (&w(&[0, 0]), &w(&[1, 1])), 1e-3).unwrap();
    assert_eq!(u.alpha1, w(&[1, 1, 1, 0, 0, 0]));
    assert_eq!(u.alpha2, w(&[0, 0, 0, 1, 1, 1]));
    assert!(u.separation > 0.0);
    assert!(u.margins.iter().all(|m| m.0 > 0.0 && m.1 < f64::INFINITY));
}

#[test]
fn uni_pair_failures() {
    let dy = Ifs::builtin("dyadic").unwrap();
    let err = build_uni_pair(&dy, (&w(&[0]), &w(&[1])), (&w(&[0, 0]), &w(&[1, 1])), 1e-3).unwrap_err();
    assert!(matches!(err, PartitionError::UniFailed { .. }));
    let g = Ifs::builtin("gauss23").unwrap();
    let err = build_uni_pair(&g, (&w(&[0]), &w(&[0])), (&w(&[0, 0]), &w(&[1, 1])), 1e-3).unwrap_err();
    assert!(matches!(err, PartitionError::UniFailed { .. }));
}

#[test]
fn dyadic_partition_groups() {
    let (ifs, p) = dyadic_n3();
    assert_eq!(p.t_n, 3);
    let expect = [[1usize, 4], [2, 5], [3, 6]];
    for (g, e) in p.groups.iter().zip(expect) {
        let idx: Vec<usize> = g.iter().map(|x| x.letters().iter().fold(0, |acc, &a| 2 * acc + a)).collect();
        assert_eq!(idx, e);
    }
    let r = verify_partition(&ifs, &p, 1e-3);
    assert!(r.all_pass(), "{r:?}");
    assert!(r.separation_margin > 0.0 && r.star_margin > 0.0);
    assert_eq!(r.uni_margin, 0.0);
}

#[test]
fn too_few_words() {
    let ifs = Ifs::builtin("dyadic").unwrap();
    assert!(matches!(build_partition(&ifs, 2, (&w(&[0, 0]), &w(&[1, 1]))), Err(PartitionError::TooFewWords { .. })));
}

#[test]
fn verify_detects_tampering() {
    let (ifs, p) = dyadic_n3();
    let mut bad = p.clone();
    bad.groups[bad.star][1] = bad.groups[bad.star][0].clone();
    assert!(!verify_partition(&ifs, &bad, 1e-3).star_disjoint_ok);
    let mut missing = p.clone();
    missing.groups[0].pop();
    missing.reweigh(&ifs);
    assert!(!verify_partition(&ifs, &missing, 1e-3).property1());
}

#[test]
fn omega_mass_is_one() {
    let (_, p) = dyadic_n3();
    for n in 0..=6 {
        assert!((omega_mass(&p, n) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn figure1_and_gauss23_auto_partitions() {
    for name in ["figure1", "gauss23"] {
        let ifs = Ifs::builtin(name).unwrap();
        let (p, _) = auto_partition(&ifs, 12, 1e-3).unwrap();
        let r = verify_partition(&ifs, &p, 1e-3);
        assert!(r.all_pass() && r.separation_margin > 0.0 && r.star_margin > 0.0, "{name}: {r:?}");
        assert!(r.uni_margin > 0.0);
    }
}

#[test]
fn good_words() {
    let (_, p) = dyadic_n3();
    let s = p.star;
    // q_{w*}^N n / 5N = (1/4)^3 · 12 / 15 < 1: one star block suffices.
    let mut word = vec![0usize; 12];
    assert!(!is_good_word(&p, &word));
    word[..3].fill(s);
    assert_eq!(star_block_count(&p, &word), 1);
    assert!(is_good_word(&p, &word));
}

fn dyadic_star_n6() -> (Ifs, PartitionResult) {
    let ifs = Ifs::builtin("dyadic").unwrap();
    let p = build_partition(&ifs, 6, (&w(&[1, 1, 1, 0, 0, 0]), &w(&[0, 0, 0, 1, 1, 1]))).unwrap();
    (ifs, p)
}

#[test]
fn cover_properties_dyadic() {
    let (ifs, p) = dyadic_star_n6();
    let c = interval_cover(&ifs, &p, &[], 0.1, DEFAULT_COVER_NODES).unwrap();
    let r = c.verify();
    assert!(r.all_pass(), "{r:?} {c:?}");
    assert!(c.a2 > 0.0);
}

#[test]
fn cover_with_prefix_and_small_eps() {
    let g = Ifs::builtin("gauss23").unwrap();
    let (p, _) = auto_partition(&g, 12, 1e-3).unwrap();
    for eps in [1e-2, 1e-3, 1e-4] {
        let c = interval_cover(&g, &p, &[0, p.star, 3], eps, DEFAULT_COVER_NODES).unwrap();
        let r = c.verify();
        assert!(r.all_pass(), "eps {eps}: {r:?}");
    }
}

#[test]
fn degenerate_cover() {
    let (ifs, p) = dyadic_star_n6();
    assert!(matches!(interval_cover(&ifs, &p, &[], 1.0, DEFAULT_COVER_NODES), Err(PartitionError::DegenerateCover(_))));
}
