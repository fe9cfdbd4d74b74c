use monocurv_core::conjecture::*;
use monocurv_core::mcfun::MetricKind;
use monocurv_core::scalar::{kubo_mori_scalar, scalar_theorem1, HKernel};
use monocurv_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn log_uniform() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

fn spectrum(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let t: f64 = v.iter().sum();
        v.iter().map(|x| x / t).collect()
    })
}

fn permutations(p: [f64; 3]) -> [[f64; 3]; 6] {
    let [a, b, c] = p;
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn h_s_is_symmetric(x in log_uniform(), y in log_uniform(), z in log_uniform()) {
        for kernel in [SymmetrizedKernel::KuboMori, SymmetrizedKernel::for_metric(MetricKind::Smallest).unwrap()] {
            let base = kernel.h_s(x, y, z);
            for [a, b, c] in permutations([x, y, z]) {
                prop_assert!(rel(kernel.h_s(a, b, c), base) < 1e-10);
            }
        }
    }

    #[test]
    fn h_s_is_homogeneous(x in log_uniform(), y in log_uniform(), z in log_uniform(), t in 0.1f64..10.0) {
        let k = SymmetrizedKernel::KuboMori;
        prop_assert!(rel(k.h_s(t * x, t * y, t * z), k.h_s(x, y, z) / t) < 1e-10);
    }

    #[test]
    fn closed_form_matches_d_route(x in log_uniform(), y in log_uniform(), z in log_uniform()) {
        let k = SymmetrizedKernel::KuboMori;
        prop_assert!(rel(k.h_s(x, y, z), kubo_mori_h_s_from_d(x, y, z)) < 1e-10);
    }

    #[test]
    fn t_transform_output_is_more_mixed(s in spectrum(4), i in 0usize..4, j in 0usize..4, t in 0.0f64..=1.0) {
        let out = t_transform(&s, MixingStep::new(i, j, t).unwrap()).unwrap();
        prop_assert!(majorizes(&out, &s).unwrap());
    }

    #[test]
    fn majorization_is_reflexive_and_antisymmetric(a in spectrum(4), b in spectrum(4)) {
        prop_assert!(majorizes(&a, &a).unwrap());
        if majorizes(&a, &b).unwrap() && majorizes(&b, &a).unwrap() {
            let sorted = |v: &[f64]| { let mut s = v.to_vec(); s.sort_by(f64::total_cmp); s };
            for (p, q) in sorted(&a).iter().zip(sorted(&b)) {
                prop_assert!((p - q).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn majorization_is_transitive(s in spectrum(4), steps in prop::collection::vec((0usize..4, 0usize..4, 0.0f64..0.5), 2..6)) {
        let mut chain = vec![s];
        for (i, j, t) in steps {
            let next = t_transform(chain.last().unwrap(), MixingStep::new(i, j, t).unwrap()).unwrap();
            chain.push(next);
        }
        for a in 0..chain.len() {
            for b in a..chain.len() {
                prop_assert!(majorizes(&chain[b], &chain[a]).unwrap());
            }
        }
    }

    #[test]
    fn derivative_inequalities_scale_inverse_square(x in 0.05f64..5.0, gap in 0.05f64..5.0, l in 0.05f64..5.0, m in 0.05f64..5.0, t in 0.2f64..5.0) {
        let y = x + gap;
        let a = lemma4_check(x, y, l, m).unwrap();
        let b = lemma4_check(t * x, t * y, t * l, t * m).unwrap();
        let scale = 1.0 / x.min(l).min(m).powi(2);
        for (p, q) in [(a.pair, b.pair), (a.diagonal, b.diagonal), (a.cross, b.cross), (a.tail, b.tail)] {
            prop_assert!((q * t * t - p).abs() < 1e-7 * scale);
        }
    }
}

#[test]
fn kubo_mori_totals_agree_between_d_and_h_s() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let k = SymmetrizedKernel::KuboMori;
    for n in 2..=6 {
        for _ in 0..10 {
            let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let mut total = 0.0;
            for &a in &s {
                for &b in &s {
                    for &c in &s {
                        total += k.h_s(a, b, c);
                    }
                }
                total -= k.h_s(a, a, a);
            }
            assert!(rel(total, kubo_mori_scalar(&s, false).unwrap()) < 1e-10);
        }
    }
}

#[test]
fn generic_kernel_totals_match_triple_sum() {
    for kind in [MetricKind::Smallest, MetricKind::Largest] {
        let sym = SymmetrizedKernel::for_metric(kind).unwrap();
        let s = [0.1, 0.25, 0.65];
        let mut total = 0.0;
        for &a in &s {
            for &b in &s {
                for &c in &s {
                    total += sym.h_s(a, b, c);
                }
            }
            total -= sym.h_s(a, a, a);
        }
        let direct = scalar_theorem1(&HKernel::builtin(kind).unwrap(), &s).unwrap();
        assert!(rel(total, direct) < 1e-10);
    }
}

#[test]
fn h_s_dx_matches_closed_form_difference_quotient() {
    let k = SymmetrizedKernel::KuboMori;
    for &(x, y, z) in &[(0.3, 1.7, 4.0), (2.0, 0.05, 0.9), (10.0, 30.0, 0.2)] {
        let h = 1e-4 * x;
        let quotient =
            (kubo_mori_h_s_closed(x + h, y, z) - kubo_mori_h_s_closed(x - h, y, z)) / (2.0 * h);
        assert!(rel(k.h_s_dx(x, y, z), quotient) < 1e-6);
        // degree -2 homogeneity of the derivative
        assert!(rel(k.h_s_dx(3.0 * x, 3.0 * y, 3.0 * z), k.h_s_dx(x, y, z) / 9.0) < 1e-7);
    }
}

#[test]
fn hessian_minors_scale_by_degree() {
    let (x, y, z) = (0.4, 2.5, 1.0);
    let (a1, a2, a3) = hessian_minors(x, y, z).unwrap();
    let t = 3.0;
    let (b1, b2, b3) = hessian_minors(t * x, t * y, t * z).unwrap();
    assert!(rel(b1 * t.powi(3), a1) < 1e-6);
    assert!(rel(b2 * t.powi(6), a2) < 1e-6);
    assert!(rel(b3 * t.powi(9), a3) < 1e-5);
    let (m1, m2, m3) = hessian_minors(1.0, 1.0, 1.0).unwrap();
    assert!(m1 < 0.0 && m2 >= -1e-10 && m3 <= 1e-10);
}

#[test]
fn derivative_inequalities_degenerate_at_coincidence() {
    let r = lemma4_check(0.7 - 1e-10, 0.7, 0.2, 3.0).unwrap();
    assert!(r.min().abs() < 1e-6 && r.pair.abs() < 1e-6);
    assert!(matches!(
        lemma4_check(1.0, 1.0, 1.0, 1.0),
        Err(Error::OrderViolation(..))
    ));
    assert!(lemma4_check(-1.0, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn concavity_chord_vanishes_for_equal_endpoints() {
    let k = SymmetrizedKernel::KuboMori;
    let p = [0.2, 1.3, 7.0];
    let t = 0.37;
    let q: Vec<f64> = p.iter().map(|v| (1.0 - t) * v + t * v).collect();
    let h = k.h_s(p[0], p[1], p[2]);
    let gap = (1.0 - t) * h + t * h - k.h_s(q[0], q[1], q[2]);
    assert!(gap.abs() <= 4.0 * f64::EPSILON * h.abs());
}

#[test]
fn concavity_scan_is_deterministic_and_clean() {
    let k = SymmetrizedKernel::KuboMori;
    let a = concavity_scan(&k, Region::default(), 20_000, 42, 1e-9);
    let b = concavity_scan(&k, Region::default(), 20_000, 42, 1e-9);
    assert_eq!(a, b);
    assert!(a.passed(), "{a:?}");
    assert!(a.worst.is_some());
    let empty = concavity_scan(&k, Region::default(), 0, 42, 1e-9);
    assert_eq!(empty.violations, 0);
    assert!(empty.worst.is_none());
}

#[test]
fn concavity_scan_reports_violations_with_provenance() {
    // the Smallest-metric kernel is not concave, which gives the scan a
    // reproducible counterexample to find
    let k = SymmetrizedKernel::for_metric(MetricKind::Smallest).unwrap();
    let r = concavity_scan(&k, Region::default(), 5_000, 1, 1e-9);
    assert!(!r.passed());
    let w = r.worst.unwrap();
    assert!(w.gap > 0.0);
    let mid: Vec<f64> = (0..3)
        .map(|i| (1.0 - w.t) * w.p1[i] + w.t * w.p2[i])
        .collect();
    let gap = (1.0 - w.t) * k.h_s(w.p1[0], w.p1[1], w.p1[2])
        + w.t * k.h_s(w.p2[0], w.p2[1], w.p2[2])
        - k.h_s(mid[0], mid[1], mid[2]);
    assert_eq!(gap, w.gap);
}

#[test]
fn monotonicity_small_scans() {
    let two = monotonicity_scan(2, 50, 20, 9, 1e-8).unwrap();
    assert!(two.passed(1e-6), "{two:?}");
    assert!(two.max_scalar <= 1e-9 && two.trace_state_scalar == 0.0);
    let three = monotonicity_scan(3, 40, 20, 9, 1e-8).unwrap();
    assert!(three.passed(1e-6), "{three:?}");
    assert_eq!(three.evaluations, 40 * 21);
    assert!(matches!(
        monotonicity_scan(1, 1, 1, 0, 1e-8),
        Err(Error::DimensionTooSmall { .. })
    ));
}

#[test]
fn constant_path_keeps_s1() {
    let s = vec![0.1, 0.2, 0.7];
    let next = t_transform(&s, MixingStep::new(0, 2, 0.0).unwrap()).unwrap();
    assert_eq!(
        kubo_mori_scalar(&s, true).unwrap(),
        kubo_mori_scalar(&next, true).unwrap()
    );
}

#[test]
fn directional_derivative_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [3, 4, 5] {
        for _ in 0..20 {
            let mut s: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..1.0)).collect();
            let (x, y) = (s[0].min(s[1]), s[0].max(s[1]));
            let tail = s.split_off(2);
            let r = directional_derivative_check(x, y, &tail).unwrap();
            assert!(r.expansion >= -1e-8);
            assert!(rel(r.expansion, r.finite_difference) < 1e-6, "{r:?}");
        }
    }
    let near = directional_derivative_check(0.5 - 1e-9, 0.5, &[0.3, 0.2]).unwrap();
    assert!(near.expansion.abs() < 1e-5);
    assert!(matches!(
        directional_derivative_check(0.5, 0.4, &[]),
        Err(Error::OrderViolation(..))
    ));
}

#[test]
fn small_minor_grid_and_inequality_scan() {
    let g = hessian_minor_grid(0.05, 20.0, 12, 1.0, 1e-10).unwrap();
    assert_eq!(g.points, 144);
    assert!(g.passed(), "{g:?}");
    let l = lemma4_scan(Region::default(), 2_000, 5, 1e-9);
    assert!(l.passed(), "{l:?}");
    assert!(Region::new(1.0, 0.5).is_err());
}
