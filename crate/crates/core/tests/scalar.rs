use monocurv_core::geometry::{oracle_scalar, scalar_from_basis, MetricContext};
use monocurv_core::mcfun::{make_builtin, MetricKind, MorozovaChentsovFunction};
use monocurv_core::scalar::*;
use monocurv_core::states::{random_spectrum, random_unitary, state_with_spectrum};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kernel(kind: MetricKind) -> HKernel {
    HKernel::builtin(kind).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn normalized_spectrum(n: usize, spread: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let s = random_spectrum(n, spread, rng);
    let t: f64 = s.iter().sum();
    s.iter().map(|x| x / t).collect()
}

/// Literal transcription of the Kubo-Mori kernel `d` with logarithms, valid
/// for separated arguments only.
fn d_literal(x: f64, y: f64, z: f64) -> f64 {
    let t = |w: f64| (z - w + z * (w.ln() - z.ln())) / ((w - z) * (w.ln() - z.ln()));
    3.0 * (t(x) - t(y)) / (2.0 * (x - y)) - t(x) * t(y) / z
}

#[test]
fn triple_sum_matches_basis_sum_and_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in MetricKind::BUILTIN {
        let k = kernel(kind);
        for n in [2, 3, 4] {
            for _ in 0..3 {
                let spectrum = random_spectrum(n, 10.0, &mut rng);
                let u = random_unitary(n, &mut rng);
                let ctx = MetricContext::new(
                    k.mcfun().clone(),
                    state_with_spectrum(&spectrum, &u).unwrap(),
                )
                .unwrap();
                let s = scalar_theorem1(&k, &spectrum).unwrap();
                let b = scalar_from_basis(&ctx, false).unwrap();
                assert!(rel(s, b) < 1e-9, "{kind:?} n={n}: {s} vs {b}");
                if n <= 3 {
                    let o = oracle_scalar(&ctx, false).unwrap();
                    assert!(rel(s, o) < 1e-4, "{kind:?} n={n}: {s} vs oracle {o}");
                }
            }
        }
    }
}

#[test]
fn normalized_basis_sum_matches_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for kind in MetricKind::BUILTIN {
        let k = kernel(kind);
        for n in [2, 3] {
            let spectrum = normalized_spectrum(n, 10.0, &mut rng);
            let ctx = MetricContext::diagonal(k.mcfun().clone(), &spectrum).unwrap();
            let s1 = normalize_scalar(scalar_theorem1(&k, &spectrum).unwrap(), n);
            assert!(rel(s1, scalar_from_basis(&ctx, true).unwrap()) < 1e-9);
        }
    }
}

#[test]
fn trace_states_match_closed_forms() {
    for kind in MetricKind::BUILTIN {
        let k = kernel(kind);
        for n in 2..=6 {
            let spectrum = vec![1.0 / n as f64; n];
            let s1 = normalize_scalar(scalar_theorem1(&k, &spectrum).unwrap(), n);
            let closed = trace_state_closed_form(kind, n).unwrap();
            let general = trace_state_scalar(&k, n).unwrap();
            assert!(
                (s1 - closed).abs() <= 1e-9 * closed.abs().max(1.0),
                "{kind:?} n={n}: {s1} vs {closed}"
            );
            assert!((general - closed).abs() <= 1e-9 * closed.abs().max(1.0));
        }
    }
}

#[test]
fn per_metric_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let n = rng.random_range(2..=6);
        let spectrum = normalized_spectrum(n, 20.0, &mut rng);
        let bures = bures_scalar(&spectrum).unwrap();
        assert!(
            rel(
                bures,
                scalar_theorem1(&kernel(MetricKind::Smallest), &spectrum).unwrap()
            ) < 1e-10
        );
        let largest = largest_scalar(&spectrum).unwrap();
        assert!(
            rel(
                largest,
                scalar_theorem1(&kernel(MetricKind::Largest), &spectrum).unwrap()
            ) < 1e-9
        );
        let companion = largest_scalar_companion(&spectrum).unwrap();
        assert!(
            rel(largest, companion) < 1e-8,
            "n={n}: {largest} vs {companion}"
        );
        let km = kubo_mori_scalar(&spectrum, true).unwrap();
        let t1 = normalize_scalar(
            scalar_theorem1(&kernel(MetricKind::KuboMori), &spectrum).unwrap(),
            n,
        );
        assert!(rel(km, t1) < 1e-9, "{km} vs {t1}");
    }
    assert!((bures_scalar(&[0.5, 0.5]).unwrap() - 4.5).abs() < 1e-14);
    assert!((normalize_scalar(largest_scalar(&[0.5, 0.5]).unwrap(), 2) + 12.0).abs() < 1e-13);
    assert!(
        (normalize_scalar(largest_scalar_companion(&[0.5, 0.5]).unwrap(), 2) + 12.0).abs() < 1e-10
    );
    assert!((kubo_mori_scalar(&[1.0 / 3.0; 3], true).unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn kubo_mori_kernel_matches_literal_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let (x, y, z): (f64, f64, f64) = (
            rng.random_range(0.01..10.0),
            rng.random_range(0.01..10.0),
            rng.random_range(0.01..10.0),
        );
        if (x - y).abs() < 0.05 * x.max(y)
            || (x - z).abs() < 0.05 * x.max(z)
            || (y - z).abs() < 0.05 * y.max(z)
        {
            continue;
        }
        let a = kubo_mori_d(x, y, z);
        let b = d_literal(x, y, z);
        assert!(
            (a - b).abs() < 1e-9 * (1.0 / x + 1.0 / y + 1.0 / z),
            "{x} {y} {z}: {a} vs {b}"
        );
    }
}

#[test]
fn kubo_mori_near_degenerate_spectrum() {
    // limit of the literal formula at separated points, by polynomial
    // extrapolation in the gap
    let base = [0.2, 0.5];
    let at_gap = |g: f64| {
        let s = [base[0], base[0] + g, base[1]];
        let mut t = 0.0;
        for &x in &s {
            for &y in &s {
                for &z in &s {
                    t += if x == y || y == z || x == z {
                        kubo_mori_d(x, y, z)
                    } else {
                        d_literal(x, y, z)
                    };
                }
            }
        }
        t - s.iter().map(|&x| kubo_mori_d(x, x, x)).sum::<f64>()
    };
    let h = 1e-3;
    let f: Vec<f64> = (1..=4).map(|k| at_gap(k as f64 * h)).collect();
    let limit = 4.0 * f[0] - 6.0 * f[1] + 4.0 * f[2] - f[3];
    let near = kubo_mori_scalar(&[base[0], base[0] + 1e-9, base[1]], false).unwrap();
    assert!(near.is_finite());
    assert!(rel(near, limit) < 1e-6, "{near} vs {limit}");
}

#[test]
fn recurrences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in MetricKind::BUILTIN {
        let k = kernel(kind);
        for n in 3..=6 {
            let spectrum = random_spectrum(n, 10.0, &mut rng);
            let r = recurrence_check(&k, &spectrum).unwrap();
            assert!(r.leave_one_out < 1e-9, "{kind:?} n={n}: {r:?}");
            match r.triples {
                Some(t) => assert!(t < 1e-9),
                None => assert_eq!(n, 3),
            }
        }
    }
    assert!(recurrence_check(&kernel(MetricKind::Smallest), &[0.5, 0.5]).is_err());
}

#[test]
fn abc_crosscheck_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for kind in MetricKind::BUILTIN {
        let k = kernel(kind);
        for _ in 0..10 {
            let (x, y, z) = (
                rng.random_range(0.05..2.0),
                rng.random_range(0.05..2.0),
                rng.random_range(0.05..2.0),
            );
            let r = abc_crosscheck(&k, x, y, z).unwrap();
            assert!(r.lemma3_a < 1e-10, "{kind:?} {r:?}");
            assert!(r.lemma3_b < 1e-10, "{kind:?} {r:?}");
            assert!(r.b_vs_sectional < 1e-8, "{kind:?} {r:?}");
            assert!(r.c_vs_sectional < 1e-8, "{kind:?} {r:?}");
            assert!(r.c_xxy_vs_c < 1e-9, "{kind:?} {r:?}");
        }
        // coincident and nearly coincident arguments
        for (x, y, z) in [
            (0.4, 0.4, 0.4),
            (0.4, 0.4 * (1.0 + 1e-7), 0.9),
            (0.3, 0.7, 0.7),
        ] {
            let r = abc_crosscheck(&k, x, y, z).unwrap();
            assert!(
                r.b_vs_sectional < 1e-7 && r.c_vs_sectional < 1e-7,
                "{kind:?} {r:?}"
            );
        }
    }
}

#[test]
fn kernel_continuity_across_coincidence() {
    let custom = MorozovaChentsovFunction::custom(
        |x, y| (x + y) / (2.0 * x * y),
        |x, _| -0.5 / (x * x),
        |x, _| 1.0 / (x * x * x),
    );
    let kernels: Vec<HKernel> = MetricKind::BUILTIN
        .iter()
        .map(|&k| kernel(k))
        .chain(std::iter::once(HKernel::new(custom)))
        .collect();
    for k in &kernels {
        for which in [
            HFunction::H1,
            HFunction::H2,
            HFunction::H3,
            HFunction::H4,
            HFunction::H,
        ] {
            let (x, z) = (0.6, 1.3);
            let inside = k.eval(which, x * (1.0 + 0.999e-6), x, z);
            let outside = k.eval(which, x * (1.0 + 1.001e-6), x, z);
            assert!(
                (inside - outside).abs() < 1e-6 * inside.abs().max(1e-3),
                "{:?} {which:?}",
                k.mcfun().kind()
            );
        }
    }
}

#[test]
fn custom_largest_matches_builtin() {
    let custom = HKernel::new(MorozovaChentsovFunction::custom(
        |x, y| (x + y) / (2.0 * x * y),
        |x, _| -0.5 / (x * x),
        |x, _| 1.0 / (x * x * x),
    ));
    let spectrum = [0.1, 0.3, 0.3, 0.6];
    let a = scalar_theorem1(&custom, &spectrum).unwrap();
    let b = scalar_theorem1(&kernel(MetricKind::Largest), &spectrum).unwrap();
    assert!(rel(a, b) < 1e-8, "{a} vs {b}");
}

#[test]
fn h_eval_rejects_nonpositive() {
    let k = kernel(MetricKind::Smallest);
    assert!(h_eval(&k, HFunction::H, 0.0, 1.0, 1.0).is_err());
    assert!(h_diag(&k, -1.0).is_err());
    assert!(scalar_theorem1(&k, &[]).is_err());
}

#[test]
fn kernel_report_breakdown() {
    let k = kernel(MetricKind::KuboMori);
    let r = theorem1_report(&k, &[0.2, 0.3, 0.5]).unwrap();
    let t = r.kernel_sums.unwrap();
    let recombined = t.h1 - 0.5 * t.h2 + 2.0 * t.h3 - t.h4 - t.diagonal;
    assert!(rel(recombined, r.scalar) < 1e-12);
    assert!(r.scalar_normalized.is_some());
}

fn positive() -> impl Strategy<Value = f64> {
    (-4.0f64..4.0).prop_map(f64::exp)
}

fn kind_strategy() -> impl Strategy<Value = MetricKind> {
    prop_oneof![
        Just(MetricKind::Smallest),
        Just(MetricKind::Largest),
        Just(MetricKind::KuboMori)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_homogeneous(kind in kind_strategy(), x in positive(), y in positive(), z in positive(), t in positive()) {
        let k = kernel(kind);
        for which in [HFunction::H1, HFunction::H2, HFunction::H3, HFunction::H4, HFunction::H] {
            let a = k.eval(which, t * x, t * y, t * z);
            let b = k.eval(which, x, y, z) / t;
            let scale = (1.0 / x + 1.0 / y + 1.0 / z) / t;
            prop_assert!((a - b).abs() < 1e-10 * scale, "{:?} {:?}: {} vs {}", kind, which, a, b);
        }
    }

    #[test]
    fn symmetrization_does_not_change_the_sum(kind in kind_strategy(), s in prop::collection::vec(positive(), 2..6)) {
        let k = kernel(kind);
        let a = scalar_theorem1(&k, &s).unwrap();
        let b = scalar_theorem1_symmetrized(&k, &s).unwrap();
        let scale: f64 = s.iter().map(|x| 1.0 / x).sum::<f64>() * s.len() as f64;
        prop_assert!((a - b).abs() < 1e-10 * scale);
    }

    #[test]
    fn permutation_invariance_is_exact(kind in kind_strategy(), s in prop::collection::vec(positive(), 2..6), seed in any::<u64>()) {
        let k = kernel(kind);
        let mut shuffled = s.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(scalar_theorem1(&k, &s).unwrap(), scalar_theorem1(&k, &shuffled).unwrap());
    }

    #[test]
    fn normalization_round_trip(s in -100.0f64..100.0, n in 2usize..10) {
        prop_assert!((denormalize_scalar(normalize_scalar(s, n), n) - s).abs() < 1e-12 * (1.0 + s.abs() + (n * n * n * n) as f64));
    }
}

#[test]
fn make_builtin_kernels() {
    for kind in MetricKind::BUILTIN {
        assert_eq!(kernel(kind).mcfun().kind(), kind);
    }
    assert!(HKernel::builtin(MetricKind::Custom).is_err());
    let _ = make_builtin(MetricKind::Smallest).unwrap();
}
