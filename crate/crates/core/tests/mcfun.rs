use monocurv_core::mcfun::*;
use monocurv_core::Error;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn builtins() -> Vec<MorozovaChentsovFunction> {
    MetricKind::BUILTIN
        .iter()
        .map(|&k| make_builtin(k).unwrap())
        .collect()
}

fn log_uniform() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

/// Central difference with one Richardson level, used as an independent
/// check of the analytic partial derivatives.
fn numeric_dx(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-3 * x;
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

#[test]
fn reference_values() {
    assert!((MorozovaChentsovFunction::smallest().c(1.0, 3.0) - 0.5).abs() < 1e-15);
    for c in builtins() {
        assert!((c.c(2.0, 2.0) - 0.5).abs() < 1e-15);
    }
    let e = std::f64::consts::E;
    assert!(
        rel(
            MorozovaChentsovFunction::kubo_mori().c(1.0, e),
            1.0 / (e - 1.0)
        ) < 1e-14
    );
    assert!(
        (divided_diff_1(&MorozovaChentsovFunction::smallest(), 1.0, 3.0, 1.0).unwrap() + 0.25)
            .abs()
            < 1e-15
    );
}

#[test]
fn kubo_mori_diagonal_second_derivative_against_numeric_oracle() {
    // extrapolate c20(x, y) computed by differences of the raw quotient
    // from separated points towards the diagonal
    let raw = |x: f64, y: f64| (x.ln() - y.ln()) / (x - y);
    let km = MorozovaChentsovFunction::kubo_mori();
    for x in [0.5, 1.0, 3.0] {
        let at = |y: f64| {
            let h = 1e-3 * x;
            let d = |h: f64| (raw(x + h, y) - 2.0 * raw(x, y) + raw(x - h, y)) / (h * h);
            (4.0 * d(h / 2.0) - d(h)) / 3.0
        };
        let (g1, g2) = (0.2 * x, 0.1 * x);
        // linear extrapolation of c20(x, x + g) to g = 0 is second-order accurate here
        let extrapolated = (g1 * at(x + g2) - g2 * at(x + g1)) / (g1 - g2);
        let expected = 2.0 / (3.0 * x * x * x);
        assert!(
            rel(extrapolated, expected) < 2e-2,
            "{x}: {extrapolated} vs {expected}"
        );
        assert!(rel(km.c20(x, x), expected) < 1e-12);
    }
}

#[test]
fn analytic_derivatives_match_numeric() {
    for c in builtins() {
        for &(x, y) in &[(0.3, 2.0), (5.0, 0.7), (1.0, 1.0), (2.0, 2.0 + 1e-7)] {
            assert!(
                rel(c.c10(x, y), numeric_dx(|t| c.c(t, y), x)) < 1e-8,
                "{} c10 at {x},{y}",
                c.kind()
            );
            assert!(
                rel(c.c20(x, y), numeric_dx(|t| c.c10(t, y), x)) < 1e-7,
                "{} c20 at {x},{y}",
                c.kind()
            );
        }
    }
}

#[test]
fn log_grid_identities_hold_exactly_for_smallest() {
    let report = verify_identities(
        &MorozovaChentsovFunction::smallest(),
        &log_grid(1e-3, 1e3, 20),
    )
    .unwrap();
    assert_eq!(report.samples, 400);
    for id in Identity::ALL {
        assert!(report.residual(id) < 1e-12, "{id:?}");
    }
}

#[test]
fn kubo_mori_euler_identity_at_two_five() {
    let c = MorozovaChentsovFunction::kubo_mori();
    assert!((c.c(2.0, 5.0) + 2.0 * c.c10(2.0, 5.0) + 5.0 * c.c10(5.0, 2.0)).abs() < 1e-12);
}

#[test]
fn asymmetric_custom_function_is_reported() {
    let c = MorozovaChentsovFunction::custom(
        |x, y| 2.0 / (x + y) * (1.0 + 0.1 * (x - y) / (x + y)),
        |x, y| -2.0 / (x + y).powi(2),
        |x, y| 4.0 / (x + y).powi(3),
    );
    let report = verify_identities(&c, &log_grid(0.1, 10.0, 5)).unwrap();
    assert!(!report.is_clean());
    assert!(report.residual(Identity::Symmetry) > 1e-3);
    assert!(report
        .violations
        .iter()
        .any(|v| v.identity == Identity::Symmetry));
}

#[test]
fn non_positive_arguments_are_rejected() {
    let c = MorozovaChentsovFunction::smallest();
    assert!(matches!(
        divided_diff_1(&c, 0.0, 1.0, 1.0),
        Err(Error::NonPositive(_))
    ));
    assert!(matches!(
        verify_identities(&c, &[(1.0, -2.0)]),
        Err(Error::NonPositive(_))
    ));
    assert!(matches!(
        make_builtin(MetricKind::Custom),
        Err(Error::NotBuiltin(_))
    ));
}

#[test]
fn divided_difference_is_continuous_across_the_band() {
    for c in builtins() {
        for &(x, y) in &[(1.0, 0.4), (7.0, 20.0)] {
            let inside = c.dd1(x * (1.0 + COINCIDENCE * (1.0 - 1e-3)), x, y);
            let outside = c.dd1(x * (1.0 + COINCIDENCE * (1.0 + 1e-3)), x, y);
            assert!(rel(inside, outside) < 1e-6, "{}", c.kind());
            let close = divided_diff_1(&c, x + 1e-14, x, y).unwrap();
            assert!(rel(close, c.c10(x, y)) < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn builtin_identities_hold(x in log_uniform(), y in log_uniform()) {
        for c in builtins() {
            let report = verify_identities(&c, &[(x, y)]).unwrap();
            prop_assert!(report.is_clean(), "{}: {:?}", c.kind(), report.violations);
        }
    }

    #[test]
    fn logarithmic_euler_identity(x in log_uniform(), y in log_uniform()) {
        for c in builtins() {
            prop_assert!((x * c.lnc10(x, y) + y * c.lnc10(y, x) + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_divided_difference_is_c10(x in log_uniform()) {
        for c in builtins() {
            prop_assert!(rel(divided_diff_1(&c, x, x, x).unwrap(), -0.5 / (x * x)) < 1e-10);
        }
    }
}
