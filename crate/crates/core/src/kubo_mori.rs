//! Numerically stable building blocks for the Kubo-Mori function
//! `c(x,y) = (ln x - ln y)/(x - y)`.
//!
//! Two representations are used:
//!
//! * the logarithmic derivative `x (ln c)'(x,y) = -Q(ln(y/x))` with
//!   `Q(u) = 1/u - 1/(e^u - 1)`, evaluated by its Bernoulli series near zero;
//! * divided differences of `ln` of order one and higher through
//!   `ln[x_0..x_k] = (-1)^(k+1) * integral_0^inf dt / prod(x_i + t)`, whose
//!   integrand is positive, so coincident or nearly coincident nodes cost
//!   nothing in accuracy.

use std::sync::OnceLock;

/// `B_{2k} / (2k)!` for k = 1..=10.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

/// Series radius below which `Q` and its divided differences use the
/// Bernoulli expansion (convergence radius is 2 pi).
const SERIES_RADIUS: f64 = 1.0;

/// `Q(u) = 1/u - 1/expm1(u)`, with `Q(0) = 1/2`.
pub(crate) fn q(u: f64) -> f64 {
    if u.abs() < SERIES_RADIUS {
        let u2 = u * u;
        let mut acc = 0.0;
        for a in BERNOULLI_OVER_FACTORIAL.iter().rev() {
            acc = acc * u2 + a;
        }
        0.5 - u * acc
    } else {
        1.0 / u - 1.0 / u.exp_m1()
    }
}

/// `expm1(g)/g`, equal to 1 at g = 0.
fn expm1_ratio(g: f64) -> f64 {
    if g == 0.0 {
        1.0
    } else {
        g.exp_m1() / g
    }
}

/// First divided difference `(Q(a) - Q(b))/(a - b)`, equal to `Q'(a)` when a = b.
pub(crate) fn q_divided(a: f64, b: f64) -> f64 {
    if (a - b).abs() > 0.5 {
        return (q(a) - q(b)) / (a - b);
    }
    if a.abs().max(b.abs()) < SERIES_RADIUS {
        // Q(u) = 1/2 - sum_k beta_k u^(2k-1); the divided difference of u^m
        // over (a, b) is the complete homogeneous sum h_{m-1}(a, b).
        let mut total = 0.0;
        let mut h = 1.0; // h_0(a, b)
        let mut a_pow = 1.0;
        for beta in BERNOULLI_OVER_FACTORIAL.iter() {
            total += beta * h;
            // h_m -> h_{m+2}
            for _ in 0..2 {
                a_pow *= a;
                h = b * h + a_pow;
            }
        }
        return -total;
    }
    // -1/(ab) + e^a expm1(b-a)/((b-a) expm1(a) expm1(b))
    let ea = a.exp_m1();
    let eb = b.exp_m1();
    -1.0 / (a * b) + a.exp() * expm1_ratio(b - a) / (ea * eb)
}

/// `ln(y/x)` computed without cancellation for nearby arguments.
pub(crate) fn log_ratio(y: f64, x: f64) -> f64 {
    let r = y / x;
    if (0.5..=2.0).contains(&r) {
        ((y - x) / x).ln_1p()
    } else {
        y.ln() - x.ln()
    }
}

/// Logarithmic mean reciprocal `(ln x - ln y)/(x - y)`.
pub(crate) fn log_mean_inverse(x: f64, y: f64) -> f64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    if lo == hi {
        return 1.0 / lo;
    }
    log_ratio(hi, lo) / (hi - lo)
}

/// `x (ln c)'(x, y)` for the Kubo-Mori function.
pub(crate) fn scaled_log_derivative(x: f64, y: f64) -> f64 {
    -q(log_ratio(y, x))
}

const GRID_STEP: f64 = 0.2;
const GRID_HALF_WIDTH: i64 = 1500;
const TAIL: f64 = 40.0;

fn exp_grid() -> &'static [f64] {
    static GRID: OnceLock<Vec<f64>> = OnceLock::new();
    GRID.get_or_init(|| {
        (-GRID_HALF_WIDTH..=GRID_HALF_WIDTH)
            .map(|k| (k as f64 * GRID_STEP).exp())
            .collect()
    })
}

/// `integral_0^inf dt / prod_i (x_i + t)` for at least two positive nodes.
///
/// Trapezoidal rule in `u = ln t`; the integrand is analytic in the strip
/// `|Im u| < pi`, so the rule converges geometrically in the step.
pub(crate) fn resolvent_product_integral(nodes: &[f64]) -> f64 {
    debug_assert!(nodes.len() >= 2);
    let m = nodes.len() as f64;
    let (lo, hi) = nodes.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    let u_lo = lo.ln() - TAIL;
    let u_hi = hi.ln() + TAIL / (m - 1.0);
    let k_lo = (u_lo / GRID_STEP).floor() as i64;
    let k_hi = (u_hi / GRID_STEP).ceil() as i64;
    let grid = exp_grid();
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in k_lo..=k_hi {
        let t = if k.abs() <= GRID_HALF_WIDTH {
            grid[(k + GRID_HALF_WIDTH) as usize]
        } else {
            (k as f64 * GRID_STEP).exp()
        };
        let mut denom = 1.0;
        for &x in nodes {
            denom *= x + t;
        }
        // Kahan summation of positive terms.
        let term = t / denom - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    sum * GRID_STEP
}
