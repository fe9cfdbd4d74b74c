//! Morozova-Chentsov functions `c(x, y) = 1/(f(x/y) y)` of monotone metrics.
//!
//! Besides the function itself and its first and second partial
//! derivatives, every [`MorozovaChentsovFunction`] provides the divided
//! differences that replace resolvent contour integrals when the metric,
//! its flat derivatives and the Christoffel tensor are evaluated in the
//! eigenbasis of a density matrix:
//!
//! * `dd1(a, b; y)`   = `(c(a,y) - c(b,y))/(a - b)`
//! * `dd2(a, b, d; y)` second divided difference in the first argument
//! * `ddm(a, b; d, e)` mixed divided difference, first argument over
//!   `{a, b}`, second over `{d, e}`
//!
//! Built-in metrics carry closed forms that are exact at coincident nodes.
//! Custom functions fall back to quotients away from coincidence and to the
//! supplied analytic derivatives inside the coincidence band.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::kubo_mori;

/// Relative width of the coincidence band: `|a - b| <= COINCIDENCE * max(a, b)`.
pub const COINCIDENCE: f64 = 1e-6;

/// Relative tolerance above which [`verify_identities`] records a violation.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// `c(x,y) = 2/(x+y)`, the Bures metric.
    Smallest,
    /// `c(x,y) = (x+y)/(2xy)`.
    Largest,
    /// `c(x,y) = (ln x - ln y)/(x-y)`.
    KuboMori,
    Custom,
}

impl MetricKind {
    pub const BUILTIN: [MetricKind; 3] = [
        MetricKind::Smallest,
        MetricKind::Largest,
        MetricKind::KuboMori,
    ];
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MetricKind::Smallest => "smallest",
            MetricKind::Largest => "largest",
            MetricKind::KuboMori => "kubo-mori",
            MetricKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

pub type Bivariate = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
struct CustomParts {
    c: Bivariate,
    c10: Bivariate,
    c20: Bivariate,
}

/// A Morozova-Chentsov function together with its partial derivatives.
///
/// All evaluation methods expect strictly positive arguments; the checked
/// entry points of this module reject anything else.
#[derive(Clone)]
pub struct MorozovaChentsovFunction {
    kind: MetricKind,
    custom: Option<CustomParts>,
}

impl fmt::Debug for MorozovaChentsovFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MorozovaChentsovFunction")
            .field("kind", &self.kind)
            .finish()
    }
}

/// Builds one of the three built-in functions.
pub fn make_builtin(kind: MetricKind) -> Result<MorozovaChentsovFunction> {
    match kind {
        MetricKind::Custom => Err(Error::NotBuiltin(kind)),
        _ => Ok(MorozovaChentsovFunction { kind, custom: None }),
    }
}

fn coincident(a: f64, b: f64) -> bool {
    (a - b).abs() <= COINCIDENCE * a.max(b)
}

impl MorozovaChentsovFunction {
    pub fn smallest() -> Self {
        Self {
            kind: MetricKind::Smallest,
            custom: None,
        }
    }

    pub fn largest() -> Self {
        Self {
            kind: MetricKind::Largest,
            custom: None,
        }
    }

    pub fn kubo_mori() -> Self {
        Self {
            kind: MetricKind::KuboMori,
            custom: None,
        }
    }

    /// A user supplied function with analytic `∂c/∂x` and `∂²c/∂x²`.
    pub fn custom<C, C10, C20>(c: C, c10: C10, c20: C20) -> Self
    where
        C: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        C10: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        C20: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: MetricKind::Custom,
            custom: Some(CustomParts {
                c: Arc::new(c),
                c10: Arc::new(c10),
                c20: Arc::new(c20),
            }),
        }
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    fn parts(&self) -> &CustomParts {
        self.custom
            .as_ref()
            .expect("custom kind always carries its parts")
    }

    pub fn c(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => 2.0 / (x + y),
            MetricKind::Largest => (x + y) / (2.0 * x * y),
            MetricKind::KuboMori => kubo_mori::log_mean_inverse(x, y),
            MetricKind::Custom => (self.parts().c)(x, y),
        }
    }

    /// `∂c/∂x`.
    pub fn c10(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => {
                let s = x + y;
                -2.0 / (s * s)
            }
            MetricKind::Largest => -0.5 / (x * x),
            MetricKind::KuboMori => {
                let t = (x - y) / y;
                if t.abs() <= KM_SERIES_RADIUS {
                    km_series(t, 1) / (y * y)
                } else {
                    (1.0 / x - self.c(x, y)) / (x - y)
                }
            }
            MetricKind::Custom => (self.parts().c10)(x, y),
        }
    }

    /// `∂²c/∂x²`.
    pub fn c20(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => {
                let s = x + y;
                4.0 / (s * s * s)
            }
            MetricKind::Largest => 1.0 / (x * x * x),
            MetricKind::KuboMori => {
                let t = (x - y) / y;
                if t.abs() <= KM_SERIES_RADIUS {
                    km_series(t, 2) / (y * y * y)
                } else {
                    (-1.0 / (x * x) - 2.0 * self.c10(x, y)) / (x - y)
                }
            }
            MetricKind::Custom => (self.parts().c20)(x, y),
        }
    }

    /// `∂c/∂y`, by symmetry `c10(y, x)`.
    pub fn c01(&self, x: f64, y: f64) -> f64 {
        self.c10(y, x)
    }

    /// Mixed derivative from the homogeneity identity `2c' + y c11 + x c'' = 0`.
    pub fn c11(&self, x: f64, y: f64) -> f64 {
        -(2.0 * self.c10(x, y) + x * self.c20(x, y)) / y
    }

    /// `(ln c)'(x, y) = c10(x, y)/c(x, y)`.
    pub fn lnc10(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => -1.0 / (x + y),
            MetricKind::Largest => -y / (x * (x + y)),
            MetricKind::KuboMori => kubo_mori::scaled_log_derivative(x, y) / x,
            MetricKind::Custom => self.c10(x, y) / self.c(x, y),
        }
    }

    /// First divided difference in the first argument, `c[a, b; y]`.
    pub fn dd1(&self, a: f64, b: f64, y: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => -2.0 / ((a + y) * (b + y)),
            MetricKind::Largest => -0.5 / (a * b),
            MetricKind::KuboMori => -kubo_mori::resolvent_product_integral(&[a, b, y]),
            MetricKind::Custom => {
                if coincident(a, b) {
                    // midpoint expansion: the c'' terms cancel, error O((a-b)^2)
                    self.c10(0.5 * (a + b), y)
                } else {
                    (self.c(a, y) - self.c(b, y)) / (a - b)
                }
            }
        }
    }

    /// Second divided difference in the first argument, `c[a, b, d; y]`.
    pub fn dd2(&self, a: f64, b: f64, d: f64, y: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => 2.0 / ((a + y) * (b + y) * (d + y)),
            MetricKind::Largest => 0.5 / (a * b * d),
            MetricKind::KuboMori => kubo_mori::resolvent_product_integral(&[a, b, d, y]),
            MetricKind::Custom => {
                let mut s = [a, b, d];
                s.sort_by(f64::total_cmp);
                if coincident(s[0], s[2]) {
                    0.5 * self.c20(s[1], y)
                } else {
                    (self.dd1(s[0], s[1], y) - self.dd1(s[1], s[2], y)) / (s[0] - s[2])
                }
            }
        }
    }

    /// Mixed divided difference `c[a, b; d, e]`.
    pub fn ddm(&self, a: f64, b: f64, d: f64, e: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => 2.0 * (a + b + d + e) / ((a + d) * (b + d) * (a + e) * (b + e)),
            MetricKind::Largest => 0.0,
            MetricKind::KuboMori => kubo_mori::resolvent_product_integral(&[a, b, d, e]),
            MetricKind::Custom => {
                let first = coincident(a, b);
                let second = coincident(d, e);
                match (first, second) {
                    (true, true) => self.c11(0.5 * (a + b), 0.5 * (d + e)),
                    (true, false) => {
                        let m = 0.5 * (a + b);
                        (self.c10(m, d) - self.c10(m, e)) / (d - e)
                    }
                    (false, true) => {
                        let m = 0.5 * (d + e);
                        (self.c10(m, a) - self.c10(m, b)) / (a - b)
                    }
                    (false, false) => (self.dd1(a, b, d) - self.dd1(a, b, e)) / (d - e),
                }
            }
        }
    }

    /// Divided difference of `w -> (ln c)'(z, w)` over `{x, y}`.
    pub fn lnc10_dd(&self, z: f64, x: f64, y: f64) -> f64 {
        match self.kind {
            MetricKind::Smallest => 1.0 / ((z + x) * (z + y)),
            MetricKind::Largest => -1.0 / ((z + x) * (z + y)),
            MetricKind::KuboMori => {
                // (ln c)'(z, w) = -Q(ln(w/z))/z and ln[x, y] = c(x, y)
                let ux = kubo_mori::log_ratio(x, z);
                let uy = kubo_mori::log_ratio(y, z);
                -kubo_mori::q_divided(ux, uy) * self.c(x, y) / z
            }
            MetricKind::Custom => {
                if coincident(x, y) {
                    let w = 0.5 * (x + y);
                    let c = self.c(z, w);
                    self.c11(z, w) / c - self.c10(z, w) * self.c01(z, w) / (c * c)
                } else {
                    (self.lnc10(z, x) - self.lnc10(z, y)) / (x - y)
                }
            }
        }
    }
}

/// Expansion radius in `t = (x - y)/y` for the Kubo-Mori derivatives.
const KM_SERIES_RADIUS: f64 = 0.25;
const KM_SERIES_TERMS: usize = 48;

/// `y^(order+1) ∂^order c(y(1+t), y)` from `c(y+u, y) = (1/y) sum (-t)^k/(k+1)`.
fn km_series(t: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for k in (order..KM_SERIES_TERMS).rev() {
        let mut falling = 1.0;
        for j in 0..order {
            falling *= (k - j) as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * t + sign * falling / (k + 1) as f64;
    }
    acc
}

/// Checked first divided difference in the first argument.
pub fn divided_diff_1(c: &MorozovaChentsovFunction, a: f64, b: f64, y: f64) -> Result<f64> {
    check_positive(a)?;
    check_positive(b)?;
    check_positive(y)?;
    Ok(c.dd1(a, b, y))
}

/// The six defining identities of a Morozova-Chentsov function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Symmetry,
    Homogeneity,
    Diagonal,
    DiagonalDerivative,
    Euler,
    SecondOrder,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::Symmetry,
        Identity::Homogeneity,
        Identity::Diagonal,
        Identity::DiagonalDerivative,
        Identity::Euler,
        Identity::SecondOrder,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityViolation {
    pub identity: Identity,
    pub x: f64,
    pub y: f64,
    pub residual: f64,
}

/// Maximum relative residual of each identity over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub max_residual: Vec<(Identity, f64)>,
    pub violations: Vec<IdentityViolation>,
}

impl IdentityReport {
    pub fn residual(&self, identity: Identity) -> f64 {
        self.max_residual
            .iter()
            .find(|(id, _)| *id == identity)
            .map(|(_, r)| *r)
            .unwrap_or(0.0)
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual.abs() / scale
    } else {
        residual.abs()
    }
}

/// Scale factors used for the homogeneity identity `c(x,y) = t c(tx, ty)`.
const HOMOGENEITY_FACTORS: [f64; 3] = [0.37, 2.0, 11.5];

fn identity_residuals(c: &MorozovaChentsovFunction, x: f64, y: f64) -> [(Identity, f64); 6] {
    let cxy = c.c(x, y);
    let cyx = c.c(y, x);
    let symmetry = relative(cxy - cyx, cxy.abs());
    let homogeneity = HOMOGENEITY_FACTORS
        .iter()
        .map(|&t| relative(cxy - t * c.c(t * x, t * y), cxy.abs()))
        .fold(0.0, f64::max);
    let diagonal = relative(c.c(x, x) - 1.0 / x, 1.0 / x);
    let diagonal_derivative = relative(c.c10(x, x) + 0.5 / (x * x), 0.5 / (x * x));
    let (dx, dy) = (c.c10(x, y), c.c10(y, x));
    let euler = relative(
        cxy + x * dx + y * dy,
        cxy.abs() + (x * dx).abs() + (y * dy).abs(),
    );
    let (ddx, ddy) = (c.c20(x, y), c.c20(y, x));
    let lhs = 2.0 * x * dx + x * x * ddx;
    let rhs = 2.0 * y * dy + y * y * ddy;
    let second = relative(
        lhs - rhs,
        (2.0 * x * dx).abs() + (x * x * ddx).abs() + (2.0 * y * dy).abs() + (y * y * ddy).abs(),
    );
    [
        (Identity::Symmetry, symmetry),
        (Identity::Homogeneity, homogeneity),
        (Identity::Diagonal, diagonal),
        (Identity::DiagonalDerivative, diagonal_derivative),
        (Identity::Euler, euler),
        (Identity::SecondOrder, second),
    ]
}

/// Evaluates the symmetry, homogeneity, diagonal, diagonal-derivative,
/// Euler and second-order identities on every sample; residuals above
/// [`IDENTITY_TOLERANCE`] are listed as violations.
pub fn verify_identities(
    c: &MorozovaChentsovFunction,
    samples: &[(f64, f64)],
) -> Result<IdentityReport> {
    let mut max_residual: Vec<(Identity, f64)> =
        Identity::ALL.iter().map(|&id| (id, 0.0)).collect();
    let mut violations = Vec::new();
    for &(x, y) in samples {
        check_positive(x)?;
        check_positive(y)?;
        for (slot, (identity, residual)) in max_residual.iter_mut().zip(identity_residuals(c, x, y))
        {
            // NaN counts as a violation
            if residual.is_nan() || residual > slot.1 {
                slot.1 = if residual.is_nan() {
                    f64::INFINITY
                } else {
                    residual
                };
            }
            if !(residual <= IDENTITY_TOLERANCE) {
                violations.push(IdentityViolation {
                    identity,
                    x,
                    y,
                    residual,
                });
            }
        }
    }
    Ok(IdentityReport {
        samples: samples.len(),
        max_residual,
        violations,
    })
}

/// `count x count` log-spaced grid over `[lo, hi]^2`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
    let points: Vec<f64> = if count == 1 {
        vec![(lo * hi).sqrt()]
    } else {
        let (a, b) = (lo.ln(), hi.ln());
        (0..count)
            .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
            .collect()
    };
    points
        .iter()
        .flat_map(|&x| points.iter().map(move |&y| (x, y)))
        .collect()
}
