//! Scalar curvature as a sum over eigenvalue triples, and the closed forms
//! for the three built-in metrics.
//!
//! The triple kernels `h1..h4` are written through the divided differences
//! of [`MorozovaChentsovFunction`], which keeps them finite and accurate at
//! coincident eigenvalues:
//!
//! ```text
//! h1(x,y,z) = (c[x,z; y,z] - z c[x,z; z] c[y,z; z]) / (c(x,z) c(y,z))
//! h2(x,y,z) = c[x,y; z]^2 / (c(x,y) c(x,z) c(y,z))
//! h3(x,y,z) = z (ln c)'(z, .)[x, y]
//! h4(x,y,z) = z (ln c)'(z,x) (ln c)'(z,y)
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::geometry::{sectional, MetricContext};
use crate::kubo_mori;
use crate::mcfun::{make_builtin, MetricKind, MorozovaChentsovFunction};
use crate::states::{BasisLabel, TangentVector};

/// Relative gap below which the two-point formulas for `B` and `C(x,x,y)`
/// switch to the coincidence-safe triple-kernel representation.
pub const PAIR_COINCIDENCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HFunction {
    H1,
    H2,
    H3,
    H4,
    H,
}

/// The triple kernels of one Morozova-Chentsov function.
#[derive(Debug, Clone)]
pub struct HKernel {
    c: MorozovaChentsovFunction,
}

impl HKernel {
    pub fn new(c: MorozovaChentsovFunction) -> Self {
        Self { c }
    }

    pub fn builtin(kind: MetricKind) -> Result<Self> {
        Ok(Self::new(make_builtin(kind)?))
    }

    pub fn mcfun(&self) -> &MorozovaChentsovFunction {
        &self.c
    }

    pub fn h1(&self, x: f64, y: f64, z: f64) -> f64 {
        let c = &self.c;
        (c.ddm(x, z, y, z) - z * c.dd1(x, z, z) * c.dd1(y, z, z)) / (c.c(x, z) * c.c(y, z))
    }

    pub fn h2(&self, x: f64, y: f64, z: f64) -> f64 {
        let c = &self.c;
        let d = c.dd1(x, y, z);
        d * d / (c.c(x, y) * c.c(x, z) * c.c(y, z))
    }

    pub fn h3(&self, x: f64, y: f64, z: f64) -> f64 {
        z * self.c.lnc10_dd(z, x, y)
    }

    pub fn h4(&self, x: f64, y: f64, z: f64) -> f64 {
        z * self.c.lnc10(z, x) * self.c.lnc10(z, y)
    }

    /// `h = h1 - h2/2 + 2 h3 - h4`.
    pub fn h(&self, x: f64, y: f64, z: f64) -> f64 {
        self.h1(x, y, z) - 0.5 * self.h2(x, y, z) + 2.0 * self.h3(x, y, z) - self.h4(x, y, z)
    }

    pub fn eval(&self, which: HFunction, x: f64, y: f64, z: f64) -> f64 {
        match which {
            HFunction::H1 => self.h1(x, y, z),
            HFunction::H2 => self.h2(x, y, z),
            HFunction::H3 => self.h3(x, y, z),
            HFunction::H4 => self.h4(x, y, z),
            HFunction::H => self.h(x, y, z),
        }
    }

    /// `h(x,x,x) = 15/(8x) - 3 x^2 c''(x,x)`.
    pub fn h_diag(&self, x: f64) -> f64 {
        15.0 / (8.0 * x) - 3.0 * x * x * self.c.c20(x, x)
    }

    /// Cyclic symmetrization `(h(x,y,z) + h(y,z,x) + h(z,x,y))/3`.
    pub fn h_sym(&self, x: f64, y: f64, z: f64) -> f64 {
        (self.h(x, y, z) + self.h(y, z, x) + self.h(z, x, y)) / 3.0
    }

    /// Second-order part of `C`, one half of the `{x <-> y}` bracket.
    fn c_bracket(&self, x: f64, y: f64, z: f64) -> f64 {
        let c = &self.c;
        -(c.dd2(x, z, z, y) - z * c.c10(z, y) * c.dd1(x, z, z)) / (2.0 * c.c(x, z) * c.c(y, z))
    }

    /// `C(x,y,z)`, the sectional curvature of the plane `(b_13, b_23)` at
    /// `diag(x,y,z)`.
    pub fn lemma_c(&self, x: f64, y: f64, z: f64) -> f64 {
        0.25 * (3.0 * self.h1(x, y, z) - self.h1(y, z, x) - self.h1(z, x, y))
            + 0.125 * (self.h2(x, y, z) + self.h2(y, z, x) + self.h2(z, x, y))
            - 0.25 * self.h4(x, y, z)
            + self.c_bracket(x, y, z)
            + self.c_bracket(y, x, z)
    }

    /// `(2 - (x+y) c(x,y)) / ((x-y)^2 c(x,y))` without cancellation.
    fn mean_defect(&self, x: f64, y: f64) -> f64 {
        let c = &self.c;
        (c.dd1(x, y, x) + y * c.ddm(x, y, x, y)) / c.c(x, y)
    }

    /// `(x (ln c)'(x,y) - y (ln c)'(y,x)) / (x - y)`, separated arguments only.
    fn log_derivative_slope(&self, x: f64, y: f64) -> f64 {
        (x * self.c.lnc10(x, y) - y * self.c.lnc10(y, x)) / (x - y)
    }

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= PAIR_COINCIDENCE * x.max(y)
    }

    /// `B(x,y)`, the sectional curvature of `(b_12, b~_12)` at `diag(x,y)`.
    pub fn lemma_b(&self, x: f64, y: f64) -> f64 {
        if Self::close(x, y) {
            return 2.0 * self.lemma_c(x, x, y) + 2.0 * self.lemma_c(y, y, x);
        }
        let (lx, ly) = (self.c.lnc10(x, y), self.c.lnc10(y, x));
        self.mean_defect(x, y)
            - 0.25 * x * lx * lx
            - 0.25 * y * ly * ly
            - self.log_derivative_slope(x, y)
    }

    /// The two-point closed form of `C(x,x,y)`.
    pub fn c_xxy(&self, x: f64, y: f64) -> f64 {
        if Self::close(x, y) {
            return self.lemma_c(x, x, y);
        }
        let (lx, ly) = (self.c.lnc10(x, y), self.c.lnc10(y, x));
        0.25 * self.mean_defect(x, y) + 0.125 * x * lx * lx
            - 0.25 * y * ly * ly
            - 0.25 * self.log_derivative_slope(x, y)
    }
}

pub fn h_eval(k: &HKernel, which: HFunction, x: f64, y: f64, z: f64) -> Result<f64> {
    check_positive(x)?;
    check_positive(y)?;
    check_positive(z)?;
    Ok(k.eval(which, x, y, z))
}

pub fn h_diag(k: &HKernel, x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(k.h_diag(x))
}

fn checked_sorted(spectrum: &[f64]) -> Result<Vec<f64>> {
    if spectrum.is_empty() {
        return Err(Error::DimensionTooSmall { min: 1, found: 0 });
    }
    for &x in spectrum {
        check_positive(x)?;
    }
    let mut s = spectrum.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// `sum_{x,y,z} f(x,y,z) - sum_x diag(x)` over a sorted spectrum.
fn triple_sum(s: &[f64], f: impl Fn(f64, f64, f64) -> f64, diag: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for &x in s {
        for &y in s {
            for &z in s {
                total += f(x, y, z);
            }
        }
    }
    total - s.iter().map(|&x| diag(x)).sum::<f64>()
}

/// Scalar curvature of the full manifold of positive matrices at any state
/// with the given spectrum. The spectrum is sorted first, so the result is
/// exactly invariant under reordering.
pub fn scalar_theorem1(k: &HKernel, spectrum: &[f64]) -> Result<f64> {
    let s = checked_sorted(spectrum)?;
    Ok(triple_sum(&s, |x, y, z| k.h(x, y, z), |x| k.h_diag(x)))
}

/// Same sum with `h` replaced by its cyclic symmetrization.
pub fn scalar_theorem1_symmetrized(k: &HKernel, spectrum: &[f64]) -> Result<f64> {
    let s = checked_sorted(spectrum)?;
    Ok(triple_sum(&s, |x, y, z| k.h_sym(x, y, z), |x| k.h_diag(x)))
}

/// Offset between the curvature of the unit-trace states and of the full manifold.
pub fn normalization_shift(n: usize) -> f64 {
    let m = (n * n) as f64;
    (m - 1.0) * (m - 2.0) / 4.0
}

/// `S¹ = S + (n²-1)(n²-2)/4`.
pub fn normalize_scalar(s: f64, n: usize) -> f64 {
    s + normalization_shift(n)
}

pub fn denormalize_scalar(s1: f64, n: usize) -> f64 {
    s1 - normalization_shift(n)
}

/// `S¹` at the trace state `I/n` from the value of `c''(1/n, 1/n)`.
pub fn trace_state_scalar(k: &HKernel, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    let nf = n as f64;
    let c20 = k.c.c20(1.0 / nf, 1.0 / nf);
    Ok((nf * nf - 1.0) * (17.0 * nf * nf * nf - 4.0 * nf - 24.0 * c20) / (8.0 * nf))
}

/// Polynomial closed forms of [`trace_state_scalar`] for the built-ins.
pub fn trace_state_closed_form(kind: MetricKind, n: usize) -> Option<f64> {
    let m = (n * n) as f64;
    match kind {
        MetricKind::Smallest => Some((m - 1.0) * (5.0 * m - 4.0) / 8.0),
        MetricKind::Largest => Some((1.0 - m) * (7.0 * m + 4.0) / 8.0),
        MetricKind::KuboMori => Some((m - 1.0) * (m - 4.0) / 8.0),
        MetricKind::Custom => None,
    }
}

/// Residuals of the two subspectrum recurrences, relative to the sum of
/// the absolute values of the terms involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceResiduals {
    /// `(n-3) S(all) = sum_i S(without i) - sum_{i<j} S(i,j)`
    pub leave_one_out: f64,
    /// `S(all) = sum_{i<j<k} S(i,j,k) - (n-3) sum_{i<j} S(i,j)`; only for `n > 3`.
    pub triples: Option<f64>,
}

/// Evaluates both recurrences with the symmetrized kernel on a shared
/// table of its values.
pub fn recurrence_check(k: &HKernel, spectrum: &[f64]) -> Result<RecurrenceResiduals> {
    let n = spectrum.len();
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, found: n });
    }
    let s = checked_sorted(spectrum)?;
    let mut h = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                h[(i * n + j) * n + l] = k.h(s[i], s[j], s[l]);
            }
        }
    }
    let hs = |i: usize, j: usize, l: usize| {
        (h[(i * n + j) * n + l] + h[(j * n + l) * n + i] + h[(l * n + i) * n + j]) / 3.0
    };
    let diag: Vec<f64> = s.iter().map(|&x| k.h_diag(x)).collect();
    let sub = |idx: &[usize]| -> f64 {
        let mut t = 0.0;
        for &i in idx {
            for &j in idx {
                for &l in idx {
                    t += hs(i, j, l);
                }
            }
        }
        t - idx.iter().map(|&i| diag[i]).sum::<f64>()
    };
    let all: Vec<usize> = (0..n).collect();
    let s_all = sub(&all);
    let nm3 = (n - 3) as f64;

    let mut pair_sum = 0.0;
    let mut pair_abs = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = sub(&[i, j]);
            pair_sum += v;
            pair_abs += v.abs();
        }
    }
    let mut loo_sum = 0.0;
    let mut loo_abs = 0.0;
    for i in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let v = sub(&rest);
        loo_sum += v;
        loo_abs += v.abs();
    }
    let lhs = nm3 * s_all;
    let leave_one_out = (lhs - (loo_sum - pair_sum)).abs() / (lhs.abs() + loo_abs + pair_abs);

    let triples = if n > 3 {
        let mut tri_sum = 0.0;
        let mut tri_abs = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                for l in (j + 1)..n {
                    let v = sub(&[i, j, l]);
                    tri_sum += v;
                    tri_abs += v.abs();
                }
            }
        }
        let rhs = tri_sum - nm3 * pair_sum;
        Some((s_all - rhs).abs() / (s_all.abs() + tri_abs + nm3 * pair_abs))
    } else {
        None
    };
    Ok(RecurrenceResiduals {
        leave_one_out,
        triples,
    })
}

/// Two-point and three-point curvature functions and their consistency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcReport {
    /// `A(x,y) = K(b_11, b_12)` at `diag(x,y)`, from the curvature tensor.
    pub a_sectional: f64,
    pub b_formula: f64,
    pub b_sectional: f64,
    pub c_formula: f64,
    pub c_sectional: f64,
    pub c_xxy_formula: f64,
    /// `|A - 2 C(x,y,x)|`, relative.
    pub lemma3_a: f64,
    /// `|B - 2 C(x,x,y) - 2 C(y,y,x)|` with the two-point closed forms, relative.
    pub lemma3_b: f64,
    pub b_vs_sectional: f64,
    pub c_vs_sectional: f64,
    /// Two-point `C(x,x,y)` against the triple formula at `(x,x,y)`.
    pub c_xxy_vs_c: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn sectional_at(
    c: &MorozovaChentsovFunction,
    spectrum: &[f64],
    a: BasisLabel,
    b: BasisLabel,
) -> Result<f64> {
    let n = spectrum.len();
    let ctx = MetricContext::diagonal(c.clone(), spectrum)?;
    let x = TangentVector::new(a.matrix(n))?;
    let y = TangentVector::new(b.matrix(n))?;
    Ok(sectional(&ctx, &x, &y, false)?.value)
}

/// Compares the closed forms for `A`, `B`, `C` with sectional curvatures
/// computed from the curvature tensor at diagonal states.
pub fn abc_crosscheck(k: &HKernel, x: f64, y: f64, z: f64) -> Result<AbcReport> {
    check_positive(x)?;
    check_positive(y)?;
    check_positive(z)?;
    let a_sectional = sectional_at(
        &k.c,
        &[x, y],
        BasisLabel::Diagonal(0),
        BasisLabel::Real(0, 1),
    )?;
    let b_sectional = sectional_at(
        &k.c,
        &[x, y],
        BasisLabel::Real(0, 1),
        BasisLabel::Imaginary(0, 1),
    )?;
    let c_sectional = sectional_at(
        &k.c,
        &[x, y, z],
        BasisLabel::Real(0, 2),
        BasisLabel::Real(1, 2),
    )?;
    let b_formula = k.lemma_b(x, y);
    let c_formula = k.lemma_c(x, y, z);
    let c_xxy_formula = k.c_xxy(x, y);
    Ok(AbcReport {
        a_sectional,
        b_formula,
        b_sectional,
        c_formula,
        c_sectional,
        c_xxy_formula,
        lemma3_a: rel(a_sectional, 2.0 * k.lemma_c(x, y, x)),
        lemma3_b: rel(b_formula, 2.0 * c_xxy_formula + 2.0 * k.c_xxy(y, x)),
        b_vs_sectional: rel(b_formula, b_sectional),
        c_vs_sectional: rel(c_formula, c_sectional),
        c_xxy_vs_c: rel(c_xxy_formula, k.lemma_c(x, x, y)),
    })
}

/// Closed form for the smallest (Bures) metric,
/// `(3/2) sum z/((x+z)(y+z)) - (3/8) sum 1/x`.
pub fn bures_scalar(spectrum: &[f64]) -> Result<f64> {
    let s = checked_sorted(spectrum)?;
    let mut total = 0.0;
    for &z in &s {
        let inner: f64 = s.iter().map(|&x| 1.0 / (x + z)).sum();
        total += z * inner * inner;
    }
    Ok(1.5 * total - 0.375 * s.iter().map(|x| 1.0 / x).sum::<f64>())
}

/// Closed form for the largest metric,
/// `-(5/2) sum_z z (sum_x 1/(x+z))^2 + n sum 1/(x+z) + (9/8 - n^2) sum 1/x`.
pub fn largest_scalar(spectrum: &[f64]) -> Result<f64> {
    let s = checked_sorted(spectrum)?;
    let n = s.len() as f64;
    let mut quad = 0.0;
    let mut lin = 0.0;
    for &z in &s {
        let inner: f64 = s.iter().map(|&x| 1.0 / (x + z)).sum();
        quad += z * inner * inner;
        lin += inner;
    }
    let inv: f64 = s.iter().map(|x| 1.0 / x).sum();
    Ok(-2.5 * quad + n * lin + (9.0 / 8.0 - n * n) * inv)
}

/// Elementary symmetric polynomials `e_0..e_n`.
pub fn elementary_symmetric(spectrum: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; spectrum.len() + 1];
    e[0] = 1.0;
    for (m, &x) in spectrum.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Companion matrix of `prod (t - l_i)`, built from the elementary
/// symmetric polynomials only.
pub fn companion_matrix(e: &[f64]) -> DMatrix<f64> {
    let n = e.len() - 1;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        let sign = if (n - j) % 2 == 1 { 1.0 } else { -1.0 };
        m[(n - 1, j)] = sign * e[n - j];
    }
    m
}

/// Pivot ratio below which a matrix counts as numerically singular.
const SINGULAR_PIVOT: f64 = 1e-14;

fn lu_checked(m: DMatrix<f64>) -> Result<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let lu = m.lu();
    let u = lu.u();
    let (lo, hi) = u
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v.abs()), hi.max(v.abs()))
        });
    if !(lo > SINGULAR_PIVOT * hi) {
        return Err(Error::SingularCompanion);
    }
    Ok(lu)
}

/// The largest-metric closed form evaluated through matrix functions of the
/// companion matrix `E`: with `P = sum_i e_{n-i} E^i` and
/// `P' = sum_i i e_{n-i} E^{i-1}`, `M = P^{-1} P'` equals
/// `sum_x (x + E)^{-1}` and
/// `S = -(5/2) Tr(E M^2) + n Tr M + (9/8 - n^2) Tr E^{-1}`.
pub fn largest_scalar_companion(spectrum: &[f64]) -> Result<f64> {
    let s = checked_sorted(spectrum)?;
    let n = s.len();
    let e = elementary_symmetric(&s);
    let comp = companion_matrix(&e);
    let id = DMatrix::<f64>::identity(n, n);
    // Horner in E for P and P'
    let mut p = DMatrix::<f64>::zeros(n, n);
    for i in (0..=n).rev() {
        p = &p * &comp + &id * e[n - i];
    }
    let mut dp = DMatrix::<f64>::zeros(n, n);
    for i in (1..=n).rev() {
        dp = &dp * &comp + &id * (i as f64 * e[n - i]);
    }
    let m = lu_checked(p)?.solve(&dp).ok_or(Error::SingularCompanion)?;
    let einv_trace = lu_checked(comp.clone())?
        .solve(&id)
        .ok_or(Error::SingularCompanion)?
        .trace();
    let nf = n as f64;
    let value =
        -2.5 * (&comp * &m * &m).trace() + nf * m.trace() + (9.0 / 8.0 - nf * nf) * einv_trace;
    if !value.is_finite() {
        return Err(Error::SingularCompanion);
    }
    Ok(value)
}

/// `z (ln c)'(z,w)` for the Kubo-Mori function.
fn km_q(z: f64, w: f64) -> f64 {
    kubo_mori::scaled_log_derivative(z, w)
}

/// The Kubo-Mori triple kernel
/// `d(x,y,z) = (3/2) (q(z,x) - q(z,y))/(x - y) - q(z,x) q(z,y)/z`
/// with `q(z,w) = z (ln c)'(z,w)`.
pub fn kubo_mori_d(x: f64, y: f64, z: f64) -> f64 {
    let ux = kubo_mori::log_ratio(x, z);
    let uy = kubo_mori::log_ratio(y, z);
    // q(z,w) = -Q(ln(w/z)); the divided difference of ln over {x, y} is c(x,y)
    let slope = -kubo_mori::q_divided(ux, uy) * kubo_mori::log_mean_inverse(x, y);
    1.5 * slope - km_q(z, x) * km_q(z, y) / z
}

/// Kubo-Mori scalar curvature from the kernel `d`, which has the same
/// symmetrization as `h`.
pub fn kubo_mori_scalar(spectrum: &[f64], normalized: bool) -> Result<f64> {
    let s = checked_sorted(spectrum)?;
    let value = triple_sum(&s, kubo_mori_d, |x| kubo_mori_d(x, x, x));
    Ok(if normalized {
        normalize_scalar(value, s.len())
    } else {
        value
    })
}

/// Which evaluation route produced a [`CurvatureReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationPath {
    Theorem1,
    ClosedForm,
    Companion,
    Oracle,
}

/// Sums of the individual kernels over all ordered triples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSums {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    pub diagonal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub metric: MetricKind,
    pub spectrum: Vec<f64>,
    pub path: EvaluationPath,
    /// Curvature of the manifold of positive matrices.
    pub scalar: f64,
    /// Curvature of the unit-trace states; present when the trace is one.
    pub scalar_normalized: Option<f64>,
    pub kernel_sums: Option<KernelSums>,
}

/// `S = sum(h1) - sum(h2)/2 + 2 sum(h3) - sum(h4) - diagonal`.
pub fn kernel_sums(k: &HKernel, spectrum: &[f64]) -> Result<KernelSums> {
    let s = checked_sorted(spectrum)?;
    let mut out = KernelSums {
        h1: 0.0,
        h2: 0.0,
        h3: 0.0,
        h4: 0.0,
        diagonal: 0.0,
    };
    for &x in &s {
        for &y in &s {
            for &z in &s {
                out.h1 += k.h1(x, y, z);
                out.h2 += k.h2(x, y, z);
                out.h3 += k.h3(x, y, z);
                out.h4 += k.h4(x, y, z);
            }
        }
        out.diagonal += k.h_diag(x);
    }
    Ok(out)
}

/// Triple-sum evaluation with the per-kernel breakdown.
pub fn theorem1_report(k: &HKernel, spectrum: &[f64]) -> Result<CurvatureReport> {
    let scalar = scalar_theorem1(k, spectrum)?;
    let trace: f64 = spectrum.iter().sum();
    let scalar_normalized =
        ((trace - 1.0).abs() <= 1e-12).then(|| normalize_scalar(scalar, spectrum.len()));
    Ok(CurvatureReport {
        metric: k.c.kind(),
        spectrum: spectrum.to_vec(),
        path: EvaluationPath::Theorem1,
        scalar,
        scalar_normalized,
        kernel_sums: Some(kernel_sums(k, spectrum)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(kind: MetricKind) -> HKernel {
        HKernel::builtin(kind).unwrap()
    }

    #[test]
    fn paper_kernel_examples() {
        let (x, y, z) = (0.3, 1.7, 0.9);
        let s = kernel(MetricKind::Smallest);
        assert!((s.h1(x, y, z) - 0.5 / (x + y)).abs() < 1e-14);
        assert!((s.h2(x, y, z) - (x + y) / (2.0 * (x + z) * (y + z))).abs() < 1e-14);
        assert!((s.h3(x, y, z) - z / ((x + z) * (y + z))).abs() < 1e-14);
        assert!((s.h4(x, y, z) - z / ((x + z) * (y + z))).abs() < 1e-14);
        let l = kernel(MetricKind::Largest);
        assert!((l.h4(x, y, z) - x * y / (z * (x + z) * (y + z))).abs() < 1e-14);
        assert!((l.h1(x, y, z) + z / ((x + z) * (y + z))).abs() < 1e-14);
        assert!((l.h2(x, y, z) - 2.0 * z * z / ((x + y) * (x + z) * (y + z))).abs() < 1e-14);
    }

    #[test]
    fn diagonal_values() {
        for (kind, expected) in [
            (MetricKind::Smallest, 3.0),
            (MetricKind::Largest, -9.0),
            (MetricKind::KuboMori, -1.0),
        ] {
            let k = kernel(kind);
            for &x in &[0.01, 0.5, 7.0] {
                let want = expected / (8.0 * x);
                assert!((k.h_diag(x) - want).abs() < 1e-13 * want.abs(), "{kind:?}");
                assert!(
                    (k.h(x, x, x) - want).abs() < 1e-12 * want.abs(),
                    "{kind:?}: {}",
                    k.h(x, x, x)
                );
            }
        }
    }

    #[test]
    fn qubit_trace_state() {
        let s = scalar_theorem1(&kernel(MetricKind::Smallest), &[0.5, 0.5]).unwrap();
        assert!((s - 4.5).abs() < 1e-13);
        let s = scalar_theorem1(&kernel(MetricKind::KuboMori), &[0.5, 0.5]).unwrap();
        assert!((s + 1.5).abs() < 1e-13);
        assert_eq!(normalize_scalar(4.5, 2), 6.0);
        assert_eq!(normalize_scalar(-1.5, 2), 0.0);
        assert_eq!(denormalize_scalar(normalize_scalar(2.25, 5), 5), 2.25);
    }

    #[test]
    fn trace_state_values() {
        assert!(
            (trace_state_scalar(&kernel(MetricKind::Smallest), 2).unwrap() - 6.0).abs() < 1e-12
        );
        assert!(
            (trace_state_scalar(&kernel(MetricKind::Largest), 2).unwrap() + 12.0).abs() < 1e-12
        );
        assert!(
            (trace_state_scalar(&kernel(MetricKind::KuboMori), 3).unwrap() - 5.0).abs() < 1e-12
        );
    }

    #[test]
    fn companion_matrix_has_the_spectrum() {
        let spectrum = [0.1, 0.25, 0.3, 0.35];
        let comp = companion_matrix(&elementary_symmetric(&spectrum));
        let mut ev: Vec<f64> = comp.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(spectrum) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn kubo_mori_d_diagonal() {
        for &x in &[0.02, 1.0, 30.0] {
            assert!((kubo_mori_d(x, x, x) + 1.0 / (8.0 * x)).abs() < 1e-14 / x);
        }
    }
}
