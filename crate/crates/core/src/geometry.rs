//! Metric, flat derivatives of the metric, Levi-Civita connection and
//! curvature of a monotone metric on positive matrices.
//!
//! Everything is evaluated in the eigenbasis of the base point. With
//! `rho = U diag(lambda) U*` and `X^ = U* X U` the metric reads
//! `g(X, Y) = sum_ij conj(X^_ij) c(l_i, l_j) Y^_ij`, and Fréchet derivatives
//! of `c(L, R)` become divided differences of `c` over the spectrum.
//!
//! Index mapping used below (`[i]` stands for `l_i`):
//!
//! ```text
//! D_Z g(X,Y)       = sum_ijk  Z_ki X_ij Y_jk c[i,k; j]                + (X<->Y)
//! D2_{Z,W} g(X,Y)  = sum_ijkl Z_li W_ij X_jk Y_kl c[i,j,l; k]
//!                  +          Z_li X_ij W_jk Y_kl c[i,l; j,k]
//!                  +          Z_li X_ij Y_jk W_kl c[i,k,l; j]         + (X<->Y)
//! G(X,Y)_ab        = sum_k X_ak Y_kb (c[a,k; b] + c[k,b; a] - c[a,b; k])
//!                    / (2 c(a, b))                                    + (X<->Y)
//! ```

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcfun::MorozovaChentsovFunction;
use crate::states::{
    basis_labels, decompose, decompose_hermitian, BasisLabel, CMatrix, DensityMatrix,
    SpectralDecomposition, TangentVector,
};

/// Relative orthogonality tolerance of [`sectional`].
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Condition number above which [`oracle_scalar`] gives up.
pub const MAX_CONDITION: f64 = 1e12;

const TRACE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A metric together with a base point and its cached spectral data.
#[derive(Debug, Clone)]
pub struct MetricContext {
    c: MorozovaChentsovFunction,
    rho: DensityMatrix,
    spec: SpectralDecomposition,
    cvals: Vec<f64>,
    dd1: OnceLock<Vec<f64>>,
    dd2: OnceLock<Vec<f64>>,
    ddm: OnceLock<Vec<f64>>,
}

/// A curvature number and whether it refers to the unit-trace submanifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureValue {
    pub value: f64,
    pub normalized: bool,
}

impl MetricContext {
    pub fn new(c: MorozovaChentsovFunction, rho: DensityMatrix) -> Result<Self> {
        let spec = decompose(&rho)?;
        let l = &spec.eigenvalues;
        let n = l.len();
        let mut cvals = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                cvals[i * n + j] = c.c(l[i], l[j]);
            }
        }
        Ok(Self {
            c,
            rho,
            spec,
            cvals,
            dd1: OnceLock::new(),
            dd2: OnceLock::new(),
            ddm: OnceLock::new(),
        })
    }

    /// Context at `diag(spectrum)`.
    pub fn diagonal(c: MorozovaChentsovFunction, spectrum: &[f64]) -> Result<Self> {
        Self::new(c, DensityMatrix::from_diagonal(spectrum)?)
    }

    pub fn mcfun(&self) -> &MorozovaChentsovFunction {
        &self.c
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spec.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.spec.eigenvalues.len()
    }

    fn cv(&self, i: usize, j: usize) -> f64 {
        self.cvals[i * self.dim() + j]
    }

    /// `c[l_a, l_b; l_y]` at flat index `(a*n + b)*n + y`.
    fn dd1_table(&self) -> &[f64] {
        self.dd1.get_or_init(|| {
            let l = self.spectrum();
            let n = l.len();
            let mut t = vec![0.0; n * n * n];
            for a in 0..n {
                for b in 0..n {
                    for y in 0..n {
                        t[(a * n + b) * n + y] = self.c.dd1(l[a], l[b], l[y]);
                    }
                }
            }
            t
        })
    }

    fn dd2_table(&self) -> &[f64] {
        self.dd2.get_or_init(|| {
            let l = self.spectrum();
            let n = l.len();
            let mut t = vec![0.0; n * n * n * n];
            for a in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        for y in 0..n {
                            t[((a * n + b) * n + d) * n + y] = self.c.dd2(l[a], l[b], l[d], l[y]);
                        }
                    }
                }
            }
            t
        })
    }

    fn ddm_table(&self) -> &[f64] {
        self.ddm.get_or_init(|| {
            let l = self.spectrum();
            let n = l.len();
            let mut t = vec![0.0; n * n * n * n];
            for a in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            t[((a * n + b) * n + d) * n + e] = self.c.ddm(l[a], l[b], l[d], l[e]);
                        }
                    }
                }
            }
            t
        })
    }

    fn check_dim(&self, x: &TangentVector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Eigenbasis components `U* X U`.
    pub fn to_eigenbasis(&self, x: &TangentVector) -> Result<CMatrix> {
        self.check_dim(x)?;
        Ok(self.spec.to_eigenbasis(x.entries()))
    }

    fn check_normalized(&self) -> Result<()> {
        let tr = self.rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotNormalized(tr));
        }
        Ok(())
    }

    /// `g(X, Y)` from eigenbasis components.
    pub fn metric_hat(&self, x: &CMatrix, y: &CMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.cv(i, j) * (x[(i, j)].conj() * y[(i, j)]).re;
            }
        }
        acc
    }

    fn dg_one(&self, z: &CMatrix, x: &CMatrix, y: &CMatrix) -> Complex64 {
        let n = self.dim();
        let t = self.dd1_table();
        let mut acc = ZERO;
        for k in 0..n {
            for i in 0..n {
                let zki = z[(k, i)];
                if zki == ZERO {
                    continue;
                }
                for j in 0..n {
                    let xij = x[(i, j)];
                    if xij == ZERO {
                        continue;
                    }
                    acc += zki * xij * y[(j, k)] * t[(i * n + k) * n + j];
                }
            }
        }
        acc
    }

    /// `D_Z g(X, Y)` from eigenbasis components.
    pub fn metric_derivative_hat(&self, z: &CMatrix, x: &CMatrix, y: &CMatrix) -> f64 {
        (self.dg_one(z, x, y) + self.dg_one(z, y, x)).re
    }

    fn d2g_one(&self, z: &CMatrix, w: &CMatrix, x: &CMatrix, y: &CMatrix) -> Complex64 {
        let n = self.dim();
        let t2 = self.dd2_table();
        let tm = self.ddm_table();
        let idx = |a: usize, b: usize, d: usize, e: usize| ((a * n + b) * n + d) * n + e;
        let mut acc = ZERO;
        for l in 0..n {
            for i in 0..n {
                let zli = z[(l, i)];
                if zli == ZERO {
                    continue;
                }
                for j in 0..n {
                    let wij = w[(i, j)];
                    let xij = x[(i, j)];
                    if wij != ZERO {
                        let p = zli * wij;
                        for k in 0..n {
                            acc += p * x[(j, k)] * y[(k, l)] * t2[idx(i, j, l, k)];
                        }
                    }
                    if xij != ZERO {
                        let p = zli * xij;
                        for k in 0..n {
                            acc += p * w[(j, k)] * y[(k, l)] * tm[idx(i, l, j, k)];
                            acc += p * y[(j, k)] * w[(k, l)] * t2[idx(i, k, l, j)];
                        }
                    }
                }
            }
        }
        acc
    }

    /// `D²_{Z,W} g(X, Y)` from eigenbasis components.
    pub fn metric_second_derivative_hat(
        &self,
        z: &CMatrix,
        w: &CMatrix,
        x: &CMatrix,
        y: &CMatrix,
    ) -> f64 {
        (self.d2g_one(z, w, x, y) + self.d2g_one(z, w, y, x)).re
    }

    /// `Γ(X, Y)` in eigenbasis components.
    pub fn christoffel_hat(&self, x: &CMatrix, y: &CMatrix) -> CMatrix {
        let n = self.dim();
        let t = self.dd1_table();
        let d = |a: usize, b: usize, y: usize| t[(a * n + b) * n + y];
        let mut out = CMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    let w = d(a, k, b) + d(k, b, a) - d(a, b, k);
                    acc += (x[(a, k)] * y[(k, b)] + y[(a, k)] * x[(k, b)]) * w;
                }
                out[(a, b)] = acc / (2.0 * self.cv(a, b));
            }
        }
        out
    }

    /// `R(X, Y, Z, W)` from eigenbasis components.
    pub fn riemann_hat(&self, x: &CMatrix, y: &CMatrix, z: &CMatrix, w: &CMatrix) -> f64 {
        let gxw = self.christoffel_hat(x, w);
        let gyz = self.christoffel_hat(y, z);
        let gxz = self.christoffel_hat(x, z);
        let gyw = self.christoffel_hat(y, w);
        let quadratic = self.metric_hat(&gxw, &gyz) - self.metric_hat(&gxz, &gyw);
        let flat = self.metric_second_derivative_hat(x, w, y, z)
            + self.metric_second_derivative_hat(y, z, x, w)
            - self.metric_second_derivative_hat(x, z, y, w)
            - self.metric_second_derivative_hat(y, w, x, z);
        quadratic + 0.5 * flat
    }

    /// `R¹(X, Y, Z, W)` by the Gauss equation, from eigenbasis components.
    pub fn riemann_normalized_hat(
        &self,
        x: &CMatrix,
        y: &CMatrix,
        z: &CMatrix,
        w: &CMatrix,
    ) -> f64 {
        self.riemann_hat(x, y, z, w)
            + 0.25
                * (self.metric_hat(x, z) * self.metric_hat(y, w)
                    - self.metric_hat(y, z) * self.metric_hat(x, w))
    }

    /// Sectional curvature of an orthogonal pair given in eigenbasis components.
    pub fn sectional_hat(&self, x: &CMatrix, y: &CMatrix, normalized: bool) -> Result<f64> {
        let gxx = self.metric_hat(x, x);
        let gyy = self.metric_hat(y, y);
        if !(gxx > 0.0 && gyy > 0.0) {
            return Err(Error::ZeroVector);
        }
        let gxy = self.metric_hat(x, y);
        let rel = gxy.abs() / (gxx * gyy).sqrt();
        if rel > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal(rel));
        }
        let k = self.riemann_hat(x, y, x, y) / (gxx * gyy);
        Ok(if normalized { k + 0.25 } else { k })
    }
}

pub fn metric(ctx: &MetricContext, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    Ok(ctx.metric_hat(&ctx.to_eigenbasis(x)?, &ctx.to_eigenbasis(y)?))
}

/// Flat directional derivative `D_Z g(X, Y)`.
pub fn metric_derivative(
    ctx: &MetricContext,
    z: &TangentVector,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    Ok(ctx.metric_derivative_hat(
        &ctx.to_eigenbasis(z)?,
        &ctx.to_eigenbasis(x)?,
        &ctx.to_eigenbasis(y)?,
    ))
}

/// Second flat derivative `D²_{Z,W} g(X, Y)`.
pub fn metric_second_derivative(
    ctx: &MetricContext,
    z: &TangentVector,
    w: &TangentVector,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    Ok(ctx.metric_second_derivative_hat(
        &ctx.to_eigenbasis(z)?,
        &ctx.to_eigenbasis(w)?,
        &ctx.to_eigenbasis(x)?,
        &ctx.to_eigenbasis(y)?,
    ))
}

/// Christoffel tensor, `∇_X Y = D_X Y + Γ(X, Y)`.
pub fn christoffel(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<TangentVector> {
    let g = ctx.christoffel_hat(&ctx.to_eigenbasis(x)?, &ctx.to_eigenbasis(y)?);
    Ok(TangentVector::from_hermitian_unchecked(hermitian_part(
        &ctx.spec.from_eigenbasis(&g),
    )))
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn riemann(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
    w: &TangentVector,
) -> Result<f64> {
    Ok(ctx.riemann_hat(
        &ctx.to_eigenbasis(x)?,
        &ctx.to_eigenbasis(y)?,
        &ctx.to_eigenbasis(z)?,
        &ctx.to_eigenbasis(w)?,
    ))
}

/// Curvature tensor of the unit-trace submanifold.
pub fn riemann_normalized(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
    w: &TangentVector,
) -> Result<f64> {
    ctx.check_normalized()?;
    for v in [x, y, z, w] {
        v.check_traceless()?;
    }
    Ok(ctx.riemann_normalized_hat(
        &ctx.to_eigenbasis(x)?,
        &ctx.to_eigenbasis(y)?,
        &ctx.to_eigenbasis(z)?,
        &ctx.to_eigenbasis(w)?,
    ))
}

/// Sectional curvature of the plane spanned by orthogonal `X`, `Y`.
pub fn sectional(
    ctx: &MetricContext,
    x: &TangentVector,
    y: &TangentVector,
    normalized: bool,
) -> Result<CurvatureValue> {
    if normalized {
        ctx.check_normalized()?;
        x.check_traceless()?;
        y.check_traceless()?;
    }
    let value = ctx.sectional_hat(&ctx.to_eigenbasis(x)?, &ctx.to_eigenbasis(y)?, normalized)?;
    Ok(CurvatureValue { value, normalized })
}

/// Orthogonal basis in eigenbasis components: `b_ii`, `b_ij`, `b~_ij`, or
/// for the unit-trace case the off-diagonal ones plus an orthogonalized
/// basis of the traceless diagonal matrices.
fn orthogonal_basis(ctx: &MetricContext, normalized: bool) -> Vec<CMatrix> {
    let n = ctx.dim();
    let labels = basis_labels(n);
    let off: Vec<CMatrix> = labels
        .iter()
        .filter(|l| !matches!(l, BasisLabel::Diagonal(_)))
        .map(|l| l.matrix(n))
        .collect();
    if !normalized {
        let mut all: Vec<CMatrix> = (0..n).map(|i| BasisLabel::Diagonal(i).matrix(n)).collect();
        all.extend(off);
        return all;
    }
    // e_ii - rho is g-orthogonal to rho; the first n-1 are independent
    let l = ctx.spectrum();
    let weight: Vec<f64> = l.iter().map(|x| 1.0 / x).collect();
    let dot = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .zip(&weight)
            .map(|((p, q), w)| p * q * w)
            .sum::<f64>()
    };
    let mut diag: Vec<Vec<f64>> = Vec::new();
    for i in 0..n - 1 {
        let mut v: Vec<f64> = l.iter().map(|x| -x).collect();
        v[i] += 1.0;
        for u in &diag {
            let p = dot(&v, u) / dot(u, u);
            for (vk, uk) in v.iter_mut().zip(u) {
                *vk -= p * uk;
            }
        }
        diag.push(v);
    }
    let mut all: Vec<CMatrix> = diag
        .iter()
        .map(|v| {
            CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(v[i], 0.0)
                } else {
                    ZERO
                }
            })
        })
        .collect();
    all.extend(off);
    all
}

/// Scalar curvature as the sum of sectional curvatures over ordered pairs
/// of an orthogonal basis.
pub fn scalar_from_basis(ctx: &MetricContext, normalized: bool) -> Result<f64> {
    if normalized {
        ctx.check_normalized()?;
    }
    let basis = orthogonal_basis(ctx, normalized);
    let mut total = 0.0;
    for a in 0..basis.len() {
        for b in (a + 1)..basis.len() {
            total += 2.0 * ctx.sectional_hat(&basis[a], &basis[b], normalized)?;
        }
    }
    Ok(total)
}

/// Frobenius-orthonormal basis of Hermitian (or traceless Hermitian) matrices.
fn chart_basis(n: usize, traceless: bool) -> Vec<CMatrix> {
    let mut out = Vec::new();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if traceless {
        for k in 1..n {
            let norm = ((k * (k + 1)) as f64).sqrt();
            out.push(CMatrix::from_fn(n, n, |i, j| {
                if i != j {
                    ZERO
                } else if i < k {
                    Complex64::new(1.0 / norm, 0.0)
                } else if i == k {
                    Complex64::new(-(k as f64) / norm, 0.0)
                } else {
                    ZERO
                }
            }));
        }
    } else {
        for k in 0..n {
            out.push(CMatrix::from_fn(n, n, |i, j| {
                if i == k && j == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            }));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(i, j)] = Complex64::new(s, 0.0);
            m[(j, i)] = Complex64::new(s, 0.0);
            out.push(m);
            let mut m = CMatrix::zeros(n, n);
            m[(i, j)] = Complex64::new(0.0, s);
            m[(j, i)] = Complex64::new(0.0, -s);
            out.push(m);
        }
    }
    out
}

/// Coordinate matrix `G_ab = g_p(E_a, E_b)` at the point `p`.
fn gram(c: &MorozovaChentsovFunction, p: &CMatrix, chart: &[CMatrix]) -> Result<DMatrix<f64>> {
    let spec = decompose_hermitian(p)?;
    let l = &spec.eigenvalues;
    let n = l.len();
    let cm = DMatrix::from_fn(n, n, |i, j| c.c(l[i], l[j]));
    let hats: Vec<CMatrix> = chart.iter().map(|e| spec.to_eigenbasis(e)).collect();
    let m = chart.len();
    let mut g = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += cm[(i, j)] * (hats[a][(i, j)].conj() * hats[b][(i, j)]).re;
                }
            }
            g[(a, b)] = acc;
            g[(b, a)] = acc;
        }
    }
    Ok(g)
}

/// Relative step of the first-derivative stencil.
pub const ORACLE_STEP_FIRST: f64 = 1e-3;
/// Relative step of the second-derivative stencil.
pub const ORACLE_STEP_SECOND: f64 = 5e-3;

/// Brute-force scalar curvature from finite differences of the coordinate
/// metric in a flat chart of (traceless) Hermitian matrices. Uses nothing
/// but [`MorozovaChentsovFunction::c`] and an eigensolver.
pub fn oracle_scalar(ctx: &MetricContext, normalized: bool) -> Result<f64> {
    if normalized {
        ctx.check_normalized()?;
    }
    let n = ctx.dim();
    let c = &ctx.c;
    let rho = ctx.rho.entries();
    let chart = chart_basis(n, normalized);
    let m = chart.len();
    let scale = ctx.spectrum()[n - 1];
    let at = |coords: &[(usize, f64)]| -> Result<DMatrix<f64>> {
        let mut p = rho.clone();
        for &(a, t) in coords {
            p += &chart[a] * Complex64::new(t, 0.0);
        }
        gram(c, &p, &chart)
    };

    let g0 = at(&[])?;
    let eig = SymmetricEigen::new(g0.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v.abs()))
        });
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let ginv = g0
        .clone()
        .try_inverse()
        .ok_or(Error::IllConditioned(cond))?;

    let h1 = ORACLE_STEP_FIRST * scale;
    let first = |a: usize, h: f64| -> Result<DMatrix<f64>> {
        Ok((at(&[(a, h)])? - at(&[(a, -h)])?) / (2.0 * h))
    };
    let mut dg = Vec::with_capacity(m);
    for a in 0..m {
        dg.push((first(a, 0.5 * h1)? * 4.0 - first(a, h1)?) / 3.0);
    }

    let h2 = ORACLE_STEP_SECOND * scale;
    let second = |a: usize, b: usize, h: f64| -> Result<DMatrix<f64>> {
        if a == b {
            Ok((at(&[(a, h)])? - &g0 * 2.0 + at(&[(a, -h)])?) / (h * h))
        } else {
            Ok(
                (at(&[(a, h), (b, h)])? - at(&[(a, h), (b, -h)])? - at(&[(a, -h), (b, h)])?
                    + at(&[(a, -h), (b, -h)])?)
                    / (4.0 * h * h),
            )
        }
    };
    let mut ddg = vec![vec![DMatrix::zeros(0, 0); m]; m];
    for a in 0..m {
        for b in a..m {
            let v = (second(a, b, 0.5 * h2)? * 4.0 - second(a, b, h2)?) / 3.0;
            ddg[b][a] = v.clone();
            ddg[a][b] = v;
        }
    }

    // lowered symbols Γ_{f,bc} and raised Γ^e_bc
    let mut low = vec![0.0; m * m * m];
    for f in 0..m {
        for b in 0..m {
            for cc in 0..m {
                low[(f * m + b) * m + cc] =
                    0.5 * (dg[b][(f, cc)] + dg[cc][(f, b)] - dg[f][(b, cc)]);
            }
        }
    }
    let mut up = vec![0.0; m * m * m];
    for e in 0..m {
        for b in 0..m {
            for cc in 0..m {
                let mut acc = 0.0;
                for f in 0..m {
                    acc += ginv[(e, f)] * low[(f * m + b) * m + cc];
                }
                up[(e * m + b) * m + cc] = acc;
            }
        }
    }
    let lo3 = |f: usize, b: usize, cc: usize| low[(f * m + b) * m + cc];
    let up3 = |e: usize, b: usize, cc: usize| up[(e * m + b) * m + cc];

    let mut s = 0.0;
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                let gac = ginv[(a, cc)];
                for d in 0..m {
                    let gbd = ginv[(b, d)];
                    let w = gac * gbd;
                    if w == 0.0 {
                        continue;
                    }
                    let mut r = 0.5
                        * (ddg[b][cc][(a, d)] + ddg[a][d][(b, cc)]
                            - ddg[a][cc][(b, d)]
                            - ddg[b][d][(a, cc)]);
                    for e in 0..m {
                        r += up3(e, b, cc) * lo3(e, a, d) - up3(e, b, d) * lo3(e, a, cc);
                    }
                    s += w * r;
                }
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcfun::MetricKind;
    use crate::states::basis_vectors;

    fn ctx2(kind: MetricKind, x: f64, y: f64) -> MetricContext {
        MetricContext::diagonal(crate::mcfun::make_builtin(kind).unwrap(), &[x, y]).unwrap()
    }

    #[test]
    fn metric_on_basis_vectors() {
        let (x, y) = (0.3, 0.7);
        for kind in MetricKind::BUILTIN {
            let ctx = ctx2(kind, x, y);
            let b = basis_vectors(2).unwrap();
            let g12 = metric(&ctx, &b[2], &b[2]).unwrap();
            assert!((g12 - 2.0 * ctx.mcfun().c(x, y)).abs() < 1e-14);
            let g11 = metric(&ctx, &b[0], &b[0]).unwrap();
            assert!((g11 - 4.0 / x).abs() < 1e-13);
            let n = ctx.rho().as_tangent();
            assert!((metric(&ctx, &n, &n).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn christoffel_examples() {
        let (x, y) = (0.3, 0.7);
        for kind in MetricKind::BUILTIN {
            let ctx = ctx2(kind, x, y);
            let b = basis_vectors(2).unwrap();
            let g = christoffel(&ctx, &b[0], &b[2]).unwrap();
            let expected = b[2].scale(ctx.mcfun().lnc10(x, y));
            assert!((g.entries() - expected.entries()).norm() < 1e-12);
            let g = christoffel(&ctx, &b[0], &b[0]).unwrap();
            assert!((g.entries() - b[0].scale(-1.0 / x).entries()).norm() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_example() {
        // D²_{b11,b11} g(b12,b12) = 8 c''(x, y)
        let (x, y) = (0.3, 0.7);
        for kind in MetricKind::BUILTIN {
            let ctx = ctx2(kind, x, y);
            let b = basis_vectors(2).unwrap();
            let v = metric_second_derivative(&ctx, &b[0], &b[0], &b[2], &b[2]).unwrap();
            let expected = 8.0 * ctx.mcfun().c20(x, y);
            assert!(
                (v - expected).abs() < 1e-10 * expected.abs(),
                "{kind:?}: {v} vs {expected}"
            );
        }
    }

    #[test]
    fn bures_qubit_oracle() {
        let ctx = ctx2(MetricKind::Smallest, 0.5, 0.5);
        let s = oracle_scalar(&ctx, false).unwrap();
        assert!((s - 4.5).abs() < 1e-3, "{s}");
        let s1 = oracle_scalar(&ctx, true).unwrap();
        assert!((s1 - 6.0).abs() < 1e-3, "{s1}");
        assert!((scalar_from_basis(&ctx, false).unwrap() - 4.5).abs() < 1e-10);
        assert!((scalar_from_basis(&ctx, true).unwrap() - 6.0).abs() < 1e-10);
    }
}
