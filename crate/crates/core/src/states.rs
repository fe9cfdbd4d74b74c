//! Density matrices, tangent vectors and spectral decompositions.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance for the Hermitian and trace checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    Ok(m.nrows())
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Replaces `m` by `(m + m*)/2`.
fn symmetrize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// A positive definite Hermitian matrix, optionally of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    normalized: bool,
}

impl DensityMatrix {
    /// Validates Hermiticity and positivity.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let n = check_square(&entries)?;
        if n < 2 {
            return Err(Error::DimensionTooSmall { min: 2, found: n });
        }
        let defect = hermitian_defect(&entries);
        if !(defect <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(defect));
        }
        let mut entries = entries;
        symmetrize(&mut entries);
        let lambda_min = SymmetricEigen::new(entries.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if !(lambda_min > 0.0) {
            return Err(Error::NotPositiveDefinite(lambda_min));
        }
        Ok(Self {
            entries,
            normalized: false,
        })
    }

    /// Like [`DensityMatrix::new`] and additionally requires unit trace.
    pub fn normalized(entries: CMatrix) -> Result<Self> {
        let rho = Self::new(entries)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::NotNormalized(tr));
        }
        Ok(Self {
            normalized: true,
            ..rho
        })
    }

    /// `diag(spectrum)`; normalized when the entries sum to one.
    pub fn from_diagonal(spectrum: &[f64]) -> Result<Self> {
        let n = spectrum.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(spectrum[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rho = Self::new(m)?;
        let normalized = (rho.trace() - 1.0).abs() <= HERMITIAN_TOL;
        Ok(Self { normalized, ..rho })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.entries).re
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Divides by the trace.
    pub fn to_normalized(&self) -> Self {
        let tr = self.trace();
        Self {
            entries: self.entries.map(|z| z / tr),
            normalized: true,
        }
    }

    /// The radial direction `N = rho` as a tangent vector.
    pub fn as_tangent(&self) -> TangentVector {
        TangentVector {
            entries: self.entries.clone(),
        }
    }
}

/// A Hermitian matrix viewed as a tangent vector at some base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    entries: CMatrix,
}

impl TangentVector {
    pub fn new(entries: CMatrix) -> Result<Self> {
        check_square(&entries)?;
        let defect = hermitian_defect(&entries);
        if !(defect <= HERMITIAN_TOL * entries.norm().max(1.0)) {
            return Err(Error::NotHermitian(defect));
        }
        let mut entries = entries;
        symmetrize(&mut entries);
        Ok(Self { entries })
    }

    /// Requires a vanishing trace, i.e. a vector tangent to the unit-trace states.
    pub fn traceless(entries: CMatrix) -> Result<Self> {
        let v = Self::new(entries)?;
        v.check_traceless()?;
        Ok(v)
    }

    /// Hermitian `X` from real and imaginary parts.
    pub fn from_parts(re: &DMatrix<f64>, im: &DMatrix<f64>) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::DimensionMismatch {
                expected: re.nrows(),
                found: im.nrows(),
            });
        }
        Self::new(CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
            Complex64::new(re[(i, j)], im[(i, j)])
        }))
    }

    pub(crate) fn from_hermitian_unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.entries).re
    }

    pub fn check_traceless(&self) -> Result<()> {
        let tr = self.trace();
        if tr.abs() > HERMITIAN_TOL * self.entries.norm().max(1.0) {
            return Err(Error::NotTraceless(tr));
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            entries: self.entries.map(|z| z * s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries - &other.entries,
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// `U X U*`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        let mut m = u * &self.entries * u.adjoint();
        symmetrize(&mut m);
        Self { entries: m }
    }
}

impl DensityMatrix {
    /// `U rho U*`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        let mut m = u * &self.entries * u.adjoint();
        symmetrize(&mut m);
        let rho = Self::new(m)?;
        Ok(Self {
            normalized: self.normalized,
            ..rho
        })
    }
}

/// Eigenvalues in ascending order and a unitary eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `U diag(lambda) U*`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(self.eigenvalues[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        u * d * u.adjoint()
    }

    /// Components in the eigenbasis, `U* X U`.
    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * x * &self.eigenvectors
    }

    /// Inverse of [`SpectralDecomposition::to_eigenbasis`].
    pub fn from_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        &self.eigenvectors * x * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues; every
/// eigenvector is scaled so that its largest-magnitude component (first
/// one on ties) is real and positive.
pub fn decompose(rho: &DensityMatrix) -> Result<SpectralDecomposition> {
    decompose_hermitian(rho.entries())
}

pub(crate) fn decompose_hermitian(m: &CMatrix) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if !(eigenvalues[0] > 0.0) {
        return Err(Error::NotPositiveDefinite(eigenvalues[0]));
    }
    let mut u = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        for i in 1..n {
            if v[i].norm() > v[pivot].norm() {
                pivot = i;
            }
        }
        let phase = v[pivot].conj() / v[pivot].norm();
        for i in 0..n {
            u[(i, col)] = v[i] * phase;
        }
        u[(pivot, col)] = Complex64::new(u[(pivot, col)].re, 0.0);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: u,
    })
}

/// Labels of the orthogonal tangent basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// `b_ii = 2 e_ii`
    Diagonal(usize),
    /// `b_ij = e_ij + e_ji`, i < j
    Real(usize, usize),
    /// `b~_ij = i (e_ij - e_ji)`, i < j
    Imaginary(usize, usize),
}

impl BasisLabel {
    pub fn matrix(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        match *self {
            BasisLabel::Diagonal(i) => m[(i, i)] = Complex64::new(2.0, 0.0),
            BasisLabel::Real(i, j) => {
                m[(i, j)] = Complex64::new(1.0, 0.0);
                m[(j, i)] = Complex64::new(1.0, 0.0);
            }
            BasisLabel::Imaginary(i, j) => {
                m[(i, j)] = Complex64::new(0.0, 1.0);
                m[(j, i)] = Complex64::new(0.0, -1.0);
            }
        }
        m
    }
}

/// Labels in the order diagonal, real off-diagonal, imaginary off-diagonal.
pub fn basis_labels(n: usize) -> Vec<BasisLabel> {
    let mut labels: Vec<BasisLabel> = (0..n).map(BasisLabel::Diagonal).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            labels.push(BasisLabel::Real(i, j));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            labels.push(BasisLabel::Imaginary(i, j));
        }
    }
    labels
}

/// The `n^2` matrices `b_ii`, `b_ij` and `b~_ij`.
pub fn basis_vectors(n: usize) -> Result<Vec<TangentVector>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    Ok(basis_labels(n)
        .iter()
        .map(|l| TangentVector {
            entries: l.matrix(n),
        })
        .collect())
}

/// Haar distributed unitary from the QR factorization of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U diag(spectrum) U*`, Hermitian by construction.
pub fn state_with_spectrum(spectrum: &[f64], u: &CMatrix) -> Result<DensityMatrix> {
    let n = spectrum.len();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.nrows(),
        });
    }
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(spectrum[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut m = u * d * u.adjoint();
    symmetrize(&mut m);
    DensityMatrix::new(m)
}

/// Random eigenvalues `spread^u`, `u` uniform on `[0, 1]`, so that
/// `max/min <= spread`.
pub fn random_spectrum<R: Rng + ?Sized>(n: usize, spread: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| spread.powf(rng.random::<f64>())).collect()
}

/// Reproducible random state `U diag(lambda) U*` with Haar `U` and
/// eigenvalue ratio at most `spread`. `spread = 1` gives exactly the
/// identity.
pub fn random_state(n: usize, seed: u64, spread: f64) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    if !(spread >= 1.0 && spread.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spread must be >= 1, got {spread}"
        )));
    }
    if spread == 1.0 {
        return DensityMatrix::from_diagonal(&vec![1.0; n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectrum = random_spectrum(n, spread, &mut rng);
    let u = random_unitary(n, &mut rng);
    state_with_spectrum(&spectrum, &u)
}

/// [`random_state`] divided by its trace.
pub fn random_normalized_state(n: usize, seed: u64, spread: f64) -> Result<DensityMatrix> {
    Ok(random_state(n, seed, spread)?.to_normalized())
}

/// Random Hermitian matrix with standard normal entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TangentVector {
    let mut m = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    symmetrize(&mut m);
    TangentVector { entries: m }
}

/// Random traceless Hermitian matrix.
pub fn random_traceless<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TangentVector {
    let mut v = random_hermitian(n, rng);
    let shift = v.trace() / n as f64;
    for i in 0..n {
        v.entries[(i, i)].re -= shift;
    }
    v
}
