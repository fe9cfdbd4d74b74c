//! Numerical evidence for the monotonicity of the Kubo-Mori scalar
//! curvature under mixing: the symmetrized kernel `h_s`, majorization and
//! T-transforms, the inequalities that would follow from concavity of
//! `h_s`, and seeded parallel scans.
//!
//! Scans split their trials into fixed chunks; chunk `k` draws from a
//! ChaCha stream seeded with `seed + k`, so reports do not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::kubo_mori;
use crate::mcfun::MetricKind;
use crate::scalar::{kubo_mori_d, kubo_mori_scalar, trace_state_closed_form, HKernel};

/// Pairwise relative gap above which the Kubo-Mori closed form of `h_s` is used.
pub const CLOSED_FORM_GAP: f64 = 1e-2;

/// Relative gap of the forced near-coincident draws.
pub const NEAR_COINCIDENT_GAP: f64 = 1e-5;

/// Share of scan draws forced near coincidence.
pub const NEAR_COINCIDENT_SHARE: f64 = 0.05;

const CHUNK: u64 = 1 << 12;

/// The fully symmetric triple kernel whose sum gives the scalar curvature.
#[derive(Debug, Clone)]
pub enum SymmetrizedKernel {
    KuboMori,
    Generic(HKernel),
}

fn separated(x: f64, y: f64, z: f64) -> bool {
    let gap = |a: f64, b: f64| (a - b).abs() > CLOSED_FORM_GAP * a.max(b);
    gap(x, y) && gap(x, z) && gap(y, z)
}

/// Closed form of the symmetrized Kubo-Mori kernel for pairwise distinct arguments.
pub fn kubo_mori_h_s_closed(x: f64, y: f64, z: f64) -> f64 {
    let lxy = kubo_mori::log_ratio(x, y);
    let lxz = kubo_mori::log_ratio(x, z);
    let lyz = kubo_mori::log_ratio(y, z);
    let logs = lxy * lxz * lyz;
    let first = ((y - z).powi(2) * lxy * lxz - (x - z).powi(2) * lxy * lyz
        + (x - y).powi(2) * lxz * lyz)
        / (6.0 * (x - y) * (x - z) * (y - z) * logs);
    let second = (-x * y * lxy + x * z * lxz - y * z * lyz) / (3.0 * x * y * z * logs);
    first + second
}

/// `(d(x,y,z) + d(y,z,x) + d(z,x,y))/3`, finite at coincident arguments.
pub fn kubo_mori_h_s_from_d(x: f64, y: f64, z: f64) -> f64 {
    (kubo_mori_d(x, y, z) + kubo_mori_d(y, z, x) + kubo_mori_d(z, x, y)) / 3.0
}

impl SymmetrizedKernel {
    pub fn for_metric(kind: MetricKind) -> Result<Self> {
        match kind {
            MetricKind::KuboMori => Ok(Self::KuboMori),
            _ => Ok(Self::Generic(HKernel::builtin(kind)?)),
        }
    }

    /// `h_s(x, y, z)`.
    pub fn h_s(&self, x: f64, y: f64, z: f64) -> f64 {
        match self {
            Self::KuboMori if separated(x, y, z) => kubo_mori_h_s_closed(x, y, z),
            _ => self.smooth(x, y, z),
        }
    }

    /// A single coincidence-safe representation, used under finite differences
    /// so the stencil never straddles a switch between formulas.
    fn smooth(&self, x: f64, y: f64, z: f64) -> f64 {
        match self {
            Self::KuboMori => kubo_mori_h_s_from_d(x, y, z),
            Self::Generic(k) => k.h_sym(x, y, z),
        }
    }

    /// `∂h_s/∂x` by central differences with one Richardson level.
    pub fn h_s_dx(&self, x: f64, y: f64, z: f64) -> f64 {
        let h = (f64::EPSILON.cbrt() * x.max(1.0)).min(x / 8.0);
        let d = |h: f64| (self.smooth(x + h, y, z) - self.smooth(x - h, y, z)) / (2.0 * h);
        (4.0 * d(0.5 * h) - d(h)) / 3.0
    }

    /// Hessian of `h_s` by central differences with one Richardson level.
    pub fn hessian(&self, p: [f64; 3]) -> [[f64; 3]; 3] {
        let step: Vec<f64> = p.iter().map(|v| HESSIAN_STEP * v).collect();
        let f = |d: [f64; 3]| self.smooth(p[0] + d[0], p[1] + d[1], p[2] + d[2]);
        let f0 = f([0.0; 3]);
        let entry = |i: usize, j: usize, scale: f64| {
            let (hi, hj) = (scale * step[i], scale * step[j]);
            let mut e = [0.0; 3];
            if i == j {
                e[i] = hi;
                let plus = f(e);
                e[i] = -hi;
                (plus - 2.0 * f0 + f(e)) / (hi * hi)
            } else {
                let at = |si: f64, sj: f64| {
                    let mut e = [0.0; 3];
                    e[i] = si * hi;
                    e[j] = sj * hj;
                    f(e)
                };
                (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * hi * hj)
            }
        };
        let mut h = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = (4.0 * entry(i, j, 0.5) - entry(i, j, 1.0)) / 3.0;
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        h
    }
}

/// Relative step of the Hessian stencil.
pub const HESSIAN_STEP: f64 = 2e-3;

/// A T-transform on the pair `(i, j)` with mixing parameter `t ∈ [0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingStep {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

impl MixingStep {
    /// Accepts `t ∈ [0, 1]`; `t > 1/2` is replaced by `1 - t`, which yields
    /// the same spectrum up to the order of the two entries.
    pub fn new(i: usize, j: usize, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidMixing(t));
        }
        Ok(Self {
            i,
            j,
            t: if t > 0.5 { 1.0 - t } else { t },
        })
    }
}

/// Replaces entries `i`, `j` by `((1-t) x + t y, t x + (1-t) y)`.
pub fn t_transform(spectrum: &[f64], step: MixingStep) -> Result<Vec<f64>> {
    let n = spectrum.len();
    for index in [step.i, step.j] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, len: n });
        }
    }
    if !(0.0..=0.5).contains(&step.t) {
        return Err(Error::InvalidMixing(step.t));
    }
    let mut out = spectrum.to_vec();
    if step.i != step.j {
        let (x, y, t) = (spectrum[step.i], spectrum[step.j], step.t);
        out[step.i] = (1.0 - t) * x + t * y;
        out[step.j] = t * x + (1.0 - t) * y;
    }
    Ok(out)
}

/// True iff `more_mixed ≻ less_mixed`: with both sorted decreasingly every
/// partial sum of `more_mixed` is at most that of `less_mixed`.
pub fn majorizes(more_mixed: &[f64], less_mixed: &[f64]) -> Result<bool> {
    if more_mixed.len() != less_mixed.len() {
        return Err(Error::LengthMismatch(more_mixed.len(), less_mixed.len()));
    }
    for &v in more_mixed.iter().chain(less_mixed) {
        check_positive(v)?;
    }
    let (sa, sb): (f64, f64) = (more_mixed.iter().sum(), less_mixed.iter().sum());
    let tol = 1e-10 * sa.max(sb).max(1.0);
    if (sa - sb).abs() > tol {
        return Err(Error::SumMismatch(sa, sb));
    }
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (a, b) = (sorted(more_mixed), sorted(less_mixed));
    let slack = 1e-12 * sa.max(sb);
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..a.len() {
        pa += a[k];
        pb += b[k];
        if pa > pb + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The four differences that are non-negative if `h_s` is concave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Residuals {
    /// `2h'(x,x,y) - h'(y,x,x) - 2h'(y,x,y) + h'(x,y,y)`
    pub pair: f64,
    /// `h'(x,x,l) - h'(y,y,l)`
    pub diagonal: f64,
    /// `h'(x,y,l) - h'(y,x,l)`
    pub cross: f64,
    /// `h'(x,l,m) - h'(y,l,m)`
    pub tail: f64,
}

impl Lemma4Residuals {
    pub fn min(&self) -> f64 {
        self.pair.min(self.diagonal).min(self.cross).min(self.tail)
    }
}

/// The four derivative differences for the Kubo-Mori kernel, with `h' = ∂h_s/∂x`.
pub fn lemma4_check(x: f64, y: f64, lambda: f64, mu: f64) -> Result<Lemma4Residuals> {
    for v in [x, y, lambda, mu] {
        check_positive(v)?;
    }
    if !(x < y) {
        return Err(Error::OrderViolation(x, y));
    }
    let k = SymmetrizedKernel::KuboMori;
    let d = |a: f64, b: f64, c: f64| k.h_s_dx(a, b, c);
    Ok(Lemma4Residuals {
        pair: 2.0 * d(x, x, y) - d(y, x, x) - 2.0 * d(y, x, y) + d(x, y, y),
        diagonal: d(x, x, lambda) - d(y, y, lambda),
        cross: d(x, y, lambda) - d(y, x, lambda),
        tail: d(x, lambda, mu) - d(y, lambda, mu),
    })
}

/// Leading principal minors of the Hessian of the Kubo-Mori `h_s`.
pub fn hessian_minors(x: f64, y: f64, z: f64) -> Result<(f64, f64, f64)> {
    for v in [x, y, z] {
        check_positive(v)?;
    }
    let h = SymmetrizedKernel::KuboMori.hessian([x, y, z]);
    Ok(minors(&h))
}

fn minors(h: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let m1 = h[0][0];
    let m2 = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let m3 = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1])
        - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
        + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    (m1, m2, m3)
}

/// A closed box `[lo, hi]^k` sampled log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Region {
    fn default() -> Self {
        Self { lo: 1e-2, hi: 1e2 }
    }
}

impl Region {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "region bounds must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (a + (b - a) * rng.random::<f64>())
            .exp()
            .clamp(self.lo, self.hi)
    }

    /// A point of the box; a share of draws has two coordinates within
    /// [`NEAR_COINCIDENT_GAP`] of each other.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        let mut p = [self.sample(rng), self.sample(rng), self.sample(rng)];
        if rng.random::<f64>() < NEAR_COINCIDENT_SHARE {
            let i = rng.random_range(0..3);
            let j = (i + rng.random_range(1..3)) % 3;
            p[j] = p[i] * (1.0 + NEAR_COINCIDENT_GAP * (2.0 * rng.random::<f64>() - 1.0));
        }
        p
    }
}

fn chunks(trials: u64) -> Vec<(u64, u64, u64)> {
    let count = trials.div_ceil(CHUNK);
    (0..count)
        .map(|k| (k, k * CHUNK, ((k + 1) * CHUNK).min(trials)))
        .collect()
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(chunk))
}

/// A witness with its score and trial index.
type Scored<T> = Option<(f64, u64, T)>;

/// Keeps the larger of two scored witnesses, the earlier trial on ties.
fn better<T: Copy>(a: Scored<T>, b: Scored<T>) -> Scored<T> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavityWitness {
    pub seed: u64,
    pub trial: u64,
    pub p1: [f64; 3],
    pub p2: [f64; 3],
    pub t: f64,
    /// `(1-t) h_s(P1) + t h_s(P2) - h_s((1-t) P1 + t P2)`
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub seed: u64,
    pub trials: u64,
    pub region: Region,
    pub tolerance: f64,
    /// Largest gap relative to `|h_s(P1)| + |h_s(P2)| + |h_s(P)|`.
    pub max_violation: f64,
    pub violations: u64,
    pub worst: Option<ConcavityWitness>,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Random chords of `h_s`; concavity predicts every relative gap `<= 0`.
pub fn concavity_scan(
    kernel: &SymmetrizedKernel,
    region: Region,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> ConcavityReport {
    let results: Vec<(u64, Scored<ConcavityWitness>)> = chunks(trials)
        .into_par_iter()
        .map(|(k, start, end)| {
            let mut rng = chunk_rng(seed, k);
            let mut count = 0;
            let mut worst = None;
            for trial in start..end {
                let p1 = region.sample_point(&mut rng);
                let p2 = region.sample_point(&mut rng);
                let t: f64 = rng.random();
                let mid: Vec<f64> = (0..3).map(|i| (1.0 - t) * p1[i] + t * p2[i]).collect();
                let (a, b, m) = (
                    kernel.h_s(p1[0], p1[1], p1[2]),
                    kernel.h_s(p2[0], p2[1], p2[2]),
                    kernel.h_s(mid[0], mid[1], mid[2]),
                );
                let gap = (1.0 - t) * a + t * b - m;
                let scale = a.abs() + b.abs() + m.abs();
                let score = gap / scale;
                if !(score <= tolerance) {
                    count += 1;
                }
                let score = if score.is_nan() { f64::INFINITY } else { score };
                worst = better(
                    worst,
                    Some((
                        score,
                        trial,
                        ConcavityWitness {
                            seed: seed.wrapping_add(k),
                            trial,
                            p1,
                            p2,
                            t,
                            gap,
                        },
                    )),
                );
            }
            (count, worst)
        })
        .collect();
    let mut violations = 0;
    let mut worst = None;
    for (c, w) in results {
        violations += c;
        worst = better(worst, w);
    }
    ConcavityReport {
        seed,
        trials,
        region,
        tolerance,
        max_violation: worst.map_or(f64::NEG_INFINITY, |w| w.0),
        violations,
        worst: worst.map(|w| w.2),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorGridReport {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub z: f64,
    pub tolerance: f64,
    pub points: usize,
    /// Largest of `M1/|H|`, `-M2/|H|^2`, `M3/|H|^3` over the grid, with
    /// `|H|` the largest Hessian entry in absolute value.
    pub max_violation: f64,
    pub violations: usize,
    pub worst: Option<[f64; 3]>,
}

impl MinorGridReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Sign pattern `(<= 0, >= 0, <= 0)` of the minors on a log-spaced grid
/// over `(x, y, z)` with fixed `z`.
pub fn hessian_minor_grid(
    lo: f64,
    hi: f64,
    count: usize,
    z: f64,
    tolerance: f64,
) -> Result<MinorGridReport> {
    Region::new(lo, hi)?;
    check_positive(z)?;
    let axis: Vec<f64> = if count == 1 {
        vec![(lo * hi).sqrt()]
    } else {
        (0..count)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (count - 1) as f64).exp())
            .collect()
    };
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&y| (x, y)))
        .collect();
    let scored: Vec<(f64, [f64; 3])> = points
        .par_iter()
        .map(|&(x, y)| {
            let h = SymmetrizedKernel::KuboMori.hessian([x, y, z]);
            let scale = h.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            let (m1, m2, m3) = minors(&h);
            let s = (m1 / scale)
                .max(-m2 / (scale * scale))
                .max(m3 / (scale * scale * scale));
            (if s.is_nan() { f64::INFINITY } else { s }, [x, y, z])
        })
        .collect();
    let mut worst: Option<(f64, [f64; 3])> = None;
    let mut violations = 0;
    for (s, p) in scored {
        if s > tolerance {
            violations += 1;
        }
        if worst.is_none_or(|w| s > w.0) {
            worst = Some((s, p));
        }
    }
    Ok(MinorGridReport {
        lo,
        hi,
        count,
        z,
        tolerance,
        points: points.len(),
        max_violation: worst.map_or(f64::NEG_INFINITY, |w| w.0),
        violations,
        worst: worst.map(|w| w.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Witness {
    pub seed: u64,
    pub trial: u64,
    pub point: [f64; 4],
    pub residuals: Lemma4Residuals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Report {
    pub seed: u64,
    pub trials: u64,
    pub region: Region,
    pub tolerance: f64,
    /// Most negative residual times `min(x, y, l, m)^2`.
    pub min_scaled_residual: f64,
    pub violations: u64,
    pub worst: Option<Lemma4Witness>,
}

impl Lemma4Report {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Random `(x < y, l, m)`; residuals are compared after scaling by the
/// squared smallest coordinate since `h_s'` is homogeneous of degree -2.
pub fn lemma4_scan(region: Region, trials: u64, seed: u64, tolerance: f64) -> Lemma4Report {
    let results: Vec<(u64, Scored<Lemma4Witness>)> = chunks(trials)
        .into_par_iter()
        .map(|(k, start, end)| {
            let mut rng = chunk_rng(seed, k);
            let mut count = 0;
            let mut worst = None;
            for trial in start..end {
                let p = region.sample_point(&mut rng);
                let mu = region.sample(&mut rng);
                let (mut x, mut y, lambda) = (p[0], p[1], p[2]);
                if x > y {
                    std::mem::swap(&mut x, &mut y);
                }
                if x == y {
                    continue;
                }
                let r = lemma4_check(x, y, lambda, mu).expect("sampled points are valid");
                let m = x.min(lambda).min(mu);
                let score = -r.min() * m * m;
                if !(score <= tolerance) {
                    count += 1;
                }
                let score = if score.is_nan() { f64::INFINITY } else { score };
                worst = better(
                    worst,
                    Some((
                        score,
                        trial,
                        Lemma4Witness {
                            seed: seed.wrapping_add(k),
                            trial,
                            point: [x, y, lambda, mu],
                            residuals: r,
                        },
                    )),
                );
            }
            (count, worst)
        })
        .collect();
    let mut violations = 0;
    let mut worst = None;
    for (c, w) in results {
        violations += c;
        worst = better(worst, w);
    }
    Lemma4Report {
        seed,
        trials,
        region,
        tolerance,
        min_scaled_residual: worst.map_or(f64::INFINITY, |w| -w.0),
        violations,
        worst: worst.map(|w| w.2),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityWitness {
    pub seed: u64,
    pub path: u64,
    pub step: usize,
    pub before: Vec<f64>,
    pub mixing: MixingStep,
    pub decrease: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub n: usize,
    pub seed: u64,
    pub paths: u64,
    pub steps_per_path: usize,
    pub evaluations: u64,
    pub tolerance: f64,
    /// Largest drop of `S¹` along a T-transform, relative to `max(1, |S¹|)`.
    pub max_decrease: f64,
    pub decreases: u64,
    pub max_scalar: f64,
    pub trace_state_scalar: f64,
    pub worst: Option<MonotonicityWitness>,
}

impl MonotonicityReport {
    pub fn passed(&self, max_tolerance: f64) -> bool {
        self.decreases == 0 && self.max_scalar <= self.trace_state_scalar + max_tolerance
    }
}

fn random_normalized_spectrum<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let region = Region { lo: 1e-2, hi: 1.0 };
    let s: Vec<f64> = (0..n).map(|_| region.sample(rng)).collect();
    let total: f64 = s.iter().sum();
    s.iter().map(|v| v / total).collect()
}

const PATH_CHUNK: u64 = 16;

/// Random normalized spectra followed by random T-transforms; reports any
/// decrease of the Kubo-Mori `S¹` and its largest value seen.
pub fn monotonicity_scan(
    n: usize,
    paths: u64,
    steps_per_path: usize,
    seed: u64,
    tolerance: f64,
) -> Result<MonotonicityReport> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: n });
    }
    let count = paths.div_ceil(PATH_CHUNK);
    type Partial = (u64, u64, f64, Option<(f64, u64, MonotonicityWitness)>);
    let results: Vec<Result<Partial>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            let (mut evals, mut drops, mut max_s) = (0u64, 0u64, f64::NEG_INFINITY);
            let mut worst: Option<(f64, u64, MonotonicityWitness)> = None;
            for path in (k * PATH_CHUNK)..((k + 1) * PATH_CHUNK).min(paths) {
                let mut spectrum = random_normalized_spectrum(n, &mut rng);
                let mut s = kubo_mori_scalar(&spectrum, true)?;
                evals += 1;
                max_s = max_s.max(s);
                for step in 0..steps_per_path {
                    let i = rng.random_range(0..n);
                    let j = (i + rng.random_range(1..n)) % n;
                    let mixing = MixingStep::new(i, j, 0.5 * rng.random::<f64>())?;
                    let next = t_transform(&spectrum, mixing)?;
                    let s_next = kubo_mori_scalar(&next, true)?;
                    evals += 1;
                    max_s = max_s.max(s_next);
                    let decrease = (s - s_next) / s.abs().max(1.0);
                    if decrease > tolerance {
                        drops += 1;
                    }
                    if worst.as_ref().is_none_or(|w| decrease > w.0) {
                        worst = Some((
                            decrease,
                            path,
                            MonotonicityWitness {
                                seed: seed.wrapping_add(k),
                                path,
                                step,
                                before: spectrum.clone(),
                                mixing,
                                decrease,
                            },
                        ));
                    }
                    spectrum = next;
                    s = s_next;
                }
            }
            Ok((evals, drops, max_s, worst))
        })
        .collect();
    let mut report = MonotonicityReport {
        n,
        seed,
        paths,
        steps_per_path,
        evaluations: 0,
        tolerance,
        max_decrease: f64::NEG_INFINITY,
        decreases: 0,
        max_scalar: f64::NEG_INFINITY,
        trace_state_scalar: trace_state_closed_form(MetricKind::KuboMori, n).expect("built-in"),
        worst: None,
    };
    let mut worst: Option<(f64, u64, MonotonicityWitness)> = None;
    for r in results {
        let (e, d, m, w) = r?;
        report.evaluations += e;
        report.decreases += d;
        report.max_scalar = report.max_scalar.max(m);
        if let Some(w) = w {
            if worst.as_ref().is_none_or(|b| w.0 > b.0) {
                worst = Some(w);
            }
        }
    }
    report.max_decrease = worst.as_ref().map_or(f64::NEG_INFINITY, |w| w.0);
    report.worst = worst.map(|w| w.2);
    Ok(report)
}

/// `(1/3)(∂/∂x - ∂/∂y) S¹` along the spectrum `(x, y, tail...)` by two routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalDerivative {
    /// Sum of `h_s'` terms over the tail.
    pub expansion: f64,
    /// Central differences of the Kubo-Mori scalar curvature.
    pub finite_difference: f64,
}

pub fn directional_derivative_check(x: f64, y: f64, tail: &[f64]) -> Result<DirectionalDerivative> {
    for &v in [x, y].iter().chain(tail) {
        check_positive(v)?;
    }
    if !(x < y) {
        return Err(Error::OrderViolation(x, y));
    }
    let k = SymmetrizedKernel::KuboMori;
    let d = |a: f64, b: f64, c: f64| k.h_s_dx(a, b, c);
    let mut e = 2.0 * d(x, x, y) - d(y, x, x) - 2.0 * d(y, x, y) + d(x, y, y);
    for &l in tail {
        e += 2.0 * (d(x, x, l) - d(y, y, l) + d(x, y, l) - d(y, x, l));
    }
    for &l in tail {
        for &m in tail {
            e += d(x, l, m) - d(y, l, m);
        }
    }

    let s_at = |s: f64| -> Result<f64> {
        let mut spectrum = vec![x + s, y - s];
        spectrum.extend_from_slice(tail);
        kubo_mori_scalar(&spectrum, false)
    };
    let h = 1e-3 * x.min(y - x).max(1e-6 * x);
    let central = |h: f64| -> Result<f64> { Ok((s_at(h)? - s_at(-h)?) / (2.0 * h)) };
    let fd = (4.0 * central(0.5 * h)? - central(h)?) / 3.0;
    Ok(DirectionalDerivative {
        expansion: e,
        finite_difference: fd / 3.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalReport {
    pub seed: u64,
    pub trials: u64,
    pub tolerance: f64,
    /// Most negative expansion value relative to the scale `sum 1/l^2`.
    pub min_scaled: f64,
    /// Largest relative disagreement of the two routes.
    pub max_route_gap: f64,
    pub violations: u64,
}

/// Random spectra of dimension `n ∈ dims` in `[0.01, 1]`; checks the sign of
/// the swap derivative and the agreement of the two routes.
pub fn directional_scan(
    dims: &[usize],
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<DirectionalReport> {
    if dims.iter().any(|&n| n < 2) {
        return Err(Error::DimensionTooSmall {
            min: 2,
            found: *dims.iter().min().unwrap_or(&0),
        });
    }
    let region = Region { lo: 1e-2, hi: 1.0 };
    let results: Vec<Result<(f64, f64, u64)>> = chunks(trials)
        .into_par_iter()
        .map(|(k, start, end)| {
            let mut rng = chunk_rng(seed, k);
            let (mut lo, mut gap, mut bad) = (f64::INFINITY, 0.0f64, 0u64);
            for _ in start..end {
                let n = dims[rng.random_range(0..dims.len())];
                let mut s: Vec<f64> = (0..n).map(|_| region.sample(&mut rng)).collect();
                let (mut x, mut y) = (s[0], s[1]);
                if x > y {
                    std::mem::swap(&mut x, &mut y);
                }
                if (y - x) < 1e-6 * y {
                    continue;
                }
                let tail = s.split_off(2);
                let r = directional_derivative_check(x, y, &tail)?;
                let scale: f64 = [x, y].iter().chain(&tail).map(|v| 1.0 / (v * v)).sum();
                let scaled = r.expansion / scale;
                if scaled < -tolerance {
                    bad += 1;
                }
                lo = lo.min(scaled);
                gap = gap.max((r.expansion - r.finite_difference).abs() / scale);
            }
            Ok((lo, gap, bad))
        })
        .collect();
    let mut report = DirectionalReport {
        seed,
        trials,
        tolerance,
        min_scaled: f64::INFINITY,
        max_route_gap: 0.0,
        violations: 0,
    };
    for r in results {
        let (lo, gap, bad) = r?;
        report.min_scaled = report.min_scaled.min(lo);
        report.max_route_gap = report.max_route_gap.max(gap);
        report.violations += bad;
    }
    Ok(report)
}
