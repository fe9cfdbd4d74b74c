//! JSON and text input formats.

use std::path::Path;

use monocurv_core::states::{CMatrix, DensityMatrix, TangentVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A number such as `0.25`, `1e-3` or the exact fraction `1/3`.
pub fn parse_number(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || Error::Input(format!("cannot parse `{text}` as a number"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Input(format!("zero denominator in `{text}`")));
            }
            BigRational::new(num, den).to_f64().ok_or_else(bad)
        }
        None => text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(bad),
    }
}

/// Comma separated list of numbers.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(parse_number)
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Input("empty spectrum".into()));
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rows {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl Rows {
    fn get(&self, n: usize, what: &str) -> Result<Vec<f64>> {
        let flat: Vec<f64> = match self {
            Rows::Nested(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Input(format!("`{what}` must be {n}x{n}")));
                }
                rows.concat()
            }
            Rows::Flat(v) => v.clone(),
        };
        if flat.len() != n * n {
            return Err(Error::Input(format!(
                "`{what}` has {} entries, expected {}",
                flat.len(),
                n * n
            )));
        }
        Ok(flat)
    }
}

/// `{"n": n, "re": [[..]], "im": [[..]]}`, row major; `im` may be omitted
/// and either part may also be a flat array of `n*n` numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Rows,
    #[serde(default)]
    pub im: Option<Rows>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let part = |f: fn(&Complex64) -> f64| {
            Rows::Nested(
                (0..n)
                    .map(|i| (0..n).map(|j| f(&m[(i, j)])).collect())
                    .collect(),
            )
        };
        Self {
            n,
            re: part(|z| z.re),
            im: Some(part(|z| z.im)),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Input("matrix dimension must be positive".into()));
        }
        let re = self.re.get(n, "re")?;
        let im = match &self.im {
            Some(rows) => rows.get(n, "im")?,
            None => vec![0.0; n * n],
        };
        Ok(CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(re[i * n + j], im[i * n + j])
        }))
    }
}

/// A state file holds either a density matrix or a plain spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Matrix(MatrixJson),
    Spectrum(Vec<f64>),
}

impl StateJson {
    pub fn to_state(&self) -> Result<DensityMatrix> {
        Ok(match self {
            StateJson::Matrix(m) => DensityMatrix::new(m.to_matrix()?)?,
            StateJson::Spectrum(s) => DensityMatrix::from_diagonal(s)?,
        })
    }
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    let state: StateJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    state.to_state()
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(
        path,
        serde_json::to_string_pretty(&MatrixJson::from_matrix(rho.entries()))? + "\n",
    )?;
    Ok(())
}

/// A tangent vector, or the string `"rho"` for the base point itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorJson {
    Named(String),
    Matrix(MatrixJson),
}

pub fn read_vectors(path: &Path, rho: &DensityMatrix) -> Result<Vec<TangentVector>> {
    let list: Vec<VectorJson> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    list.iter()
        .map(|v| match v {
            VectorJson::Named(name) if name == "rho" => Ok(rho.as_tangent()),
            VectorJson::Named(name) => Err(Error::Input(format!("unknown vector name `{name}`"))),
            VectorJson::Matrix(m) => Ok(TangentVector::new(m.to_matrix()?)?),
        })
        .collect()
}
