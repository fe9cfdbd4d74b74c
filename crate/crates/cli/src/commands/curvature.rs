use monocurv_core::geometry::{
    christoffel, metric, riemann, riemann_normalized, sectional, MetricContext,
};
use monocurv_core::mcfun::{make_builtin, MetricKind};
use monocurv_core::states::{DensityMatrix, TangentVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::MatrixJson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `g(X, Y)`
    Metric,
    /// `Γ(X, Y)`
    Christoffel,
    /// `R(X, Y, Z, W)`
    Riemann,
    /// `K(X, Y)`
    Sectional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureOutput {
    pub metric: MetricKind,
    pub quantity: Quantity,
    pub normalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
}

pub fn curvature_values(
    kind: MetricKind,
    rho: &DensityMatrix,
    vectors: &[TangentVector],
    quantity: Quantity,
    normalized: bool,
) -> Result<CurvatureOutput> {
    let needed = if quantity == Quantity::Riemann { 4 } else { 2 };
    if vectors.len() != needed {
        return Err(Error::Input(format!(
            "{quantity:?} needs {needed} tangent vectors, got {}",
            vectors.len()
        )));
    }
    if normalized && !matches!(quantity, Quantity::Riemann | Quantity::Sectional) {
        return Err(Error::Input(format!(
            "--normalized applies to riemann and sectional, not {quantity:?}"
        )));
    }
    let ctx = MetricContext::new(make_builtin(kind)?, rho.clone())?;
    let v = vectors;
    let mut out = CurvatureOutput {
        metric: kind,
        quantity,
        normalized,
        value: None,
        matrix: None,
    };
    match quantity {
        Quantity::Metric => out.value = Some(metric(&ctx, &v[0], &v[1])?),
        Quantity::Christoffel => {
            out.matrix = Some(MatrixJson::from_matrix(
                christoffel(&ctx, &v[0], &v[1])?.entries(),
            ))
        }
        Quantity::Riemann if normalized => {
            out.value = Some(riemann_normalized(&ctx, &v[0], &v[1], &v[2], &v[3])?)
        }
        Quantity::Riemann => out.value = Some(riemann(&ctx, &v[0], &v[1], &v[2], &v[3])?),
        Quantity::Sectional => out.value = Some(sectional(&ctx, &v[0], &v[1], normalized)?.value),
    }
    Ok(out)
}
