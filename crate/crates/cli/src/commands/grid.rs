use std::io::Write;

use monocurv_core::mcfun::MetricKind;
use monocurv_core::scalar::{kubo_mori_scalar, normalize_scalar, scalar_theorem1, HKernel};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub scalar_curvature: f64,
}

/// `S¹` of a unit-trace spectrum.
pub fn normalized_scalar(kind: MetricKind, spectrum: &[f64]) -> Result<f64> {
    Ok(match kind {
        MetricKind::KuboMori => kubo_mori_scalar(spectrum, true)?,
        _ => normalize_scalar(
            scalar_theorem1(&HKernel::builtin(kind)?, spectrum)?,
            spectrum.len(),
        ),
    })
}

/// Barycentric grid `(i, j, k)/mesh` on the 2-simplex, keeping points whose
/// coordinates are all at least `margin`. The barycenter is appended when
/// the mesh does not contain it.
pub fn simplex_grid(kind: MetricKind, mesh: usize, margin: f64) -> Result<Vec<GridRow>> {
    if mesh == 0 {
        return Err(Error::Input("mesh must be positive".into()));
    }
    if !(margin > 0.0 && margin < 1.0 / 3.0) {
        return Err(Error::Input(format!(
            "margin must lie in (0, 1/3), got {margin}"
        )));
    }
    let m = mesh as f64;
    let mut rows = Vec::new();
    for i in 0..=mesh {
        for j in 0..=(mesh - i) {
            let k = mesh - i - j;
            let l = [i as f64 / m, j as f64 / m, k as f64 / m];
            if l.iter().any(|&v| v < margin) {
                continue;
            }
            rows.push(GridRow {
                lambda1: l[0],
                lambda2: l[1],
                lambda3: l[2],
                scalar_curvature: normalized_scalar(kind, &l)?,
            });
        }
    }
    if !mesh.is_multiple_of(3) {
        let b = [1.0 / 3.0; 3];
        rows.push(GridRow {
            lambda1: b[0],
            lambda2: b[1],
            lambda3: b[2],
            scalar_curvature: normalized_scalar(kind, &b)?,
        });
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[GridRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
