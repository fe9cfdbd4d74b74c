use monocurv_core::geometry::{oracle_scalar, MetricContext};
use monocurv_core::mcfun::{make_builtin, MetricKind};
use monocurv_core::scalar::{
    bures_scalar, kubo_mori_scalar, largest_scalar, largest_scalar_companion, normalize_scalar,
    scalar_theorem1, theorem1_report, CurvatureReport, EvaluationPath, HKernel,
};
use monocurv_core::states::{decompose, DensityMatrix};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};

/// What the scalar command evaluates: a bare spectrum or a full state.
#[derive(Debug, Clone)]
pub enum ScalarInput {
    Spectrum(Vec<f64>),
    State(DensityMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub path: EvaluationPath,
    pub value: f64,
    pub relative_difference: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarOutput {
    #[serde(flatten)]
    pub report: CurvatureReport,
    pub cross_check: Option<CrossCheck>,
}

fn closed_form(kind: MetricKind, spectrum: &[f64]) -> Result<f64> {
    Ok(match kind {
        MetricKind::Smallest => bures_scalar(spectrum)?,
        MetricKind::Largest => largest_scalar(spectrum)?,
        MetricKind::KuboMori => kubo_mori_scalar(spectrum, false)?,
        MetricKind::Custom => return Err(monocurv_core::Error::NotBuiltin(kind).into()),
    })
}

fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Evaluates `S` (and `S¹` for unit trace) along `path` and compares it
/// with an independent route.
pub fn scalar_report(
    config: &RunConfig,
    input: &ScalarInput,
    path: EvaluationPath,
) -> Result<ScalarOutput> {
    let kind = config.metric;
    let kernel = HKernel::builtin(kind)?;
    let spectrum = match input {
        ScalarInput::Spectrum(s) => s.clone(),
        ScalarInput::State(rho) => decompose(rho)?.eigenvalues,
    };
    let n = spectrum.len();
    let mut report = theorem1_report(&kernel, &spectrum)?;
    let theorem1 = report.scalar;
    let (value, other_path, other, tolerance) = match path {
        EvaluationPath::Theorem1 => (
            theorem1,
            EvaluationPath::ClosedForm,
            closed_form(kind, &spectrum)?,
            config.tolerances.cross_check,
        ),
        EvaluationPath::ClosedForm => (
            closed_form(kind, &spectrum)?,
            EvaluationPath::Theorem1,
            theorem1,
            config.tolerances.cross_check,
        ),
        EvaluationPath::Companion => {
            if kind != MetricKind::Largest {
                return Err(Error::Input(format!(
                    "the companion path is only available for the largest metric, not {kind}"
                )));
            }
            (
                largest_scalar_companion(&spectrum)?,
                EvaluationPath::ClosedForm,
                largest_scalar(&spectrum)?,
                config.tolerances.cross_check,
            )
        }
        EvaluationPath::Oracle => {
            if n < 2 {
                return Err(Error::Input("the oracle needs dimension at least 2".into()));
            }
            let rho = match input {
                ScalarInput::Spectrum(s) => DensityMatrix::from_diagonal(s)?,
                ScalarInput::State(rho) => rho.clone(),
            };
            let ctx = MetricContext::new(make_builtin(kind)?, rho)?;
            (
                oracle_scalar(&ctx, false)?,
                EvaluationPath::Theorem1,
                scalar_theorem1(&kernel, &spectrum)?,
                config.tolerances.oracle,
            )
        }
    };
    report.path = path;
    report.scalar = value;
    report.scalar_normalized = report.scalar_normalized.map(|_| normalize_scalar(value, n));
    if path != EvaluationPath::Theorem1 {
        report.kernel_sums = None;
    }
    let relative_difference = relative_difference(value, other);
    let check = CrossCheck {
        path: other_path,
        value: other,
        relative_difference,
        tolerance,
    };
    // NaN fails the check
    if !(relative_difference <= tolerance) {
        return Err(Error::CrossCheck(format!(
            "{} gives {value}, {} gives {other} (relative difference {relative_difference:e}, tolerance {tolerance:e})",
                path_name(path),
                path_name(other_path)
        )));
    }
    Ok(ScalarOutput {
        report,
        cross_check: Some(check),
    })
}

pub fn render_text(out: &ScalarOutput) -> String {
    let r = &out.report;
    let mut text = format!(
        "metric: {}\npath: {}\nS = {}\n",
        r.metric,
        path_name(r.path),
        r.scalar
    );
    if let Some(s1) = r.scalar_normalized {
        text += &format!("S1 = {s1}\n");
    }
    if let Some(c) = &out.cross_check {
        text += &format!(
            "cross-check ({}): {} (relative difference {:e})\n",
            path_name(c.path),
            c.value,
            c.relative_difference
        );
    }
    text
}

fn path_name(path: EvaluationPath) -> String {
    serde_json::to_value(path)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_else(|| format!("{path:?}"))
}
