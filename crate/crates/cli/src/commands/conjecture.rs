use std::time::{Instant, SystemTime, UNIX_EPOCH};

use monocurv_core::conjecture::{
    concavity_scan, hessian_minor_grid, lemma4_scan, monotonicity_scan, ConcavityReport,
    Lemma4Report, MinorGridReport, MonotonicityReport, SymmetrizedKernel,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;

/// Offsets keeping the random streams of different scans apart.
const LEMMA4_STREAM: u64 = 1 << 40;
const MONOTONICITY_STREAM: u64 = 2 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub seed: u64,
    pub config: RunConfig,
    pub monotonicity: MonotonicityReport,
    pub concavity: ConcavityReport,
    pub minors: MinorGridReport,
    pub lemma4: Lemma4Report,
    /// Names of the scans that found a violation beyond tolerance.
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// Runs the Kubo-Mori monotonicity, concavity, Hessian-minor and derivative-inequality scans.
pub fn conjecture_report(config: &RunConfig) -> Result<ConjectureReport> {
    config.validate()?;
    let start = Instant::now();
    let (tol, trials, seed) = (&config.tolerances, &config.trials, config.seed);
    let monotonicity = monotonicity_scan(
        config.dimension,
        trials.paths,
        trials.steps,
        seed.wrapping_add(MONOTONICITY_STREAM),
        tol.monotonicity,
    )?;
    let concavity = concavity_scan(
        &SymmetrizedKernel::KuboMori,
        config.region,
        trials.concavity,
        seed,
        tol.concavity,
    );
    let minors = hessian_minor_grid(
        config.minor_grid.lo,
        config.minor_grid.hi,
        trials.grid,
        1.0,
        tol.minors,
    )?;
    let lemma4 = lemma4_scan(
        config.region,
        trials.lemma4,
        seed.wrapping_add(LEMMA4_STREAM),
        tol.lemma4,
    );

    let mut violations = Vec::new();
    if !monotonicity.passed(tol.maximum) {
        violations.push("monotonicity".to_string());
    }
    if !concavity.passed() {
        violations.push("concavity".to_string());
    }
    if !minors.passed() {
        violations.push("minors".to_string());
    }
    if !lemma4.passed() {
        violations.push("lemma4".to_string());
    }
    let (wall_time_seconds, timestamp) = if config.deterministic {
        (None, None)
    } else {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        (Some(start.elapsed().as_secs_f64()), Some(now))
    };
    Ok(ConjectureReport {
        seed,
        config: config.clone(),
        monotonicity,
        concavity,
        minors,
        lemma4,
        violations,
        wall_time_seconds,
        timestamp,
    })
}
