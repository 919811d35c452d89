use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dae::{DaeModel, InputSchedule};
use crate::error::{Error, Result};
use crate::hybrid::HybridModel;
use crate::sim::{integrate, StepSettings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Median wall-clock seconds of the full-model run.
    pub full_seconds: f64,
    /// Median wall-clock seconds of the hybrid run.
    pub hybrid_seconds: f64,
    pub speedup: f64,
    pub n_theta: usize,
    pub n_gamma: usize,
    pub n_primary_theta: usize,
    pub n_primary_gamma: usize,
    pub full_steps: usize,
    pub hybrid_steps: usize,
    pub repeats: usize,
    pub full_runs: Vec<f64>,
    pub hybrid_runs: Vec<f64>,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Wall-clock seconds of `repeats` sequential calls of `f`.
pub fn time_runs<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        std::hint::black_box(f()?);
        out.push(start.elapsed().as_secs_f64().max(1e-9));
    }
    Ok(out)
}

/// Times full and hybrid runs on the same schedule, alternating, and
/// reports the ratio of medians.
pub fn benchmark_speedup(
    model: &DaeModel,
    hybrid: &HybridModel,
    schedule: &InputSchedule,
    settings: StepSettings,
    repeats: usize,
) -> Result<BenchReport> {
    if repeats < 3 {
        return Err(Error::InvalidParameter(format!("at least 3 repeats are required, got {repeats}")));
    }
    hybrid.artifact().check_model(model)?;
    let steps = settings.intervals()? * settings.substeps;
    // warm-up, also surfaces failures before timing
    integrate(model, schedule, settings)?;
    hybrid.integrate(schedule, settings)?;
    let mut full_runs = Vec::with_capacity(repeats);
    let mut hybrid_runs = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        full_runs.extend(time_runs(1, || integrate(model, schedule, settings))?);
        hybrid_runs.extend(time_runs(1, || hybrid.integrate(schedule, settings))?);
    }
    let full_seconds = median(&full_runs);
    let hybrid_seconds = median(&hybrid_runs);
    let part = &hybrid.artifact().partition;
    Ok(BenchReport {
        full_seconds,
        hybrid_seconds,
        speedup: full_seconds / hybrid_seconds,
        n_theta: model.n_theta(),
        n_gamma: model.n_gamma(),
        n_primary_theta: part.primary_theta().len(),
        n_primary_gamma: part.primary_gamma().len(),
        full_steps: steps,
        hybrid_steps: steps,
        repeats,
        full_runs,
        hybrid_runs,
    })
}
