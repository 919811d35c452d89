//! Accuracy metrics and speedup benchmarking.

mod bench;

pub use bench::{benchmark_speedup, time_runs, BenchReport};

use serde::{Deserialize, Serialize};

use crate::dae::VariableSpace;
use crate::error::{Error, Result};
use crate::sim::Trajectory;

/// A differential or algebraic variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum Channel {
    Theta(usize),
    Gamma(usize),
}

impl Channel {
    pub fn by_name(space: &VariableSpace, name: &str) -> Result<Self> {
        space
            .theta_index(name)
            .map(Channel::Theta)
            .or_else(|| space.gamma_index(name).map(Channel::Gamma))
            .ok_or_else(|| Error::UnknownChannel(name.into()))
    }

    pub fn name<'a>(&self, space: &'a VariableSpace) -> &'a str {
        match *self {
            Channel::Theta(i) => &space.theta_names()[i],
            Channel::Gamma(i) => &space.gamma_names()[i],
        }
    }

    fn value(&self, t: &Trajectory, k: usize) -> f64 {
        match *self {
            Channel::Theta(i) => t.theta()[(i, k)],
            Channel::Gamma(i) => t.gamma()[(i, k)],
        }
    }

    fn known(&self, t: &Trajectory) -> bool {
        match *self {
            Channel::Theta(i) => t.theta_known().get(i).copied().unwrap_or(false),
            Channel::Gamma(i) => t.gamma_known().get(i).copied().unwrap_or(false),
        }
    }
}

fn check_sets(reference: &[Trajectory], approx: &[Trajectory], channels: &[Channel]) -> Result<()> {
    if reference.is_empty() || channels.is_empty() {
        return Err(Error::Empty("metrics need at least one trajectory and one variable".into()));
    }
    if reference.len() != approx.len() {
        return Err(Error::GridMismatch(format!(
            "{} reference trajectories vs {} approximations",
            reference.len(),
            approx.len()
        )));
    }
    for (p, (r, a)) in reference.iter().zip(approx).enumerate() {
        if r.samples() != a.samples() || r.dt() != a.dt() {
            return Err(Error::GridMismatch(format!("point {p}: time grids differ")));
        }
        if r.samples() < 2 {
            return Err(Error::GridMismatch(format!("point {p}: no samples after t_0")));
        }
        if r.point() != a.point() {
            return Err(Error::GridMismatch(format!("point {p}: parameter points differ")));
        }
        for c in channels {
            if !c.known(r) || !c.known(a) {
                return Err(Error::MissingChannel(format!("{c:?} at point {p}")));
            }
        }
    }
    Ok(())
}

/// Worst absolute error and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstError {
    pub value: f64,
    pub point: usize,
    pub sample: usize,
    pub time: f64,
}

fn fold(reference: &[Trajectory], approx: &[Trajectory], channels: &[Channel]) -> (f64, usize, WorstError) {
    let mut sum = 0.0;
    let mut count = 0;
    let mut worst = WorstError {
        value: 0.0,
        point: 0,
        sample: 1,
        time: reference[0].time(1),
    };
    for (p, (r, a)) in reference.iter().zip(approx).enumerate() {
        for c in channels {
            for k in 1..r.samples() {
                let e = (c.value(r, k) - c.value(a, k)).abs();
                sum += e;
                count += 1;
                if e > worst.value || e.is_nan() {
                    worst = WorstError {
                        value: e,
                        point: p,
                        sample: k,
                        time: r.time(k),
                    };
                }
            }
        }
    }
    (sum, count, worst)
}

/// Mean absolute error over channels × samples k = 1..m × points.
pub fn mae_channels(reference: &[Trajectory], approx: &[Trajectory], channels: &[Channel]) -> Result<f64> {
    check_sets(reference, approx, channels)?;
    let (sum, count, _) = fold(reference, approx, channels);
    Ok(sum / count as f64)
}

/// Maximum absolute error over the same index range as [`mae_channels`].
pub fn max_ae_channels(reference: &[Trajectory], approx: &[Trajectory], channels: &[Channel]) -> Result<f64> {
    check_sets(reference, approx, channels)?;
    Ok(fold(reference, approx, channels).2.value)
}

/// MAE over differential variables.
pub fn mae(reference: &[Trajectory], approx: &[Trajectory], variables: &[usize]) -> Result<f64> {
    let ch: Vec<Channel> = variables.iter().map(|&i| Channel::Theta(i)).collect();
    mae_channels(reference, approx, &ch)
}

/// MaxAE over differential variables.
pub fn max_ae(reference: &[Trajectory], approx: &[Trajectory], variables: &[usize]) -> Result<f64> {
    let ch: Vec<Channel> = variables.iter().map(|&i| Channel::Theta(i)).collect();
    max_ae_channels(reference, approx, &ch)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableError {
    pub name: String,
    pub mae: f64,
    pub max_ae: f64,
    pub worst: WorstError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub mae: f64,
    pub max_ae: f64,
    pub worst_variable: String,
    pub worst: WorstError,
    pub variables: Vec<VariableError>,
    pub n_variables: usize,
    /// m, samples per trajectory excluding t_0
    pub samples: usize,
    pub points: usize,
}

/// Per-variable and aggregate errors for the named variables.
pub fn error_report(
    reference: &[Trajectory],
    approx: &[Trajectory],
    space: &VariableSpace,
    channels: &[Channel],
) -> Result<ErrorReport> {
    check_sets(reference, approx, channels)?;
    let mut variables = Vec::with_capacity(channels.len());
    for c in channels {
        let (sum, count, worst) = fold(reference, approx, std::slice::from_ref(c));
        variables.push(VariableError {
            name: c.name(space).to_string(),
            mae: sum / count as f64,
            max_ae: worst.value,
            worst,
        });
    }
    let (sum, count, worst) = fold(reference, approx, channels);
    let worst_variable = variables
        .iter()
        .find(|v| v.worst == worst)
        .map(|v| v.name.clone())
        .unwrap_or_default();
    Ok(ErrorReport {
        mae: sum / count as f64,
        max_ae: worst.value,
        worst_variable,
        worst,
        n_variables: channels.len(),
        samples: reference[0].samples() - 1,
        points: reference.len(),
        variables,
    })
}
