use serde::{Deserialize, Serialize};

use super::trajectory::{ParamPoint, Trajectory};
use crate::dae::{DaeModel, InputSchedule, SolveOptions};
use crate::error::{Error, Result};

/// Fixed-step settings: recording interval `dt`, `substeps` internal explicit
/// Euler steps per interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSettings {
    pub t_final: f64,
    pub dt: f64,
    pub substeps: usize,
}

impl StepSettings {
    pub fn new(t_final: f64, dt: f64, substeps: usize) -> Self {
        Self { t_final, dt, substeps }
    }

    /// Number of recorded intervals m = t_final / dt.
    pub fn intervals(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidParameter("substeps must be at least 1".into()));
        }
        let m = (self.t_final / self.dt).round();
        if (m * self.dt - self.t_final).abs() > 1e-9 * self.t_final.max(self.dt) {
            return Err(Error::InvalidParameter(format!(
                "t_final {} is not a multiple of dt {}",
                self.t_final, self.dt
            )));
        }
        Ok(m as usize)
    }

    pub fn step(&self) -> f64 {
        self.dt / self.substeps as f64
    }
}

pub(crate) fn first_non_finite(v: &[f64]) -> Option<usize> {
    v.iter().position(|x| !x.is_finite())
}

/// Explicit-Euler integration of the full model.
///
/// At each internal step the algebraic variables are solved at t_n and
/// θ(t_{n+1}) = θ(t_n) + h·φ(θ(t_n), γ(t_n), μ(t_n)).
pub fn integrate(model: &DaeModel, schedule: &InputSchedule, settings: StepSettings) -> Result<Trajectory> {
    let m = settings.intervals()?;
    let resolved = schedule.resolve(model.inputs())?;
    resolved.check_covers(settings.t_final)?;
    let h = settings.step();
    let opts = SolveOptions::default();
    let n_theta = model.n_theta();
    let all_rows: Vec<usize> = (0..n_theta).collect();
    let all_gamma: Vec<usize> = (0..model.n_gamma()).collect();

    let mut traj = Trajectory::allocate(n_theta, model.n_gamma(), resolved.len(), m + 1, settings.dt);
    let mut theta = model.space().initial().to_vec();
    let mut gamma = vec![0.0; model.n_gamma()];
    let mut inputs = resolved.eval(0.0);
    let mut rate = vec![0.0; n_theta];

    let solve = |theta: &[f64], gamma: &mut [f64], inputs: &[f64]| -> Result<()> {
        match model.explicit_order() {
            Some(order) => {
                model.assign_rows(order, theta, gamma, inputs);
                Ok(())
            }
            None => model.newton_rows(&all_gamma, theta, gamma, inputs, opts),
        }
    };

    solve(&theta, &mut gamma, &inputs)?;
    traj.set_sample(0, &theta, &gamma, &inputs);
    for n in 0..m {
        let t_n = n as f64 * settings.dt;
        for s in 0..settings.substeps {
            model.derivative_rows(&all_rows, &theta, &gamma, &inputs, &mut rate);
            for (x, r) in theta.iter_mut().zip(&rate) {
                *x += h * r;
            }
            let t = if s + 1 == settings.substeps {
                (n + 1) as f64 * settings.dt
            } else {
                t_n + (s + 1) as f64 * h
            };
            if let Some(i) = first_non_finite(&theta) {
                return Err(Error::NonFinite {
                    variable: model.space().theta_names()[i].clone(),
                    time: t,
                });
            }
            resolved.eval_into(t, &mut inputs);
            solve(&theta, &mut gamma, &inputs).map_err(|e| Error::AtTime {
                time: t,
                source: Box::new(e),
            })?;
        }
        traj.set_sample(n + 1, &theta, &gamma, &inputs);
    }
    Ok(traj)
}

/// [`integrate`] with the trajectory tagged by its parameter point.
pub fn integrate_point(
    model: &DaeModel,
    base: &InputSchedule,
    point: &ParamPoint,
    settings: StepSettings,
) -> Result<Trajectory> {
    let mut traj = integrate(model, &point.schedule_over(base), settings)?;
    traj.set_point(point.clone());
    Ok(traj)
}
