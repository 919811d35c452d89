use super::artifact::HybridArtifact;
use crate::dae::{DaeModel, InputSchedule, SolveOptions};
use crate::error::{Error, Result};
use crate::sim::{first_non_finite, ParamPoint, StepSettings, Trajectory};
use crate::thermal::model_from_document;

/// An artifact bound to the model it was built from.
#[derive(Debug, Clone)]
pub struct HybridModel {
    artifact: HybridArtifact,
    model: DaeModel,
}

impl HybridModel {
    pub fn new(artifact: HybridArtifact, model: DaeModel) -> Result<Self> {
        artifact.validate()?;
        artifact.check_model(&model)?;
        model.restrict(&artifact.partition)?;
        Ok(Self { artifact, model })
    }

    /// Rebuilds the model from the embedded document.
    pub fn from_artifact(artifact: HybridArtifact) -> Result<Self> {
        let model = model_from_document(&artifact.model)?;
        Self::new(artifact, model)
    }

    pub fn artifact(&self) -> &HybridArtifact {
        &self.artifact
    }

    pub fn model(&self) -> &DaeModel {
        &self.model
    }

    pub fn default_settings(&self, t_final: f64) -> StepSettings {
        StepSettings::new(t_final, self.artifact.defaults.dt, self.artifact.defaults.substeps)
    }

    /// Recurrent hybrid integration.
    ///
    /// Per internal step: solve ψ[P^γ] = 0 at t_n, Euler-update θ^P, then set
    /// θ^S(t_{n+1}) from θ^P(t_{n+1}) through the coupling layer. Tertiary
    /// entries are never computed and are NaN (unknown) in the result.
    pub fn integrate(&self, schedule: &InputSchedule, settings: StepSettings) -> Result<Trajectory> {
        let model = &self.model;
        let a = &self.artifact;
        let part = &a.partition;
        let m = settings.intervals()?;
        let resolved = schedule.resolve(model.inputs())?;
        resolved.check_covers(settings.t_final)?;
        let restricted = model.restrict(part)?;
        let h = settings.step();
        let opts = SolveOptions::default();

        let init = model.space().initial();
        let scale = model.space().scale();
        let prim = part.primary_theta();
        let sec = part.secondary_theta();
        let p_scale: Vec<f64> = prim.iter().map(|&i| scale[i]).collect();
        let p_init: Vec<f64> = prim.iter().map(|&i| init[i]).collect();
        let s_init_scaled: Vec<f64> = sec.iter().map(|&i| scale[i] * init[i]).collect();

        let mut theta = vec![f64::NAN; model.n_theta()];
        for &i in prim.iter().chain(sec) {
            theta[i] = init[i];
        }
        let mut gamma = vec![f64::NAN; model.n_gamma()];
        for &k in part.primary_gamma() {
            gamma[k] = 0.0;
        }
        let mut inputs = resolved.eval(0.0);
        let mut rate = vec![0.0; prim.len()];
        let mut x_p = vec![0.0; prim.len()];
        let mut out_s = vec![0.0; sec.len()];

        let mut traj = Trajectory::allocate(model.n_theta(), model.n_gamma(), resolved.len(), m + 1, settings.dt);
        let mut theta_known = vec![false; model.n_theta()];
        for &i in prim.iter().chain(sec) {
            theta_known[i] = true;
        }
        let mut gamma_known = vec![false; model.n_gamma()];
        for &k in part.primary_gamma() {
            gamma_known[k] = true;
        }
        traj.set_known(theta_known, gamma_known);

        restricted.solve_primary(&theta, &mut gamma, &inputs, opts)?;
        traj.set_sample(0, &theta, &gamma, &inputs);
        for n in 0..m {
            let t_n = n as f64 * settings.dt;
            for s in 0..settings.substeps {
                restricted.derivatives_into(&theta, &gamma, &inputs, &mut rate);
                for (c, &i) in prim.iter().enumerate() {
                    theta[i] += h * rate[c];
                }
                if !a.coupling.is_empty() {
                    for (c, &i) in prim.iter().enumerate() {
                        x_p[c] = p_scale[c] * (theta[i] - p_init[c]);
                    }
                    a.coupling.forward_into(&x_p, &s_init_scaled, &mut out_s);
                    for (c, &i) in sec.iter().enumerate() {
                        theta[i] = init[i] + out_s[c] / scale[i];
                    }
                }
                let t = if s + 1 == settings.substeps {
                    (n + 1) as f64 * settings.dt
                } else {
                    t_n + (s + 1) as f64 * h
                };
                if let Some(i) = prim.iter().chain(sec).copied().find(|&i| !theta[i].is_finite()) {
                    return Err(Error::NonFinite {
                        variable: model.space().theta_names()[i].clone(),
                        time: t,
                    });
                }
                resolved.eval_into(t, &mut inputs);
                restricted
                    .solve_primary(&theta, &mut gamma, &inputs, opts)
                    .map_err(|e| Error::AtTime {
                        time: t,
                        source: Box::new(e),
                    })?;
            }
            traj.set_sample(n + 1, &theta, &gamma, &inputs);
        }
        Ok(traj)
    }

    /// [`HybridModel::integrate`] with the trajectory tagged by its point.
    pub fn integrate_point(&self, base: &InputSchedule, point: &ParamPoint, settings: StepSettings) -> Result<Trajectory> {
        let mut traj = self.integrate(&point.schedule_over(base), settings)?;
        traj.set_point(point.clone());
        Ok(traj)
    }

    /// Fills tertiary differential variables from the reconstruction layer and
    /// tertiary algebraic variables from their own equations, sample by
    /// sample.
    pub fn reconstruct_tertiary(&self, traj: &Trajectory) -> Result<Trajectory> {
        let model = &self.model;
        let part = &self.artifact.partition;
        let layer = &self.artifact.reconstruction;
        if traj.theta().nrows() != model.n_theta() || traj.gamma().nrows() != model.n_gamma() {
            return Err(Error::dim("trajectory differential rows", model.n_theta(), traj.theta().nrows()));
        }
        if let Some(&i) = part
            .primary_theta()
            .iter()
            .chain(part.secondary_theta())
            .find(|&&i| !traj.theta_known()[i])
        {
            return Err(Error::MissingChannel(model.space().theta_names()[i].clone()));
        }
        if let Some(&k) = part.primary_gamma().iter().find(|&&k| !traj.gamma_known()[k]) {
            return Err(Error::MissingChannel(model.space().gamma_names()[k].clone()));
        }
        if traj.inputs().nrows() != model.inputs().len() {
            return Err(Error::MissingChannel(
                "trajectory carries no input samples; tertiary algebraic variables need them".into(),
            ));
        }

        let init = model.space().initial();
        let scale = model.space().scale();
        let prim = part.primary_theta();
        let tert = part.tertiary_theta();
        let t_init_scaled: Vec<f64> = tert.iter().map(|&i| scale[i] * init[i]).collect();
        let tg = part.tertiary_gamma();
        let order: Option<Vec<usize>> = model.explicit_order().map(|o| {
            let mut keep = vec![false; model.n_gamma()];
            for &k in tg {
                keep[k] = true;
            }
            o.iter().copied().filter(|&k| keep[k]).collect()
        });

        let mut out = traj.clone();
        let mut x_p = vec![0.0; prim.len()];
        let mut out_t = vec![0.0; tert.len()];
        let mut theta = vec![0.0; model.n_theta()];
        let mut gamma = vec![0.0; model.n_gamma()];
        let mut inputs = vec![0.0; model.inputs().len()];
        for k in 0..traj.samples() {
            theta.copy_from_slice(traj.theta().column(k).as_slice());
            gamma.copy_from_slice(traj.gamma().column(k).as_slice());
            inputs.copy_from_slice(traj.inputs().column(k).as_slice());
            for (c, &i) in prim.iter().enumerate() {
                x_p[c] = scale[i] * (theta[i] - init[i]);
            }
            layer.forward_into(&x_p, &t_init_scaled, &mut out_t);
            for (c, &i) in tert.iter().enumerate() {
                theta[i] = init[i] + out_t[c] / scale[i];
            }
            for &j in tg {
                if !gamma[j].is_finite() {
                    gamma[j] = 0.0;
                }
            }
            match &order {
                Some(o) => model.assign_rows(o, &theta, &mut gamma, &inputs),
                None => model.newton_rows(tg, &theta, &mut gamma, &inputs, SolveOptions::default())?,
            }
            out.theta_mut().column_mut(k).copy_from_slice(&theta);
            out.gamma_mut().column_mut(k).copy_from_slice(&gamma);
        }
        out.theta_known_mut().iter_mut().for_each(|b| *b = true);
        out.gamma_known_mut().iter_mut().for_each(|b| *b = true);
        if let Some(i) = first_non_finite(out.theta().as_slice()) {
            let n = model.n_theta();
            return Err(Error::NonFinite {
                variable: model.space().theta_names()[i % n].clone(),
                time: traj.time(i / n),
            });
        }
        Ok(out)
    }
}
