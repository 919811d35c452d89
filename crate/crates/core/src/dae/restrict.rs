use super::model::{DaeModel, SolveOptions};
use crate::error::{Error, Result};
use crate::mor::Partition;

/// Evaluators over the retained rows of a model: φ[P^θ] and ψ[P^γ].
///
/// Every method takes full-length θ/γ buffers but only reads primary and
/// secondary differential entries, primary algebraic entries and the inputs;
/// only primary algebraic entries are written. Tertiary slots may hold
/// anything (including NaN).
#[derive(Debug, Clone)]
pub struct RestrictedModel<'a> {
    model: &'a DaeModel,
    phi_rows: Vec<usize>,
    psi_rows: Vec<usize>,
    psi_order: Option<Vec<usize>>,
}

impl DaeModel {
    pub fn restrict(&self, partition: &Partition) -> Result<RestrictedModel<'_>> {
        if partition.n_theta() != self.n_theta() {
            return Err(Error::dim("partition differential size", self.n_theta(), partition.n_theta()));
        }
        if partition.n_gamma() != self.n_gamma() {
            return Err(Error::dim("partition algebraic size", self.n_gamma(), partition.n_gamma()));
        }
        for &j in partition.primary_theta() {
            if j >= self.n_theta() {
                return Err(Error::IndexOutOfRange {
                    what: "primary differential".into(),
                    index: j,
                    len: self.n_theta(),
                });
            }
        }
        for &k in partition.primary_gamma() {
            if k >= self.n_gamma() {
                return Err(Error::IndexOutOfRange {
                    what: "primary algebraic".into(),
                    index: k,
                    len: self.n_gamma(),
                });
            }
        }
        let psi_rows = partition.primary_gamma().to_vec();
        let psi_order = self.explicit_order().map(|order| {
            let mut keep = vec![false; self.n_gamma()];
            for &k in &psi_rows {
                keep[k] = true;
            }
            order.iter().copied().filter(|&k| keep[k]).collect()
        });
        Ok(RestrictedModel {
            model: self,
            phi_rows: partition.primary_theta().to_vec(),
            psi_rows,
            psi_order,
        })
    }
}

impl<'a> RestrictedModel<'a> {
    pub fn model(&self) -> &'a DaeModel {
        self.model
    }

    pub fn phi_rows(&self) -> &[usize] {
        &self.phi_rows
    }

    pub fn psi_rows(&self) -> &[usize] {
        &self.psi_rows
    }

    /// φ[P^θ] into `out` (length card(P^θ)).
    pub fn derivatives_into(&self, theta: &[f64], gamma: &[f64], inputs: &[f64], out: &mut [f64]) {
        self.model.derivative_rows(&self.phi_rows, theta, gamma, inputs, out);
    }

    pub fn derivatives(&self, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.phi_rows.len()];
        self.derivatives_into(theta, gamma, inputs, &mut out);
        out
    }

    /// ψ[P^γ] in sorted row order.
    pub fn residuals(&self, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> Vec<f64> {
        let eq = self.model.equations();
        self.psi_rows.iter().map(|&k| eq.residual(k, theta, gamma, inputs)).collect()
    }

    /// Solves ψ[P^γ] = 0 for γ[P^γ] in place.
    pub fn solve_primary(&self, theta: &[f64], gamma: &mut [f64], inputs: &[f64], opts: SolveOptions) -> Result<()> {
        match &self.psi_order {
            Some(order) => {
                self.model.assign_rows(order, theta, gamma, inputs);
                Ok(())
            }
            None => self.model.newton_rows(&self.psi_rows, theta, gamma, inputs, opts),
        }
    }
}
