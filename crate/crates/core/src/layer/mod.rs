//! Closed-form one-layer linear networks mapping primary differential
//! offsets to secondary (coupling) or tertiary (reconstruction) offsets.
//!
//! All inputs and outputs are scaled offsets scale ⊙ (θ − θ(0)).

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mor::ReducedBasis;
use crate::serde_util::{dense_rows, one_based};

/// Smallest accepted eigenvalue ratio of the normal-equations matrix.
pub const CONDITION_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Identity,
    /// Clamp of the scaled physical value at zero.
    Relu,
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "relu" => Ok(Self::Relu),
            other => Err(Error::InvalidParameter(format!("unknown activation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearLayer {
    #[serde(with = "dense_rows")]
    weights: DMatrix<f64>,
    bias: Vec<f64>,
    activation: Activation,
    /// Output variable indices.
    #[serde(with = "one_based")]
    outputs: Vec<usize>,
    /// Input variable indices.
    #[serde(with = "one_based")]
    inputs: Vec<usize>,
    /// Ñ, the number of modes used in calibration.
    modes: usize,
}

fn gather(v: &DMatrix<f64>, rows: &[usize], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |r, c| v[(rows[r], c)])
}

fn check_sets(basis: &ReducedBasis, primary: &[usize], targets: &[usize]) -> Result<()> {
    let n = basis.n_theta();
    for (what, set) in [("primary", primary), ("target", targets)] {
        if let Some(&i) = set.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange {
                what: format!("{what} index"),
                index: i,
                len: n,
            });
        }
    }
    if primary.is_empty() {
        return Err(Error::Empty("primary index set".into()));
    }
    if let Some(i) = targets.iter().find(|i| primary.contains(i)) {
        return Err(Error::InvalidParameter(format!("target index {} is also primary", i + 1)));
    }
    Ok(())
}

impl LinearLayer {
    pub fn new(weights: DMatrix<f64>, activation: Activation, outputs: Vec<usize>, inputs: Vec<usize>, modes: usize) -> Result<Self> {
        if weights.nrows() != outputs.len() {
            return Err(Error::dim("layer output count", outputs.len(), weights.nrows()));
        }
        if weights.ncols() != inputs.len() {
            return Err(Error::dim("layer input count", inputs.len(), weights.ncols()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("layer weights must be finite".into()));
        }
        Ok(Self {
            bias: vec![0.0; outputs.len()],
            weights,
            activation,
            outputs,
            inputs,
            modes,
        })
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Output offsets for primary offsets `input`. `initial` holds the scaled
    /// initial values of the outputs and only matters for ReLU, which clamps
    /// `initial + W·input + b` at zero.
    pub fn forward(&self, input: &[f64], initial: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.inputs.len() {
            return Err(Error::dim("layer input", self.inputs.len(), input.len()));
        }
        if initial.len() != self.outputs.len() {
            return Err(Error::dim("layer output initial values", self.outputs.len(), initial.len()));
        }
        let mut out = vec![0.0; self.outputs.len()];
        self.forward_into(input, initial, &mut out);
        Ok(out)
    }

    /// Unchecked [`LinearLayer::forward`] for the step loop.
    pub(crate) fn forward_into(&self, input: &[f64], initial: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.bias);
        // column-major storage: accumulate one input column at a time
        let rows = out.len();
        if rows == 0 {
            return;
        }
        for (col, x) in self.weights.as_slice().chunks_exact(rows).zip(input) {
            for (o, w) in out.iter_mut().zip(col) {
                *o += w * x;
            }
        }
        if self.activation == Activation::Relu {
            for (o, init) in out.iter_mut().zip(initial) {
                *o = (init + *o).max(0.0) - init;
            }
        }
    }
}

/// W = V[T,1:Ñ]·(V[P,1:Ñ]ᵀ V[P,1:Ñ])⁻¹·V[P,1:Ñ]ᵀ, b = 0.
pub fn calibrate_layer(
    basis: &ReducedBasis,
    primary: &[usize],
    targets: &[usize],
    n_stab: usize,
    activation: Activation,
) -> Result<LinearLayer> {
    check_sets(basis, primary, targets)?;
    if n_stab == 0 || n_stab > basis.n_modes() {
        return Err(Error::InvalidParameter(format!(
            "Ñ = {n_stab} must lie in 1..={}",
            basis.n_modes()
        )));
    }
    let v = basis.modes();
    let vp = gather(v, primary, n_stab);
    let vt = gather(v, targets, n_stab);
    let gram = vp.transpose() * &vp;
    let eig = SymmetricEigen::new(gram.clone());
    let max = eig.eigenvalues.amax();
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, e| m.min(*e));
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if !(ratio >= CONDITION_THRESHOLD) {
        return Err(Error::Singular {
            what: format!("normal equations with Ñ = {n_stab}; use fewer stabilisation modes"),
            ratio,
        });
    }
    let chol = gram.cholesky().ok_or_else(|| Error::Singular {
        what: format!("normal equations with Ñ = {n_stab}; use fewer stabilisation modes"),
        ratio,
    })?;
    // W = V_T · G⁻¹ · V_Pᵀ
    let w = &vt * chol.solve(&vp.transpose());
    LinearLayer::new(w, activation, targets.to_vec(), primary.to_vec(), n_stab)
}

/// Square interpolation route W = V[T,:]·V[P,:]⁻¹ (requires card(P) = N).
pub fn calibrate_exact(basis: &ReducedBasis, primary: &[usize], targets: &[usize], activation: Activation) -> Result<LinearLayer> {
    check_sets(basis, primary, targets)?;
    let n = basis.n_modes();
    if primary.len() != n {
        return Err(Error::dim("primary set for the square interpolation route", n, primary.len()));
    }
    let v = basis.modes();
    let vp = gather(v, primary, n);
    let vt = gather(v, targets, n);
    // W V_P = V_T  <=>  V_Pᵀ Wᵀ = V_Tᵀ
    let wt = vp.transpose().lu().solve(&vt.transpose()).ok_or_else(|| Error::Singular {
        what: "interpolation matrix V[P,:]".into(),
        ratio: 0.0,
    })?;
    LinearLayer::new(wt.transpose(), activation, targets.to_vec(), primary.to_vec(), n)
}
