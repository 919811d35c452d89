use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::incidence::Incidence;
use super::schedule::InputChannel;
use super::space::VariableSpace;
use crate::error::{Error, Result};

/// Row-wise equations of a semi-explicit DAE
///
/// ```text
/// dθ/dt = φ(θ, γ, μ)
///     0 = ψ(θ, γ, μ)
/// ```
///
/// Rows are evaluated one at a time so that a reduced model only pays for the
/// rows it keeps. Row `k` of ψ is causally assigned to γ_k.
pub trait Equations: Send + Sync {
    /// Row `row` of φ.
    fn derivative(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64;

    /// Row `row` of ψ.
    fn residual(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64;

    /// Explicit value of γ_row given every other variable, when causality
    /// permits.
    fn assign(&self, _row: usize, _theta: &[f64], _gamma: &[f64], _inputs: &[f64]) -> Option<f64> {
        None
    }

    /// True when [`Equations::assign`] is available for every row.
    fn is_explicit(&self) -> bool {
        false
    }
}

/// Where a model came from: builder kind plus the parameters it was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSource {
    pub kind: String,
    pub name: String,
    pub parameters: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iterations: 50,
        }
    }
}

/// Semi-explicit DAE with named variables, declared incidence and input channels.
///
/// Immutable after construction; cloning shares the equations.
#[derive(Clone)]
pub struct DaeModel {
    source: ModelSource,
    space: VariableSpace,
    inputs: Vec<InputChannel>,
    incidence: Incidence,
    equations: Arc<dyn Equations>,
    explicit_order: Option<Vec<usize>>,
}

impl fmt::Debug for DaeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DaeModel")
            .field("kind", &self.source.kind)
            .field("n_theta", &self.space.n_theta())
            .field("n_gamma", &self.space.n_gamma())
            .field("explicit", &self.explicit_order.is_some())
            .finish()
    }
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

impl DaeModel {
    pub fn new(
        source: ModelSource,
        space: VariableSpace,
        inputs: Vec<InputChannel>,
        incidence: Incidence,
        equations: Arc<dyn Equations>,
    ) -> Result<Self> {
        if incidence.n_theta() != space.n_theta() {
            return Err(Error::dim("incidence differential rows", space.n_theta(), incidence.n_theta()));
        }
        if incidence.n_gamma() != space.n_gamma() {
            return Err(Error::dim("incidence algebraic rows", space.n_gamma(), incidence.n_gamma()));
        }
        let explicit_order = if equations.is_explicit() {
            incidence.algebraic_order()
        } else {
            None
        };
        Ok(Self {
            source,
            space,
            inputs,
            incidence,
            equations,
            explicit_order,
        })
    }

    /// Same model with its equations replaced, e.g. by an instrumented wrapper.
    pub fn with_equations(&self, equations: Arc<dyn Equations>) -> Result<Self> {
        Self::new(
            self.source.clone(),
            self.space.clone(),
            self.inputs.clone(),
            self.incidence.clone(),
            equations,
        )
    }

    pub fn source(&self) -> &ModelSource {
        &self.source
    }

    pub fn space(&self) -> &VariableSpace {
        &self.space
    }

    pub fn inputs(&self) -> &[InputChannel] {
        &self.inputs
    }

    pub fn incidence(&self) -> &Incidence {
        &self.incidence
    }

    pub fn equations(&self) -> &Arc<dyn Equations> {
        &self.equations
    }

    pub fn n_theta(&self) -> usize {
        self.space.n_theta()
    }

    pub fn n_gamma(&self) -> usize {
        self.space.n_gamma()
    }

    pub fn has_explicit_map(&self) -> bool {
        self.explicit_order.is_some()
    }

    pub(crate) fn explicit_order(&self) -> Option<&[usize]> {
        self.explicit_order.as_deref()
    }

    pub fn default_inputs(&self) -> Vec<f64> {
        self.inputs.iter().map(|c| c.default).collect()
    }

    fn check_lengths(&self, theta: &[f64], gamma: Option<&[f64]>, inputs: &[f64]) -> Result<()> {
        if theta.len() != self.n_theta() {
            return Err(Error::dim("theta", self.n_theta(), theta.len()));
        }
        if let Some(gamma) = gamma {
            if gamma.len() != self.n_gamma() {
                return Err(Error::dim("gamma", self.n_gamma(), gamma.len()));
            }
        }
        if inputs.len() != self.inputs.len() {
            return Err(Error::dim("inputs", self.inputs.len(), inputs.len()));
        }
        Ok(())
    }

    /// Full derivative vector φ(θ, γ, μ).
    pub fn eval_derivatives(&self, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> Result<Vec<f64>> {
        self.check_lengths(theta, Some(gamma), inputs)?;
        Ok((0..self.n_theta())
            .map(|j| self.equations.derivative(j, theta, gamma, inputs))
            .collect())
    }

    /// Full residual vector ψ(θ, γ, μ).
    pub fn eval_residuals(&self, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> Result<Vec<f64>> {
        self.check_lengths(theta, Some(gamma), inputs)?;
        Ok((0..self.n_gamma())
            .map(|k| self.equations.residual(k, theta, gamma, inputs))
            .collect())
    }

    /// Solves ψ(θ, γ, μ) = 0 for γ.
    ///
    /// Uses the explicit causal assignment when the model provides one and
    /// falls back to damped Newton otherwise (or when the explicit result
    /// misses `tol`).
    pub fn solve_algebraic(&self, theta: &[f64], inputs: &[f64], guess: &[f64], opts: SolveOptions) -> Result<Vec<f64>> {
        self.check_lengths(theta, Some(guess), inputs)?;
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidParameter("solver tolerance must be positive".into()));
        }
        let mut gamma = guess.to_vec();
        if let Some(order) = self.explicit_order() {
            self.assign_rows(order, theta, &mut gamma, inputs);
            let res = self.eval_residuals(theta, &gamma, inputs)?;
            if inf_norm(&res) <= opts.tol {
                return Ok(gamma);
            }
        }
        let rows: Vec<usize> = (0..self.n_gamma()).collect();
        self.newton_rows(&rows, theta, &mut gamma, inputs, opts)?;
        Ok(gamma)
    }

    /// Newton path regardless of whether an explicit map exists.
    pub fn solve_algebraic_newton(
        &self,
        theta: &[f64],
        inputs: &[f64],
        guess: &[f64],
        opts: SolveOptions,
    ) -> Result<Vec<f64>> {
        self.check_lengths(theta, Some(guess), inputs)?;
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidParameter("solver tolerance must be positive".into()));
        }
        let mut gamma = guess.to_vec();
        let rows: Vec<usize> = (0..self.n_gamma()).collect();
        self.newton_rows(&rows, theta, &mut gamma, inputs, opts)?;
        Ok(gamma)
    }

    pub(crate) fn assign_rows(&self, order: &[usize], theta: &[f64], gamma: &mut [f64], inputs: &[f64]) {
        for &k in order {
            // is_explicit() promises Some for every row
            gamma[k] = self
                .equations
                .assign(k, theta, gamma, inputs)
                .expect("explicit model returned no assignment");
        }
    }

    pub(crate) fn derivative_rows(&self, rows: &[usize], theta: &[f64], gamma: &[f64], inputs: &[f64], out: &mut [f64]) {
        for (o, &j) in out.iter_mut().zip(rows) {
            *o = self.equations.derivative(j, theta, gamma, inputs);
        }
    }

    /// Damped Newton on the algebraic rows `rows`, unknowns γ[rows]; the
    /// remaining entries of `gamma` are read but never written.
    pub(crate) fn newton_rows(
        &self,
        rows: &[usize],
        theta: &[f64],
        gamma: &mut [f64],
        inputs: &[f64],
        opts: SolveOptions,
    ) -> Result<()> {
        let n = rows.len();
        if n == 0 {
            return Ok(());
        }
        let eq = &self.equations;
        let residuals = |g: &[f64], out: &mut [f64]| {
            for (o, &k) in out.iter_mut().zip(rows) {
                *o = eq.residual(k, theta, g, inputs);
            }
        };
        let mut f = vec![0.0; n];
        residuals(gamma, &mut f);
        let mut norm = inf_norm(&f);
        let mut trial = gamma.to_vec();
        let mut f_trial = vec![0.0; n];

        for _ in 0..opts.max_iterations {
            if norm <= opts.tol {
                return Ok(());
            }
            if !norm.is_finite() {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(n, n);
            for (c, &k) in rows.iter().enumerate() {
                let g0 = gamma[k];
                let h = 1e-7 * g0.abs().max(1.0);
                gamma[k] = g0 + h;
                for (r, &row) in rows.iter().enumerate() {
                    if self.incidence.psi_gamma(row).binary_search(&k).is_ok() {
                        jac[(r, c)] = (eq.residual(row, theta, gamma, inputs) - f[r]) / h;
                    }
                }
                gamma[k] = g0;
            }
            let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
            let Some(step) = jac.lu().solve(&rhs) else {
                break;
            };

            let mut alpha = 1.0;
            loop {
                trial.copy_from_slice(gamma);
                for (c, &k) in rows.iter().enumerate() {
                    trial[k] = gamma[k] + alpha * step[c];
                }
                residuals(&trial, &mut f_trial);
                let trial_norm = inf_norm(&f_trial);
                if trial_norm < norm || alpha < 1.0 / 1024.0 {
                    gamma.copy_from_slice(&trial);
                    f.copy_from_slice(&f_trial);
                    norm = trial_norm;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if norm <= opts.tol {
            Ok(())
        } else {
            Err(Error::AlgebraicNonConvergence {
                iterations: opts.max_iterations,
                residual: norm,
            })
        }
    }
}
