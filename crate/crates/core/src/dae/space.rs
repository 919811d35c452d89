use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names, initial values and snapshot scale factors of the DAE unknowns.
///
/// Differential values are stored in absolute physical units. Offsets from
/// the initial state are only formed when snapshots are assembled and when
/// the coupling layers are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpace {
    differential: Vec<String>,
    algebraic: Vec<String>,
    initial: Vec<f64>,
    scale: Vec<f64>,
}

impl VariableSpace {
    pub fn new(differential: Vec<String>, algebraic: Vec<String>, initial: Vec<f64>) -> Result<Self> {
        let scale = vec![1.0; differential.len()];
        Self::with_scale(differential, algebraic, initial, scale)
    }

    pub fn with_scale(
        differential: Vec<String>,
        algebraic: Vec<String>,
        initial: Vec<f64>,
        scale: Vec<f64>,
    ) -> Result<Self> {
        if initial.len() != differential.len() {
            return Err(Error::dim("initial values", differential.len(), initial.len()));
        }
        if scale.len() != differential.len() {
            return Err(Error::dim("scale factors", differential.len(), scale.len()));
        }
        let mut seen = HashSet::new();
        for name in differential.iter().chain(algebraic.iter()) {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate variable name `{name}`")));
            }
        }
        if let Some(s) = scale.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidModel(format!("scale factor {s} is not strictly positive")));
        }
        if initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite initial value".into()));
        }
        Ok(Self {
            differential,
            algebraic,
            initial,
            scale,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.differential.len()
    }

    pub fn n_gamma(&self) -> usize {
        self.algebraic.len()
    }

    pub fn theta_names(&self) -> &[String] {
        &self.differential
    }

    pub fn gamma_names(&self) -> &[String] {
        &self.algebraic
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn theta_index(&self, name: &str) -> Option<usize> {
        self.differential.iter().position(|n| n == name)
    }

    pub fn gamma_index(&self, name: &str) -> Option<usize> {
        self.algebraic.iter().position(|n| n == name)
    }
}
