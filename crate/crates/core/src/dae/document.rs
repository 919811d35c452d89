//! JSON model document.
//!
//! The document records the builder kind and its parameters (enough to
//! rebuild the equations) together with the variable registry and declared
//! incidence, written by variable name. When the structural sections are
//! present on input they are checked against the rebuilt model.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::incidence::{Incidence, MixedPair};
use super::model::{DaeModel, ModelSource};
use super::schedule::InputChannel;
use crate::error::{Error, Result};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDocument {
    pub name: String,
    pub initial: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDocument {
    /// Variable the equation defines (θ_j for φ rows, γ_k for ψ rows).
    pub defines: String,
    pub theta: Vec<String>,
    pub gamma: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedDocument {
    pub row: String,
    pub gamma: String,
    pub theta: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidenceDocument {
    pub phi: Vec<RowDocument>,
    pub psi: Vec<RowDocument>,
    #[serde(default)]
    pub mixed: Vec<MixedDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default)]
    pub name: String,
    pub parameters: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differential: Option<Vec<VariableDocument>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebraic: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<InputChannel>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incidence: Option<IncidenceDocument>,
}

impl ModelDocument {
    pub fn source(&self) -> ModelSource {
        ModelSource {
            kind: self.kind.clone(),
            name: self.name.clone(),
            parameters: self.parameters.clone(),
        }
    }

    pub fn check_version(&self) -> Result<()> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported model schema version {} (expected {MODEL_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        Ok(())
    }

    /// Checks the structural sections, where present, against `model`.
    pub fn check_matches(&self, model: &DaeModel) -> Result<()> {
        let built = model.to_document();
        let mismatch = |what: &str| Err(Error::InvalidModel(format!("model document {what} does not match the built model")));
        if self.differential.is_some() && self.differential != built.differential {
            return mismatch("differential variables");
        }
        if self.algebraic.is_some() && self.algebraic != built.algebraic {
            return mismatch("algebraic variables");
        }
        if self.inputs.is_some() && self.inputs != built.inputs {
            return mismatch("inputs");
        }
        if self.incidence.is_some() && self.incidence != built.incidence {
            return mismatch("incidence");
        }
        Ok(())
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn names(all: &[String], idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| all[i].clone()).collect()
}

impl DaeModel {
    pub fn to_document(&self) -> ModelDocument {
        let space = self.space();
        let th = space.theta_names();
        let ga = space.gamma_names();
        let inc: &Incidence = self.incidence();
        let phi = (0..space.n_theta())
            .map(|j| RowDocument {
                defines: th[j].clone(),
                theta: names(th, inc.phi_theta(j)),
                gamma: names(ga, inc.phi_gamma(j)),
            })
            .collect();
        let psi = (0..space.n_gamma())
            .map(|k| RowDocument {
                defines: ga[k].clone(),
                theta: names(th, inc.psi_theta(k)),
                gamma: names(ga, inc.psi_gamma(k)),
            })
            .collect();
        let mixed = inc
            .mixed()
            .iter()
            .map(|&MixedPair { row, gamma, theta }| MixedDocument {
                row: ga[row].clone(),
                gamma: ga[gamma].clone(),
                theta: th[theta].clone(),
            })
            .collect();
        ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION,
            kind: self.source().kind.clone(),
            name: self.source().name.clone(),
            parameters: self.source().parameters.clone(),
            differential: Some(
                th.iter()
                    .zip(space.initial())
                    .zip(space.scale())
                    .map(|((n, &initial), &scale)| VariableDocument {
                        name: n.clone(),
                        initial,
                        scale,
                    })
                    .collect(),
            ),
            algebraic: Some(ga.to_vec()),
            inputs: Some(self.inputs().to_vec()),
            incidence: Some(IncidenceDocument { phi, psi, mixed }),
        }
    }

    /// SHA-256 of the canonical JSON model document, hex encoded.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_document()).expect("model document serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
