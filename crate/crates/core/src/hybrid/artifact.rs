use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dae::{DaeModel, ModelDocument};
use crate::error::{Error, Result};
use crate::layer::LinearLayer;
use crate::mor::{Partition, ReducedBasis};
use crate::sim::ParamPoint;

pub const ARTIFACT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationDefaults {
    pub dt: f64,
    pub substeps: usize,
}

impl Default for IntegrationDefaults {
    fn default() -> Self {
        Self { dt: 1.0, substeps: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub n_stab: usize,
    /// None when the hybrid run failed (diverged).
    pub max_ae: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub training_points: Vec<ParamPoint>,
    #[serde(default)]
    pub trajectories: Vec<String>,
    #[serde(default)]
    pub deim_order: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_stab_sweep: Vec<SweepEntry>,
}

/// Everything needed to run a hybrid reduced model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridArtifact {
    pub schema_version: u32,
    pub model: ModelDocument,
    /// sha256 of the model document.
    pub model_hash: String,
    pub partition: Partition,
    pub basis: ReducedBasis,
    /// Secondary differential offsets from primary offsets.
    pub coupling: LinearLayer,
    /// Tertiary differential offsets from primary offsets.
    pub reconstruction: LinearLayer,
    pub defaults: IntegrationDefaults,
    pub provenance: Provenance,
}

pub fn build_hybrid(
    model: &DaeModel,
    basis: ReducedBasis,
    partition: Partition,
    coupling: LinearLayer,
    reconstruction: LinearLayer,
    defaults: IntegrationDefaults,
    provenance: Provenance,
) -> Result<HybridArtifact> {
    let artifact = HybridArtifact {
        schema_version: ARTIFACT_SCHEMA_VERSION,
        model: model.to_document(),
        model_hash: model.digest(),
        partition,
        basis,
        coupling,
        reconstruction,
        defaults,
        provenance,
    };
    artifact.validate()?;
    artifact.check_model(model)?;
    model.restrict(&artifact.partition)?;
    Ok(artifact)
}

fn shape_error(msg: String) -> Error {
    Error::InvalidModel(format!("inconsistent artifact: {msg}"))
}

impl HybridArtifact {
    /// Internal consistency of partition, basis and layers.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != ARTIFACT_SCHEMA_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported artifact schema version {} (expected {ARTIFACT_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let p = &self.partition;
        if self.basis.n_theta() != p.n_theta() {
            return Err(shape_error(format!(
                "basis has {} rows, partition {} differential variables",
                self.basis.n_theta(),
                p.n_theta()
            )));
        }
        for (name, layer, outputs) in [
            ("coupling", &self.coupling, p.secondary_theta()),
            ("reconstruction", &self.reconstruction, p.tertiary_theta()),
        ] {
            if layer.inputs() != p.primary_theta() {
                return Err(shape_error(format!("{name} layer inputs differ from the primary set")));
            }
            if layer.outputs() != outputs {
                return Err(shape_error(format!("{name} layer outputs differ from the partition")));
            }
            if layer.bias().iter().any(|b| *b != 0.0) {
                return Err(shape_error(format!("{name} layer has a non-zero bias")));
            }
        }
        if !(self.defaults.dt > 0.0) || self.defaults.substeps == 0 {
            return Err(shape_error("integration defaults must have dt > 0 and substeps ≥ 1".into()));
        }
        Ok(())
    }

    /// The artifact was produced from `model`.
    pub fn check_model(&self, model: &DaeModel) -> Result<()> {
        let digest = model.digest();
        if digest != self.model_hash {
            return Err(Error::InvalidModel(format!(
                "model hash {digest} does not match artifact {}",
                self.model_hash
            )));
        }
        if self.basis.scale() != model.space().scale() || self.basis.initial() != model.space().initial() {
            return Err(shape_error("basis scaling or initial values differ from the model".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let a: Self = serde_json::from_str(s)?;
        a.validate()?;
        Ok(a)
    }

    /// sha256 of the canonical JSON encoding.
    pub fn digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(serde_json::to_vec(self)?)))
    }
}
