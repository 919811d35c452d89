//! Hybrid reduced models: retained DAE rows closed by a coupling layer, with
//! a reconstruction layer applied at printouts.

mod artifact;
mod pipeline;
mod run;

pub use artifact::{build_hybrid, HybridArtifact, IntegrationDefaults, Provenance, SweepEntry, ARTIFACT_SCHEMA_VERSION};
pub use pipeline::{reduce_model, ReduceOptions, StabModes, Validation};
pub use run::HybridModel;
