use super::artifact::{build_hybrid, HybridArtifact, IntegrationDefaults, Provenance, SweepEntry};
use super::run::HybridModel;
use crate::dae::{DaeModel, InputSchedule};
use crate::error::{Error, Result};
use crate::layer::{calibrate_layer, Activation};
use crate::metrics::max_ae;
use crate::mor::{
    assemble_snapshots, classify_variables, select_interpolation_indices, truncated_svd, Partition, ReducedBasis,
    TruncationRule,
};
use crate::sim::Trajectory;

/// Number of modes Ñ used by the layers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum StabModes {
    /// Ñ = N.
    #[default]
    All,
    Fixed(usize),
    /// Ñ minimising MaxAE over all differential variables on validation runs.
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReduceOptions {
    pub rule: TruncationRule,
    pub n_stab: StabModes,
    pub activation: Activation,
    pub defaults: IntegrationDefaults,
    pub seed: Option<u64>,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            rule: TruncationRule::Modes(4),
            n_stab: StabModes::All,
            activation: Activation::Identity,
            defaults: IntegrationDefaults::default(),
            seed: None,
        }
    }
}

/// Held-out full-model trajectories and the schedule their points were
/// layered over.
#[derive(Debug, Clone, Copy)]
pub struct Validation<'a> {
    pub trajectories: &'a [Trajectory],
    pub base: &'a InputSchedule,
}

fn assemble(
    model: &DaeModel,
    basis: &ReducedBasis,
    partition: &Partition,
    n_stab: usize,
    opts: &ReduceOptions,
    provenance: Provenance,
) -> Result<HybridArtifact> {
    let prim = partition.primary_theta();
    let coupling = calibrate_layer(basis, prim, partition.secondary_theta(), n_stab, opts.activation)?;
    let reconstruction = calibrate_layer(basis, prim, partition.tertiary_theta(), n_stab, opts.activation)?;
    build_hybrid(model, basis.clone(), partition.clone(), coupling, reconstruction, opts.defaults, provenance)
}

fn validation_error(artifact: HybridArtifact, model: &DaeModel, v: &Validation<'_>) -> Result<f64> {
    let hybrid = HybridModel::new(artifact, model.clone())?;
    let mut approx = Vec::with_capacity(v.trajectories.len());
    for t in v.trajectories {
        let settings = hybrid.default_settings(t.t_final());
        let run = hybrid.integrate_point(v.base, t.point(), settings)?;
        approx.push(hybrid.reconstruct_tertiary(&run)?);
    }
    let all: Vec<usize> = (0..model.n_theta()).collect();
    max_ae(v.trajectories, &approx, &all)
}

/// Snapshots → truncated SVD → DEIM → classification → closed-form layers.
pub fn reduce_model(
    model: &DaeModel,
    training: &[Trajectory],
    opts: &ReduceOptions,
    validation: Option<Validation<'_>>,
) -> Result<HybridArtifact> {
    let snapshots = assemble_snapshots(training, model.space())?;
    let basis = truncated_svd(&snapshots, opts.rule)?;
    let order = select_interpolation_indices(basis.modes())?;
    let mut primary = order.clone();
    primary.sort_unstable();
    let partition = classify_variables(model, &primary)?;
    let provenance = Provenance {
        seed: opts.seed,
        training_points: training.iter().map(|t| t.point().clone()).collect(),
        trajectories: Vec::new(),
        deim_order: order.iter().map(|i| i + 1).collect(),
        n_stab_sweep: Vec::new(),
    };
    let n = basis.n_modes();
    match opts.n_stab {
        StabModes::All => assemble(model, &basis, &partition, n, opts, provenance),
        StabModes::Fixed(k) => assemble(model, &basis, &partition, k, opts, provenance),
        StabModes::Sweep => {
            let v = validation.ok_or_else(|| Error::Empty("the Ñ sweep needs validation trajectories".into()))?;
            if v.trajectories.is_empty() {
                return Err(Error::Empty("the Ñ sweep needs validation trajectories".into()));
            }
            let mut sweep = Vec::with_capacity(n);
            for k in 1..=n {
                let err = assemble(model, &basis, &partition, k, opts, Provenance::default())
                    .and_then(|a| validation_error(a, model, &v))
                    .ok()
                    .filter(|e| e.is_finite());
                sweep.push(SweepEntry { n_stab: k, max_ae: err });
            }
            let best = sweep
                .iter()
                .filter_map(|s| s.max_ae.map(|e| (s.n_stab, e)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::InvalidModel("no Ñ produced a stable hybrid model".into()))?;
            let provenance = Provenance {
                n_stab_sweep: sweep,
                ..provenance
            };
            assemble(model, &basis, &partition, best.0, opts, provenance)
        }
    }
}

