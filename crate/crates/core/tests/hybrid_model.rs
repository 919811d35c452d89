mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rbg_core::dae::{DaeModel, Equations, InputSchedule, PiecewiseLinear};
use rbg_core::hybrid::{
    build_hybrid, reduce_model, HybridArtifact, HybridModel, IntegrationDefaults, Provenance, ReduceOptions,
    StabModes, Validation,
};
use rbg_core::layer::{calibrate_layer, Activation};
use rbg_core::metrics::{mae, max_ae};
use rbg_core::mor::{classify_variables, Partition, ReducedBasis, TruncationRule};
use rbg_core::sim::{integrate, integrate_point, run_campaign, sample_doe, DoePlan, ParamSpace, StepSettings, Trajectory};
use rbg_core::thermal::{build_multizone_demo, MultizoneConfig};

use common::*;

fn illustrative_artifact() -> (DaeModel, HybridArtifact) {
    let m = illustrative();
    let train = run(&m, &[35.0, 10.0], hour());
    let a = reduce_model(&m, &train, &ReduceOptions::default(), None).unwrap();
    (m, a)
}

fn all_primary_artifact(m: &DaeModel) -> HybridArtifact {
    let nt = m.n_theta();
    let space = m.space();
    let basis = ReducedBasis::from_modes(
        DMatrix::identity(nt, nt),
        vec![1.0; nt],
        space.scale().to_vec(),
        space.initial().to_vec(),
    )
    .unwrap();
    let all: Vec<usize> = (0..nt).collect();
    let partition = classify_variables(m, &all).unwrap();
    let coupling = calibrate_layer(&basis, &all, &[], nt, Activation::Identity).unwrap();
    let reconstruction = calibrate_layer(&basis, &all, &[], nt, Activation::Identity).unwrap();
    build_hybrid(m, basis, partition, coupling, reconstruction, IntegrationDefaults::default(), Provenance::default())
        .unwrap()
}

fn replay(hm: &HybridModel, truth: &Trajectory, base: &InputSchedule) -> Trajectory {
    let run = hm.integrate_point(base, truth.point(), StepSettings::new(truth.t_final(), 1.0, 1)).unwrap();
    hm.reconstruct_tertiary(&run).unwrap()
}

#[test]
fn illustrative_artifact_counts() {
    let (_, a) = illustrative_artifact();
    let p = &a.partition;
    assert_eq!(p.primary_theta().len(), 4);
    assert_eq!(p.primary_gamma().len(), 5);
    assert_eq!(p.secondary_theta().len(), 2);
    assert_eq!(p.tertiary_theta().len(), 1);
    assert_eq!(a.provenance.deim_order, vec![7, 3, 5, 4]);
    assert_eq!(a.coupling.weights().shape(), (2, 4));
    assert_eq!(a.reconstruction.weights().shape(), (1, 4));
    assert_eq!(a.provenance.training_points.len(), 2);
}

#[test]
fn artifact_round_trip_is_byte_identical() {
    let (m, a) = illustrative_artifact();
    let json = a.to_json().unwrap();
    let back = HybridArtifact::from_json(&json).unwrap();
    assert_eq!(back, a);
    assert_eq!(back.to_json().unwrap(), json);
    assert_eq!(back.digest().unwrap(), a.digest().unwrap());
    let hm = HybridModel::from_artifact(back).unwrap();
    assert_eq!(hm.model().digest(), m.digest());
}

#[test]
fn artifact_rejects_other_models_and_bad_shapes() {
    let (_, a) = illustrative_artifact();
    assert!(HybridModel::new(a.clone(), twin_wall()).is_err());
    let mut bad = a.clone();
    bad.coupling = bad.reconstruction.clone();
    assert!(bad.validate().is_err());
    let mut bad = a;
    bad.schema_version = 99;
    assert!(HybridArtifact::from_json(&bad.to_json().unwrap()).is_err());
}

#[test]
fn all_primary_coupling_layer_is_empty() {
    let a = all_primary_artifact(&illustrative());
    assert!(a.coupling.is_empty());
    assert!(a.reconstruction.is_empty());
    assert!(a.partition.secondary_theta().is_empty());
}

fn random_schedule(seed: u64) -> InputSchedule {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let times: Vec<f64> = (0..=6).map(|k| k as f64 * 100.0).collect();
    let mut series = |lo: f64, hi: f64| {
        PiecewiseLinear::new(times.clone(), times.iter().map(|_| rng.random_range(lo..hi)).collect()).unwrap()
    };
    let h = series(5.0, 40.0);
    let te = series(-25.0, 10.0);
    let tc = series(10.0, 30.0);
    InputSchedule::new().with_series("h_ext", h).with_series("T_ext", te).with_series("T_cab", tc)
}

#[test]
fn degenerate_partition_matches_full_model() {
    let m = illustrative();
    let hm = HybridModel::new(all_primary_artifact(&m), m.clone()).unwrap();
    let s = StepSettings::new(600.0, 1.0, 1);
    for seed in 0..10 {
        let sched = random_schedule(seed);
        let full = integrate(&m, &sched, s).unwrap();
        let hyb = hm.integrate(&sched, s).unwrap();
        assert!(max_abs_diff(full.theta(), hyb.theta()) <= 1e-10, "seed {seed}");
    }
}

#[test]
fn degenerate_partition_on_multizone() {
    let m = build_multizone_demo(&MultizoneConfig::two_zone_symmetric()).unwrap();
    let hm = HybridModel::new(all_primary_artifact(&m), m.clone()).unwrap();
    let s = StepSettings::new(300.0, 1.0, 2);
    let full = integrate(&m, &InputSchedule::new(), s).unwrap();
    let hyb = hm.integrate(&InputSchedule::new(), s).unwrap();
    assert!(max_abs_diff(full.theta(), hyb.theta()) <= 1e-10);
}

#[test]
fn illustrative_test_point_accuracy() {
    let (m, a) = illustrative_artifact();
    let hm = HybridModel::new(a, m.clone()).unwrap();
    let truth = run(&m, &[20.0], hour());
    let approx = vec![replay(&hm, &truth[0], &InputSchedule::new())];
    let all = all_theta(&m);
    assert!(mae(&truth, &approx, &all).unwrap() <= 0.2);
    assert!(max_ae(&truth, &approx, &all).unwrap() <= 1.0);
    // the tertiary wall temperature alone
    assert!(max_ae(&truth, &approx, &[0]).unwrap() <= 1.0);
}

#[test]
fn zero_offsets_reconstruct_to_initial_values() {
    let (m, a) = illustrative_artifact();
    let hm = HybridModel::new(a, m.clone()).unwrap();
    let run = hm.integrate(&InputSchedule::new(), StepSettings::new(5.0, 1.0, 1)).unwrap();
    // force every sample back onto θ(0)
    let mut theta = run.theta().clone();
    for k in 0..theta.ncols() {
        theta.set_column(k, &nalgebra::DVector::from_column_slice(m.space().initial()));
    }
    let zero = Trajectory::from_parts(run.dt(), theta, run.gamma().clone(), run.point().clone())
        .and_then(|t| t.with_inputs(run.inputs().clone()))
        .unwrap();
    let out = hm.reconstruct_tertiary(&zero).unwrap();
    assert!(out.theta().row(0).iter().all(|v| *v == m.space().initial()[0]));
}

#[test]
fn tertiary_entries_are_unknown_before_reconstruction() {
    let (m, a) = illustrative_artifact();
    let hm = HybridModel::new(a, m).unwrap();
    let run = hm.integrate(&InputSchedule::new(), StepSettings::new(5.0, 1.0, 1)).unwrap();
    assert!(!run.theta_known()[0]);
    assert!(run.theta_known()[1..].iter().all(|k| *k));
    let full = hm.reconstruct_tertiary(&run).unwrap();
    assert!(full.theta_known().iter().all(|k| *k));
    assert!(full.theta().iter().all(|v| v.is_finite()));
    assert!(full.gamma().iter().all(|v| v.is_finite()));
}

fn twin_training() -> (DaeModel, Vec<Trajectory>, HybridArtifact) {
    let m = twin_wall();
    let train = run(&m, &[35.0, 10.0], hour());
    let a = reduce_model(&m, &train, &ReduceOptions::default(), None).unwrap();
    (m, train, a)
}

#[test]
fn exact_basis_replays_training_trajectories() {
    let (m, train, a) = twin_training();
    // four modes capture the twin-wall snapshots to round-off
    assert!(a.basis.truncation_residual() < 1e-8 * a.basis.singular_values()[0]);
    let hm = HybridModel::new(a, m.clone()).unwrap();
    for truth in &train {
        let approx = replay(&hm, truth, &InputSchedule::new());
        assert!(max_abs_diff(truth.theta(), approx.theta()) <= 1e-3);
    }
}

#[test]
fn exact_basis_with_secondary_and_tertiary_sets() {
    let (m, train, a) = twin_training();
    let primary = [0, 1, 5, 6];
    let p = classify_variables(&m, &primary).unwrap();
    assert_eq!(Partition::one_based(p.secondary_theta()), vec![3, 5]);
    assert_eq!(Partition::one_based(p.tertiary_theta()), vec![4]);
    let coupling = calibrate_layer(&a.basis, &primary, p.secondary_theta(), 4, Activation::Identity).unwrap();
    let reconstruction = calibrate_layer(&a.basis, &primary, p.tertiary_theta(), 4, Activation::Identity).unwrap();
    let art = build_hybrid(&m, a.basis.clone(), p.clone(), coupling, reconstruction, a.defaults, a.provenance.clone()).unwrap();
    let hm = HybridModel::new(art, m.clone()).unwrap();
    for truth in &train {
        let approx = replay(&hm, truth, &InputSchedule::new());
        assert!(max_abs_diff(truth.theta(), approx.theta()) <= 1e-3);
        for &g in p.primary_gamma() {
            let d = truth.gamma().row(g) - approx.gamma().row(g);
            assert!(d.amax() <= 1e-3 * 50.0, "γ_{}", g + 1);
        }
    }
}

struct Counting {
    inner: Arc<dyn Equations>,
    phi: Vec<AtomicUsize>,
    psi: Vec<AtomicUsize>,
}

impl Equations for Counting {
    fn derivative(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64 {
        self.phi[row].fetch_add(1, Ordering::Relaxed);
        self.inner.derivative(row, theta, gamma, inputs)
    }

    fn residual(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64 {
        self.psi[row].fetch_add(1, Ordering::Relaxed);
        self.inner.residual(row, theta, gamma, inputs)
    }

    fn assign(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> Option<f64> {
        self.psi[row].fetch_add(1, Ordering::Relaxed);
        self.inner.assign(row, theta, gamma, inputs)
    }

    fn is_explicit(&self) -> bool {
        self.inner.is_explicit()
    }
}

#[test]
fn stepping_never_touches_tertiary_equations() {
    let (base, a) = illustrative_artifact();
    let counting = Arc::new(Counting {
        inner: base.equations().clone(),
        phi: (0..7).map(|_| AtomicUsize::new(0)).collect(),
        psi: (0..10).map(|_| AtomicUsize::new(0)).collect(),
    });
    let m = base.with_equations(counting.clone()).unwrap();
    let p = a.partition.clone();
    let hm = HybridModel::new(a, m).unwrap();
    hm.integrate(&InputSchedule::new(), StepSettings::new(100.0, 1.0, 1)).unwrap();
    for j in 0..7 {
        let n = counting.phi[j].load(Ordering::Relaxed);
        assert_eq!(n > 0, p.primary_theta().contains(&j), "φ_{}", j + 1);
    }
    for k in 0..10 {
        let n = counting.psi[k].load(Ordering::Relaxed);
        assert_eq!(n > 0, p.primary_gamma().contains(&k), "ψ_{}", k + 1);
    }
}

#[test]
fn stabilisation_sweep_picks_the_best_mode_count() {
    let m = illustrative();
    let train = run(&m, &[35.0, 10.0], hour());
    let val = run(&m, &[20.0], hour());
    let base = InputSchedule::new();
    let opts = ReduceOptions {
        n_stab: StabModes::Sweep,
        ..Default::default()
    };
    let a = reduce_model(&m, &train, &opts, Some(Validation { trajectories: &val, base: &base })).unwrap();
    let sweep = &a.provenance.n_stab_sweep;
    assert_eq!(sweep.iter().map(|e| e.n_stab).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    let best = sweep
        .iter()
        .filter_map(|e| e.max_ae.map(|v| (e.n_stab, v)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    assert_eq!(a.coupling.modes(), best.0);
    assert!(reduce_model(&m, &train, &opts, None).is_err());
    let fixed = ReduceOptions {
        n_stab: StabModes::Fixed(2),
        ..Default::default()
    };
    assert_eq!(reduce_model(&m, &train, &fixed, None).unwrap().coupling.modes(), 2);
}

#[test]
fn relu_multizone_humidity_stays_non_negative() {
    let m = build_multizone_demo(&MultizoneConfig::default()).unwrap();
    let base = InputSchedule::new();
    let s = StepSettings::new(900.0, 1.0, 1);
    let plan = sample_doe(&ParamSpace::cabin_cooling(), 10, 11).unwrap();
    let trajs = run_campaign(&m, &base, &plan, s, true).unwrap();
    let opts = ReduceOptions {
        rule: TruncationRule::Modes(16),
        activation: Activation::Relu,
        ..Default::default()
    };
    let a = reduce_model(&m, &trajs, &opts, None).unwrap();
    let hm = HybridModel::new(a, m.clone()).unwrap();
    let humid: Vec<usize> = (0..m.n_theta()).filter(|&i| m.space().theta_names()[i].starts_with("x_")).collect();
    assert_eq!(humid.len(), 6);
    let mut tested = sample_doe(&ParamSpace::cabin_cooling(), 6, 12).unwrap().points;
    // bone-dry inlet and outside air
    tested.push(tested[0].clone().with("r_inlet", 0.0).with("r_ext", 0.0));
    let tested = DoePlan::from_points(tested);
    for p in &tested.points {
        let run = hm.integrate_point(&base, p, s).unwrap();
        let full = hm.reconstruct_tertiary(&run).unwrap();
        for &i in &humid {
            assert!(full.theta().row(i).iter().all(|v| *v >= 0.0), "{}", m.space().theta_names()[i]);
        }
    }
}

#[test]
fn hybrid_point_runs_match_schedule_runs() {
    let (m, a) = illustrative_artifact();
    let hm = HybridModel::new(a, m.clone()).unwrap();
    let s = StepSettings::new(50.0, 1.0, 1);
    let p = h_ext(20.0);
    let viapoint = hm.integrate_point(&InputSchedule::new(), &p, s).unwrap();
    let direct = hm.integrate(&InputSchedule::new().with_constant("h_ext", 20.0), s).unwrap();
    assert_eq!(viapoint.theta().rows(1, 6), direct.theta().rows(1, 6));
    let full = integrate_point(&m, &InputSchedule::new(), &p, s).unwrap();
    assert_eq!(full.samples(), viapoint.samples());
}
