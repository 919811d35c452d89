mod common;

use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rbg_core::dae::{DaeModel, Equations, IncidenceBuilder, InputSchedule, ModelSource, VariableSpace};
use rbg_core::layer::{calibrate_layer, Activation};
use rbg_core::mor::{
    assemble_snapshots, canonicalize_signs, classify_variables, select_interpolation_indices, truncated_svd,
    Partition, ReducedBasis, SnapshotMatrix, TruncationRule,
};
use rbg_core::sim::{integrate, StepSettings};
use rbg_core::thermal::{build_illustrative_cabin, build_multizone_demo, IllustrativeParams, MultizoneConfig};
use rbg_core::Error;

use common::*;

fn training_snapshots() -> SnapshotMatrix {
    let m = illustrative();
    assemble_snapshots(&run(&m, &[35.0, 10.0], hour()), m.space()).unwrap()
}

fn orthonormality_error(v: &DMatrix<f64>) -> f64 {
    let g = v.transpose() * v;
    max_abs_diff(&g, &DMatrix::identity(v.ncols(), v.ncols()))
}

#[test]
fn illustrative_snapshot_shape() {
    let a = training_snapshots();
    assert_eq!(a.matrix().shape(), (7, 7200));
    assert_eq!(a.columns()[0], (0, 1));
    assert_eq!(a.columns()[3600], (1, 1));
    assert_eq!(a.columns()[7199], (1, 3600));
}

#[test]
fn unit_scale_columns_are_plain_offsets() {
    let m = illustrative();
    let t = run(&m, &[20.0], StepSettings::new(50.0, 1.0, 1));
    let a = assemble_snapshots(&t, m.space()).unwrap();
    assert_eq!(a.matrix().ncols(), 50);
    for k in 1..=50 {
        for i in 0..7 {
            assert_eq!(a.matrix()[(i, k - 1)], t[0].theta()[(i, k)] - t[0].theta()[(i, 0)]);
        }
    }
}

#[test]
fn constant_trajectory_gives_zero_matrix() {
    let m = build_illustrative_cabin(&IllustrativeParams {
        t_cab: -18.0,
        ..Default::default()
    })
    .unwrap();
    let t = integrate(&m, &InputSchedule::new(), StepSettings::new(20.0, 1.0, 1)).unwrap();
    let a = assemble_snapshots(&[t], m.space()).unwrap();
    assert!(a.matrix().iter().all(|v| *v == 0.0));
    assert!(truncated_svd(&a, TruncationRule::Modes(1)).is_err());
}

#[test]
fn snapshot_errors() {
    let m = illustrative();
    assert!(matches!(assemble_snapshots(&[], m.space()), Err(Error::Empty(_))));
    let a = run(&m, &[20.0], StepSettings::new(10.0, 1.0, 1));
    let b = run(&m, &[20.0], StepSettings::new(20.0, 1.0, 1));
    assert!(assemble_snapshots(&[a[0].clone(), b[0].clone()], m.space()).is_err());
    let mz = build_multizone_demo(&MultizoneConfig::default()).unwrap();
    assert!(assemble_snapshots(&a, mz.space()).is_err());
}

#[test]
fn scaled_snapshots_use_space_scale() {
    let m = build_multizone_demo(&MultizoneConfig::two_zone_symmetric()).unwrap();
    let t = integrate(&m, &InputSchedule::new(), StepSettings::new(5.0, 1.0, 1)).unwrap();
    let a = assemble_snapshots(&[t.clone()], m.space()).unwrap();
    let scale = m.space().scale();
    for i in 0..m.n_theta() {
        let expected = scale[i] * (t.theta()[(i, 5)] - t.theta()[(i, 0)]);
        assert_eq!(a.matrix()[(i, 4)], expected);
    }
    assert_eq!(a.scale(), scale);
}

#[test]
fn rank_one_matrix() {
    let u = DMatrix::from_column_slice(3, 1, &[1.0, -3.0, 2.0]);
    let v = DMatrix::from_row_slice(1, 4, &[0.5, 1.0, -1.0, 0.5]);
    let a = SnapshotMatrix::from_matrix(&u * &v);
    let b = truncated_svd(&a, TruncationRule::Epsilon(1e-9)).unwrap();
    assert_eq!(b.n_modes(), 1);
    assert!((b.singular_values()[0] - (14.0f64 * 2.5).sqrt()).abs() < 1e-12);
    let col = b.modes().column(0);
    // sign canonical: the largest entry (−3) is made positive
    let norm = 14.0f64.sqrt();
    for (x, y) in col.iter().zip([-1.0 / norm, 3.0 / norm, -2.0 / norm]) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!(truncated_svd(&a, TruncationRule::Modes(2)).is_err());
    assert!(truncated_svd(&a, TruncationRule::Epsilon(0.0)).is_err());
}

#[test]
fn illustrative_spectrum_matches_published_ratios() {
    let b = truncated_svd(&training_snapshots(), TruncationRule::Modes(4)).unwrap();
    let s = b.singular_values();
    for (i, published) in [(1, 0.1283), (2, 0.0752), (3, 0.0297)] {
        let ratio = s[i] / s[0];
        assert!(((ratio - published) / published).abs() < 0.10, "s{}/s1 = {ratio}", i + 1);
    }
    assert!(s.windows(2).all(|w| w[0] >= w[1]));
    assert!(orthonormality_error(b.modes()) < 1e-10);
}

#[test]
fn computed_basis_matches_printed_basis() {
    let mut printed = printed_basis_matrix();
    canonicalize_signs(&mut printed);
    let b = truncated_svd(&training_snapshots(), TruncationRule::Modes(4)).unwrap();
    assert!(max_abs_diff(b.modes(), &printed) < 2e-3);
}

fn projection_identity(a: &SnapshotMatrix, n: usize) {
    let b = truncated_svd(a, TruncationRule::Modes(n)).unwrap();
    let v = b.modes();
    let r = a.matrix() - v * (v.transpose() * a.matrix());
    let lhs = r.norm_squared();
    let rhs = b.truncation_residual().powi(2);
    assert!((lhs - rhs).abs() <= 1e-8 * rhs.max(f64::MIN_POSITIVE), "N={n}: {lhs} vs {rhs}");
    // residual orthogonal to the retained modes
    let vr = v.transpose() * &r;
    assert!(vr.amax() <= 1e-8 * a.matrix().norm());
}

#[test]
fn projection_residual_identity() {
    let a = training_snapshots();
    for n in 1..=5 {
        projection_identity(&a, n);
    }
}

#[test]
fn epsilon_rule_bounds_the_residual() {
    let a = training_snapshots();
    let full = truncated_svd(&a, TruncationRule::Modes(7)).unwrap();
    for eps in [1e3, 300.0, 100.0, 1.0] {
        let b = truncated_svd(&a, TruncationRule::Epsilon(eps)).unwrap();
        assert!(b.truncation_residual() <= eps);
        let v = b.modes();
        assert!((a.matrix() - v * (v.transpose() * a.matrix())).norm() <= eps * (1.0 + 1e-9));
        assert_eq!(b.spectrum(), full.spectrum());
    }
}

#[test]
fn deim_identity_columns() {
    let v = DMatrix::<f64>::identity(6, 3);
    assert_eq!(select_interpolation_indices(&v).unwrap(), vec![0, 1, 2]);
}

#[test]
fn deim_hand_trace() {
    let v = DMatrix::from_row_slice(3, 2, &[0.9, 0.1, 0.3, 0.8, 0.3, 0.6]);
    assert_eq!(select_interpolation_indices(&v).unwrap(), vec![0, 1]);
}

#[test]
fn deim_printed_basis() {
    let order = select_interpolation_indices(&printed_basis_matrix()).unwrap();
    assert_eq!(Partition::one_based(&order), vec![7, 3, 5, 4]);
    let mut set = order.clone();
    set.sort_unstable();
    assert_eq!(set, PRIMARY);
}

#[test]
fn deim_degenerate_basis() {
    let v = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(matches!(select_interpolation_indices(&v), Err(Error::Singular { .. })));
}

#[test]
fn classification_of_the_illustrative_cabin() {
    let p = classify_variables(&illustrative(), &PRIMARY).unwrap();
    assert_eq!(Partition::one_based(p.primary_theta()), vec![3, 4, 5, 7]);
    assert_eq!(Partition::one_based(p.primary_gamma()), vec![3, 4, 5, 6, 7]);
    assert_eq!(Partition::one_based(p.secondary_theta()), vec![2, 6]);
    assert_eq!(Partition::one_based(p.tertiary_theta()), vec![1]);
    assert_eq!(Partition::one_based(p.tertiary_gamma()), vec![1, 2, 8, 9, 10]);
}

#[test]
fn all_primary_classification() {
    let p = classify_variables(&illustrative(), &[0, 1, 2, 3, 4, 5, 6]).unwrap();
    assert!(p.secondary_theta().is_empty());
    assert!(p.tertiary_theta().is_empty());
    assert_eq!(Partition::one_based(p.primary_gamma()), (1..=8).collect::<Vec<_>>());
    assert_eq!(Partition::one_based(p.tertiary_gamma()), vec![9, 10]);
}

#[test]
fn classification_rejects_bad_primary_sets() {
    let m = illustrative();
    assert!(classify_variables(&m, &[2, 2]).is_err());
    assert!(classify_variables(&m, &[7]).is_err());
    assert!(classify_variables(&m, &[]).is_err());
}

/// θ̇ = −γ₂, ψ₁: γ₁ = θ, ψ₂: γ₂ = 2γ₁.
struct Chain;

impl Equations for Chain {
    fn derivative(&self, _row: usize, _theta: &[f64], gamma: &[f64], _inputs: &[f64]) -> f64 {
        -gamma[1]
    }

    fn residual(&self, row: usize, theta: &[f64], gamma: &[f64], _inputs: &[f64]) -> f64 {
        match row {
            0 => gamma[0] - theta[0],
            _ => gamma[1] - 2.0 * gamma[0],
        }
    }
}

#[test]
fn secondary_algebraic_variables_are_rejected() {
    let space = VariableSpace::new(vec!["x".into()], vec!["g1".into(), "g2".into()], vec![1.0]).unwrap();
    let mut inc = IncidenceBuilder::new(1, 2);
    inc.phi(0, &[], &[1]).psi(0, &[0], &[]).psi(1, &[], &[0]);
    let source = ModelSource {
        kind: "chain".into(),
        name: "chain".into(),
        parameters: serde_json::Value::Null,
    };
    let m = DaeModel::new(source, space, vec![], inc.build().unwrap(), Arc::new(Chain)).unwrap();
    match classify_variables(&m, &[0]) {
        Err(Error::SecondaryAlgebraic(v)) => assert_eq!(v, vec![0]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn multizone_classification_includes_mixed_pairs() {
    let cfg = MultizoneConfig::two_zone_symmetric();
    let m = build_multizone_demo(&cfg).unwrap();
    let x0 = m.space().theta_index("x_left").unwrap();
    let p = classify_variables(&m, &[x0]).unwrap();
    let ta = m.space().gamma_index("Ta_left").unwrap();
    assert!(p.primary_gamma().contains(&ta));
}

fn flip(v: &DMatrix<f64>, signs: &[bool]) -> DMatrix<f64> {
    let mut out = v.clone();
    for (j, &s) in signs.iter().enumerate() {
        if s {
            out.column_mut(j).neg_mut();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deim_and_weights_ignore_column_signs(signs in proptest::collection::vec(any::<bool>(), 4)) {
        let v = printed_basis_matrix();
        let flipped = flip(&v, &signs);
        prop_assert_eq!(select_interpolation_indices(&v).unwrap(), select_interpolation_indices(&flipped).unwrap());
        let a = calibrate_layer(&ReducedBasis::from_matrix(v).unwrap(), &PRIMARY, &[1, 5], 4, Activation::Identity).unwrap();
        let b = calibrate_layer(&ReducedBasis::from_matrix(flipped).unwrap(), &PRIMARY, &[1, 5], 4, Activation::Identity).unwrap();
        prop_assert!(max_abs_diff(a.weights(), b.weights()) <= 1e-12);
    }

    #[test]
    fn random_bases_are_orthonormal(seed in any::<u64>(), rows in 3usize..12, cols in 3usize..40) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
        let n = rows.min(cols);
        let b = truncated_svd(&SnapshotMatrix::from_matrix(a.clone()), TruncationRule::Modes(n)).unwrap();
        prop_assert!(orthonormality_error(b.modes()) < 1e-10);
        for j in 0..n {
            let c = b.modes().column(j);
            let imax = c.iamax();
            prop_assert!(c[imax] > 0.0);
        }
        projection_identity(&SnapshotMatrix::from_matrix(a), n.saturating_sub(1).max(1));
    }

    #[test]
    fn partitions_are_disjoint_unions(mask in proptest::collection::vec(any::<bool>(), 7)) {
        let primary: Vec<usize> = (0..7).filter(|&i| mask[i]).collect();
        prop_assume!(!primary.is_empty());
        let p = classify_variables(&illustrative(), &primary).unwrap();
        let mut theta: Vec<usize> = [p.primary_theta(), p.secondary_theta(), p.tertiary_theta()].concat();
        theta.sort_unstable();
        prop_assert_eq!(theta, (0..7).collect::<Vec<_>>());
        let mut gamma: Vec<usize> = [p.primary_gamma(), p.tertiary_gamma()].concat();
        gamma.sort_unstable();
        prop_assert_eq!(gamma, (0..10).collect::<Vec<_>>());
        let json = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<Partition>(&json).unwrap(), p);
    }
}
