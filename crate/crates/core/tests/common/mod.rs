#![allow(dead_code)]

use nalgebra::DMatrix;
use rbg_core::dae::{DaeModel, InputSchedule};
use rbg_core::mor::ReducedBasis;
use rbg_core::sim::{integrate_point, ParamPoint, StepSettings, Trajectory};
use rbg_core::thermal::{build_illustrative_cabin, IllustrativeParams, WallProps};

/// The printed 7×4 reduced basis of the illustrative cabin.
pub fn printed_basis_matrix() -> DMatrix<f64> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/illustrative_basis.csv");
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

pub fn printed_basis() -> ReducedBasis {
    ReducedBasis::from_matrix(printed_basis_matrix()).unwrap()
}

pub const PRINTED_COUPLING: [[f64; 4]; 2] = [[0.9176, 0.0699, 0.0022, 0.0150], [0.2480, -0.2331, 0.2875, 0.0506]];
pub const PRINTED_RECONSTRUCTION: [f64; 4] = [0.8385, 0.1051, 0.0002, 0.0619];

/// 0-based primary set of the illustrative reduction.
pub const PRIMARY: [usize; 4] = [2, 3, 4, 6];

pub fn hour() -> StepSettings {
    StepSettings::new(3600.0, 1.0, 1)
}

pub fn h_ext(h: f64) -> ParamPoint {
    ParamPoint::new().with("h_ext", h)
}

pub fn illustrative() -> DaeModel {
    build_illustrative_cabin(&IllustrativeParams::default()).unwrap()
}

pub fn run(model: &DaeModel, points: &[f64], settings: StepSettings) -> Vec<Trajectory> {
    points
        .iter()
        .map(|&h| integrate_point(model, &InputSchedule::new(), &h_ext(h), settings).unwrap())
        .collect()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Illustrative cabin whose roof is a copy of the windshield.
pub fn twin_wall() -> DaeModel {
    build_illustrative_cabin(&IllustrativeParams {
        roof: WallProps::windshield(),
        ..Default::default()
    })
    .unwrap()
}

pub fn all_theta(model: &DaeModel) -> Vec<usize> {
    (0..model.n_theta()).collect()
}
