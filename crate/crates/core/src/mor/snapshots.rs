use nalgebra::DMatrix;

use crate::dae::VariableSpace;
use crate::error::{Error, Result};
use crate::sim::Trajectory;

/// Scaled offset snapshots A_ij = scale_i·(θ_i(t_k, μ_p) − θ_i(0)), one column
/// per (point, time) pair with k = 1..m.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    matrix: DMatrix<f64>,
    columns: Vec<(usize, usize)>,
    scale: Vec<f64>,
    initial: Vec<f64>,
}

impl SnapshotMatrix {
    /// Wraps a raw matrix with unit scaling and zero initial values.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        let columns = (0..matrix.ncols()).map(|k| (0, k + 1)).collect();
        Self {
            matrix,
            columns,
            scale: vec![1.0; n],
            initial: vec![0.0; n],
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// (trajectory index, time index) of each column.
    pub fn columns(&self) -> &[(usize, usize)] {
        &self.columns
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }
}

pub fn assemble_snapshots(trajectories: &[Trajectory], space: &VariableSpace) -> Result<SnapshotMatrix> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::Empty("no trajectories to assemble".into()))?;
    let n = space.n_theta();
    let samples = first.samples();
    for (p, t) in trajectories.iter().enumerate() {
        if t.theta().nrows() != n {
            return Err(Error::dim("trajectory differential rows", n, t.theta().nrows()));
        }
        if t.samples() != samples || t.dt() != first.dt() {
            return Err(Error::GridMismatch(format!(
                "trajectory {p} has {} samples at dt {}, expected {samples} at dt {}",
                t.samples(),
                t.dt(),
                first.dt()
            )));
        }
        if let Some(i) = t.theta_known().iter().position(|k| !k) {
            return Err(Error::MissingChannel(format!(
                "trajectory {p} lacks differential variable `{}`",
                space.theta_names()[i]
            )));
        }
    }
    let m = samples.saturating_sub(1);
    let initial = space.initial().to_vec();
    let scale = space.scale().to_vec();
    let mut matrix = DMatrix::zeros(n, m * trajectories.len());
    let mut columns = Vec::with_capacity(m * trajectories.len());
    for (p, t) in trajectories.iter().enumerate() {
        let th = t.theta();
        for k in 1..samples {
            let c = columns.len();
            for i in 0..n {
                matrix[(i, c)] = scale[i] * (th[(i, k)] - initial[i]);
            }
            columns.push((p, k));
        }
    }
    Ok(SnapshotMatrix {
        matrix,
        columns,
        scale,
        initial,
    })
}
