use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::snapshots::SnapshotMatrix;
use crate::error::{Error, Result};
use crate::serde_util::dense_rows;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationRule {
    /// Smallest N with ‖A − V S Hᵀ‖_F ≤ ε.
    Epsilon(f64),
    /// Fixed N.
    Modes(usize),
}

/// Truncated left singular basis of a snapshot matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedBasis {
    #[serde(with = "dense_rows")]
    modes: DMatrix<f64>,
    singular_values: Vec<f64>,
    spectrum: Vec<f64>,
    rule: TruncationRule,
    scale: Vec<f64>,
    initial: Vec<f64>,
}

/// Flips each column so its largest-magnitude entry (first one on ties) is positive.
pub fn canonicalize_signs(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if !col.is_empty() && col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

impl ReducedBasis {
    /// Wraps an externally supplied basis (e.g. a stored fixture). Columns
    /// are used as given.
    pub fn from_modes(modes: DMatrix<f64>, singular_values: Vec<f64>, scale: Vec<f64>, initial: Vec<f64>) -> Result<Self> {
        let n = modes.nrows();
        if modes.ncols() == 0 {
            return Err(Error::Empty("basis has no modes".into()));
        }
        if singular_values.len() != modes.ncols() {
            return Err(Error::dim("singular values", modes.ncols(), singular_values.len()));
        }
        if scale.len() != n {
            return Err(Error::dim("scale", n, scale.len()));
        }
        if initial.len() != n {
            return Err(Error::dim("initial values", n, initial.len()));
        }
        Ok(Self {
            rule: TruncationRule::Modes(modes.ncols()),
            spectrum: singular_values.clone(),
            modes,
            singular_values,
            scale,
            initial,
        })
    }

    /// Unscaled, zero-offset basis.
    pub fn from_matrix(modes: DMatrix<f64>) -> Result<Self> {
        let (n, k) = modes.shape();
        Self::from_modes(modes, vec![1.0; k], vec![1.0; n], vec![0.0; n])
    }

    /// V, N_θ × N.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.ncols()
    }

    pub fn n_theta(&self) -> usize {
        self.modes.nrows()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Every singular value of the snapshot matrix, non-increasing.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn rule(&self) -> TruncationRule {
        self.rule
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Frobenius norm of the discarded part, sqrt(Σ_{i>N} s_i²).
    pub fn truncation_residual(&self) -> f64 {
        self.spectrum[self.n_modes().min(self.spectrum.len())..]
            .iter()
            .map(|s| s * s)
            .sum::<f64>()
            .sqrt()
    }

    /// Same basis restricted to its first `n` modes.
    pub fn leading(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n_modes() {
            return Err(Error::InvalidParameter(format!(
                "mode count {n} must lie in 1..={}",
                self.n_modes()
            )));
        }
        Ok(Self {
            modes: self.modes.columns(0, n).into_owned(),
            singular_values: self.singular_values[..n].to_vec(),
            spectrum: self.spectrum.clone(),
            rule: TruncationRule::Modes(n),
            scale: self.scale.clone(),
            initial: self.initial.clone(),
        })
    }
}

/// Left singular vectors of A, sorted by decreasing singular value.
fn left_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let (rows, cols) = a.shape();
    // wide: A = Rᵀ Qᵀ, so the left vectors of A are the right vectors of R
    let (u, s) = if cols > rows {
        let qr = a.transpose().qr();
        let r = qr.r();
        let svd = r.svd(false, true);
        let v_t = svd.v_t.expect("requested right vectors");
        (v_t.transpose(), svd.singular_values)
    } else {
        let svd = a.clone().svd(true, false);
        (svd.u.expect("requested left vectors"), svd.singular_values)
    };
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |i, c| u[(i, order[c])]);
    let s_sorted = order.iter().map(|&i| s[i]).collect();
    (u_sorted, s_sorted)
}

pub fn truncated_svd(snapshots: &SnapshotMatrix, rule: TruncationRule) -> Result<ReducedBasis> {
    let a = snapshots.matrix();
    if a.is_empty() || a.iter().all(|v| *v == 0.0) {
        return Err(Error::Empty("snapshot matrix is zero".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("snapshot matrix has non-finite entries".into()));
    }
    let (u, spectrum) = left_svd(a);
    let s1 = spectrum[0];
    let rank = spectrum.iter().filter(|s| **s > s1 * 1e-14).count();
    let n = match rule {
        TruncationRule::Modes(n) => {
            if n == 0 || n > rank {
                return Err(Error::InvalidParameter(format!(
                    "requested {n} modes but the snapshot matrix has numerical rank {rank}"
                )));
            }
            n
        }
        TruncationRule::Epsilon(eps) => {
            if !(eps > 0.0) {
                return Err(Error::InvalidParameter("eps_tol must be positive".into()));
            }
            // tail[i] = sqrt(Σ_{j≥i} s_j²)
            let mut tail = vec![0.0; spectrum.len() + 1];
            for i in (0..spectrum.len()).rev() {
                tail[i] = (tail[i + 1] * tail[i + 1] + spectrum[i] * spectrum[i]).sqrt();
            }
            (1..=rank).find(|&n| tail[n] <= eps).unwrap_or(rank)
        }
    };
    let mut modes = u.columns(0, n).into_owned();
    canonicalize_signs(&mut modes);
    Ok(ReducedBasis {
        modes,
        singular_values: spectrum[..n].to_vec(),
        spectrum,
        rule,
        scale: snapshots.scale().to_vec(),
        initial: snapshots.initial().to_vec(),
    })
}
