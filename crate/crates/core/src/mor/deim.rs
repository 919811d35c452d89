use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative margin under which two magnitudes count as tied.
const TIE_TOLERANCE: f64 = 1e-10;

fn argmax_abs(v: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, -1.0);
    for (i, x) in v.enumerate() {
        if x.abs() > best.1 * (1.0 + TIE_TOLERANCE) {
            best = (i, x.abs());
        }
    }
    best
}

/// Greedy DEIM row selection on the columns of `v`, in selection order.
///
/// The first index maximises |V[:,1]|; each later index maximises the
/// residual of the next column after interpolating it on the rows chosen so
/// far. Magnitudes within a relative 1e-10 of each other count as tied and
/// go to the lowest index, so duplicated rows select deterministically.
pub fn select_interpolation_indices(v: &DMatrix<f64>) -> Result<Vec<usize>> {
    let (n, k) = v.shape();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("DEIM needs 1..={n} modes, got {k}")));
    }
    let (p0, m0) = argmax_abs(v.column(0).iter().copied());
    if !(m0 > 0.0) {
        return Err(Error::Singular {
            what: "DEIM: first mode is zero".into(),
            ratio: 0.0,
        });
    }
    let mut picked = vec![p0];
    for l in 1..k {
        let vp = DMatrix::from_fn(l, l, |r, c| v[(picked[r], c)]);
        let rhs = DVector::from_iterator(l, picked.iter().map(|&p| v[(p, l)]));
        let c = vp.lu().solve(&rhs).ok_or_else(|| Error::Singular {
            what: format!("DEIM interpolation system at step {}", l + 1),
            ratio: 0.0,
        })?;
        let residual = (0..n).map(|i| v[(i, l)] - (0..l).map(|j| v[(i, j)] * c[j]).sum::<f64>());
        let (p, mag) = argmax_abs(residual);
        let col_norm = v.column(l).amax();
        if !(mag > 1e-12 * col_norm.max(f64::MIN_POSITIVE)) || picked.contains(&p) {
            return Err(Error::Singular {
                what: format!("DEIM: mode {} is interpolated exactly by the previous ones", l + 1),
                ratio: mag / col_norm,
            });
        }
        picked.push(p);
    }
    Ok(picked)
}
