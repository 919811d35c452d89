//! Serde adapters for artifact JSON.

/// `DMatrix` as an array of rows.
pub(crate) mod dense_rows {
    use nalgebra::DMatrix;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Dense {
        rows: usize,
        cols: usize,
        data: Vec<Vec<f64>>,
    }

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let data = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        Dense {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let dense = Dense::deserialize(d)?;
        if dense.data.len() != dense.rows || dense.data.iter().any(|r| r.len() != dense.cols) {
            return Err(D::Error::custom(format!(
                "matrix data does not match declared shape {}x{}",
                dense.rows, dense.cols
            )));
        }
        Ok(DMatrix::from_fn(dense.rows, dense.cols, |i, j| dense.data[i][j]))
    }
}

/// 0-based indices stored as sorted 1-based arrays.
pub(crate) mod one_based {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|i| i + 1).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.contains(&0) {
            return Err(D::Error::custom("indices are 1-based"));
        }
        Ok(v.into_iter().map(|i| i - 1).collect())
    }
}
