use std::collections::BTreeMap;
use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dae::{InputSchedule, VariableSpace};
use crate::error::{Error, Result};

/// One point of the parametric input space, keyed by input channel name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamPoint(pub BTreeMap<String, f64>);

impl ParamPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.0.insert(name.into(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    /// Constant-input schedule for this point layered over `base`.
    pub fn schedule_over(&self, base: &InputSchedule) -> InputSchedule {
        let mut s = base.clone();
        for (k, v) in &self.0 {
            s.set(k.clone(), crate::dae::Signal::Constant(*v));
        }
        s
    }
}

/// Samples of θ and γ on a uniform time grid.
///
/// Column `k` holds the state at `t_k = k·dt`; column 0 is the initial state.
/// Variables a run does not compute (tertiary variables of a hybrid run) are
/// marked unknown and hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    theta: DMatrix<f64>,
    gamma: DMatrix<f64>,
    inputs: DMatrix<f64>,
    theta_known: Vec<bool>,
    gamma_known: Vec<bool>,
    point: ParamPoint,
}

impl Trajectory {
    pub(crate) fn allocate(n_theta: usize, n_gamma: usize, n_inputs: usize, samples: usize, dt: f64) -> Self {
        Self {
            dt,
            theta: DMatrix::from_element(n_theta, samples, f64::NAN),
            gamma: DMatrix::from_element(n_gamma, samples, f64::NAN),
            inputs: DMatrix::from_element(n_inputs, samples, f64::NAN),
            theta_known: vec![true; n_theta],
            gamma_known: vec![true; n_gamma],
            point: ParamPoint::new(),
        }
    }

    pub fn from_parts(dt: f64, theta: DMatrix<f64>, gamma: DMatrix<f64>, point: ParamPoint) -> Result<Self> {
        if theta.ncols() != gamma.ncols() && gamma.nrows() > 0 {
            return Err(Error::GridMismatch("theta and gamma sample counts differ".into()));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        let theta_known = (0..theta.nrows()).map(|i| theta.row(i).iter().all(|v| !v.is_nan())).collect();
        let gamma_known = (0..gamma.nrows()).map(|i| gamma.row(i).iter().all(|v| !v.is_nan())).collect();
        let samples = theta.ncols();
        Ok(Self {
            dt,
            theta,
            gamma,
            inputs: DMatrix::zeros(0, samples),
            theta_known,
            gamma_known,
            point,
        })
    }

    /// Attaches the resolved input values, one column per sample.
    pub fn with_inputs(mut self, inputs: DMatrix<f64>) -> Result<Self> {
        if inputs.ncols() != self.samples() {
            return Err(Error::dim("input samples", self.samples(), inputs.ncols()));
        }
        self.inputs = inputs;
        Ok(self)
    }

    pub(crate) fn set_sample(&mut self, k: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) {
        self.theta.column_mut(k).copy_from_slice(theta);
        self.gamma.column_mut(k).copy_from_slice(gamma);
        self.inputs.column_mut(k).copy_from_slice(inputs);
    }

    pub(crate) fn set_known(&mut self, theta_known: Vec<bool>, gamma_known: Vec<bool>) {
        self.theta_known = theta_known;
        self.gamma_known = gamma_known;
    }

    pub(crate) fn theta_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.theta
    }

    pub(crate) fn gamma_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.gamma
    }

    pub(crate) fn theta_known_mut(&mut self) -> &mut [bool] {
        &mut self.theta_known
    }

    pub(crate) fn gamma_known_mut(&mut self) -> &mut [bool] {
        &mut self.gamma_known
    }

    pub fn set_point(&mut self, point: ParamPoint) {
        self.point = point;
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples, m + 1.
    pub fn samples(&self) -> usize {
        self.theta.ncols()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples()).map(|k| self.time(k)).collect()
    }

    pub fn t_final(&self) -> f64 {
        self.time(self.samples() - 1)
    }

    /// θ samples, N_θ × (m + 1).
    pub fn theta(&self) -> &DMatrix<f64> {
        &self.theta
    }

    /// γ samples, N_γ × (m + 1).
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    /// Input values at each sample (empty when read back from CSV).
    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn theta_known(&self) -> &[bool] {
        &self.theta_known
    }

    pub fn gamma_known(&self) -> &[bool] {
        &self.gamma_known
    }

    pub fn point(&self) -> &ParamPoint {
        &self.point
    }

    /// Writes `time_s` followed by one column per known variable.
    pub fn write_csv<W: Write>(&self, writer: W, space: &VariableSpace) -> Result<()> {
        if space.n_theta() != self.theta.nrows() || space.n_gamma() != self.gamma.nrows() {
            return Err(Error::dim("variable space", self.theta.nrows(), space.n_theta()));
        }
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["time_s".to_string()];
        let th: Vec<usize> = (0..space.n_theta()).filter(|&i| self.theta_known[i]).collect();
        let ga: Vec<usize> = (0..space.n_gamma()).filter(|&i| self.gamma_known[i]).collect();
        header.extend(th.iter().map(|&i| space.theta_names()[i].clone()));
        header.extend(ga.iter().map(|&i| space.gamma_names()[i].clone()));
        w.write_record(&header)?;
        let mut row = Vec::with_capacity(header.len());
        for k in 0..self.samples() {
            row.clear();
            row.push(self.time(k).to_string());
            row.extend(th.iter().map(|&i| self.theta[(i, k)].to_string()));
            row.extend(ga.iter().map(|&i| self.gamma[(i, k)].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a trajectory CSV written by [`Trajectory::write_csv`]. Columns
    /// are matched to `space` by name; absent variables are marked unknown.
    pub fn read_csv<R: Read>(reader: R, space: &VariableSpace) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("time_s") {
            return Err(Error::InvalidParameter("trajectory CSV must start with a `time_s` column".into()));
        }
        enum Slot {
            Theta(usize),
            Gamma(usize),
        }
        let mut slots = Vec::new();
        for name in header.iter().skip(1) {
            if let Some(i) = space.theta_index(name) {
                slots.push(Slot::Theta(i));
            } else if let Some(i) = space.gamma_index(name) {
                slots.push(Slot::Gamma(i));
            } else {
                return Err(Error::InvalidParameter(format!("unknown variable column `{name}`")));
            }
        }
        let mut times = Vec::new();
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let mut values = record.iter().map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse `{s}` as a number")))
            });
            times.push(values.next().transpose()?.unwrap_or(f64::NAN));
            columns.push(values.collect::<Result<Vec<_>>>()?);
        }
        if times.len() < 2 {
            return Err(Error::Empty("trajectory (need at least two samples)".into()));
        }
        let dt = times[1] - times[0];
        for (k, t) in times.iter().enumerate() {
            if (t - k as f64 * dt).abs() > 1e-9 * dt.max(1.0) * (k as f64 + 1.0) {
                return Err(Error::GridMismatch(format!("non-uniform time grid at row {k}")));
            }
        }
        let samples = times.len();
        let mut theta = DMatrix::from_element(space.n_theta(), samples, f64::NAN);
        let mut gamma = DMatrix::from_element(space.n_gamma(), samples, f64::NAN);
        for (k, row) in columns.iter().enumerate() {
            if row.len() != slots.len() {
                return Err(Error::dim("trajectory CSV row", slots.len(), row.len()));
            }
            for (slot, &v) in slots.iter().zip(row) {
                match *slot {
                    Slot::Theta(i) => theta[(i, k)] = v,
                    Slot::Gamma(i) => gamma[(i, k)] = v,
                }
            }
        }
        Self::from_parts(dt, theta, gamma, ParamPoint::new())
    }
}
