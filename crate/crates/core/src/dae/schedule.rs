use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named input channel declared by a model, with the value used when a
/// schedule leaves the channel unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputChannel {
    pub name: String,
    pub default: f64,
}

impl InputChannel {
    pub fn new(name: impl Into<String>, default: f64) -> Self {
        Self {
            name: name.into(),
            default,
        }
    }
}

/// Piecewise-linear time series, held constant outside its time range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::dim("series values", times.len(), values.len()));
        }
        if times.is_empty() {
            return Err(Error::Empty("time series".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "time series must be strictly increasing in time".into(),
            ));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite value in time series".into()));
        }
        Ok(Self { times, values })
    }

    /// Reads a two-column `time_s,value` CSV with a header row.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for record in rdr.records() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::InvalidParameter(format!(
                    "expected two columns (time_s, value), got {}",
                    record.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse `{s}` as a number")))
            };
            times.push(parse(&record[0])?);
            values.push(parse(&record[1])?);
        }
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        // first index with times[i] > t
        let i = self.times.partition_point(|&x| x <= t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn covers(&self, t_final: f64) -> bool {
        self.times[0] <= 0.0 && self.times[self.times.len() - 1] >= t_final
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    Constant(f64),
    Series(PiecewiseLinear),
}

impl Signal {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Signal::Constant(v) => *v,
            Signal::Series(s) => s.eval(t),
        }
    }
}

/// Input values keyed by channel name. Channels a model declares but the
/// schedule omits take the model default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputSchedule {
    channels: BTreeMap<String, Signal>,
}

impl InputSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_constants<'a, I>(values: I) -> Self
    where
        I: IntoIterator<Item = (&'a String, &'a f64)>,
    {
        let mut s = Self::new();
        for (k, v) in values {
            s.channels.insert(k.clone(), Signal::Constant(*v));
        }
        s
    }

    pub fn with_constant(mut self, name: impl Into<String>, value: f64) -> Self {
        self.channels.insert(name.into(), Signal::Constant(value));
        self
    }

    pub fn with_series(mut self, name: impl Into<String>, series: PiecewiseLinear) -> Self {
        self.channels.insert(name.into(), Signal::Series(series));
        self
    }

    pub fn set(&mut self, name: impl Into<String>, signal: Signal) {
        self.channels.insert(name.into(), signal);
    }

    pub fn get(&self, name: &str) -> Option<&Signal> {
        self.channels.get(name)
    }

    pub fn channels(&self) -> impl Iterator<Item = (&String, &Signal)> {
        self.channels.iter()
    }

    /// Binds the schedule to a model's channel list.
    pub fn resolve(&self, declared: &[InputChannel]) -> Result<ResolvedSchedule> {
        if let Some(unknown) = self.channels.keys().find(|k| !declared.iter().any(|c| &c.name == *k)) {
            return Err(Error::UnknownChannel(unknown.clone()));
        }
        let signals = declared
            .iter()
            .map(|c| {
                self.channels
                    .get(&c.name)
                    .cloned()
                    .unwrap_or(Signal::Constant(c.default))
            })
            .collect();
        Ok(ResolvedSchedule {
            names: declared.iter().map(|c| c.name.clone()).collect(),
            signals,
        })
    }
}

/// Schedule bound to a model's channel order.
#[derive(Debug, Clone)]
pub struct ResolvedSchedule {
    names: Vec<String>,
    signals: Vec<Signal>,
}

impl ResolvedSchedule {
    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        for (o, s) in out.iter_mut().zip(&self.signals) {
            *o = s.eval(t);
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.signals.len()];
        self.eval_into(t, &mut out);
        out
    }

    /// Checks that every time series spans `[0, t_final]`.
    pub fn check_covers(&self, t_final: f64) -> Result<()> {
        for (name, s) in self.names.iter().zip(&self.signals) {
            if let Signal::Series(series) = s {
                if !series.covers(t_final) {
                    return Err(Error::InvalidParameter(format!(
                        "input `{name}` does not cover [0, {t_final}] s"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_and_holds_ends() {
        let s = PiecewiseLinear::new(vec![0.0, 10.0, 20.0], vec![0.0, 100.0, 50.0]).unwrap();
        assert_eq!(s.eval(-5.0), 0.0);
        assert_eq!(s.eval(5.0), 50.0);
        assert_eq!(s.eval(10.0), 100.0);
        assert_eq!(s.eval(15.0), 75.0);
        assert_eq!(s.eval(99.0), 50.0);
    }

    #[test]
    fn rejects_non_increasing_times() {
        assert!(PiecewiseLinear::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(PiecewiseLinear::new(vec![1.0, 0.0], vec![0.0; 2]).is_err());
    }

    #[test]
    fn parses_two_column_csv() {
        let data = "time_s,value\n0,0\n10, 36.5\n20,0\n";
        let s = PiecewiseLinear::from_csv(data.as_bytes()).unwrap();
        assert_eq!(s.times(), &[0.0, 10.0, 20.0]);
        assert_eq!(s.eval(5.0), 18.25);
    }

    #[test]
    fn resolve_fills_defaults_and_rejects_unknown() {
        let declared = vec![InputChannel::new("a", 1.0), InputChannel::new("b", 2.0)];
        let r = InputSchedule::new().with_constant("b", 5.0).resolve(&declared).unwrap();
        assert_eq!(r.eval(0.0), vec![1.0, 5.0]);
        let err = InputSchedule::new().with_constant("c", 0.0).resolve(&declared).unwrap_err();
        assert!(matches!(err, Error::UnknownChannel(_)));
    }

    #[test]
    fn coverage_check() {
        let declared = vec![InputChannel::new("a", 1.0)];
        let s = PiecewiseLinear::new(vec![0.0, 100.0], vec![0.0, 1.0]).unwrap();
        let r = InputSchedule::new().with_series("a", s).resolve(&declared).unwrap();
        assert!(r.check_covers(100.0).is_ok());
        assert!(r.check_covers(101.0).is_err());
    }
}
