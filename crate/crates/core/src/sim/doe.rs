use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trajectory::ParamPoint;
use crate::error::{Error, Result};
use crate::thermal::absolute_humidity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub unit: String,
}

/// Box-bounded parametric input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    ranges: Vec<ParamRange>,
}

impl ParamSpace {
    pub fn new(ranges: Vec<ParamRange>) -> Result<Self> {
        for r in &ranges {
            if !(r.lower < r.upper) {
                return Err(Error::InvalidParameter(format!(
                    "range `{}`: lower bound {} must be below upper bound {}",
                    r.name, r.lower, r.upper
                )));
            }
        }
        Ok(Self { ranges })
    }

    /// Cooling-scenario cabin input space: vehicle speed, ambient state, solar
    /// irradiance and HVAC inlet air. Relative humidities are in percent.
    pub fn cabin_cooling() -> Self {
        let r = |name: &str, lower: f64, upper: f64, unit: &str| ParamRange {
            name: name.into(),
            lower,
            upper,
            unit: unit.into(),
        };
        Self {
            ranges: vec![
                r("V_veh", 0.0, 130.0, "km/h"),
                r("T_ext", 20.0, 45.0, "degC"),
                r("r_ext", 0.0, 80.0, "%"),
                r("I_solar", 0.0, 1200.0, "W/m2"),
                r("m_inlet", 100.0, 600.0, "kg/h"),
                r("r_inlet", 0.0, 100.0, "%"),
                r("T_inlet", 2.0, 12.0, "degC"),
            ],
        }
    }

    pub fn ranges(&self) -> &[ParamRange] {
        &self.ranges
    }

    pub fn contains(&self, point: &ParamPoint) -> bool {
        self.ranges.iter().all(|r| {
            point
                .get(&r.name)
                .is_some_and(|v| v >= r.lower && v <= r.upper)
        })
    }
}

/// A set of parameter points produced by a design of experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoePlan {
    pub points: Vec<ParamPoint>,
    pub seed: u64,
    pub requested: usize,
    pub retained: usize,
}

impl DoePlan {
    /// Plan from explicitly listed points.
    pub fn from_points(points: Vec<ParamPoint>) -> Self {
        let n = points.len();
        Self {
            points,
            seed: 0,
            requested: n,
            retained: n,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Latin-hypercube design: every dimension is cut into `n` equal bins and
/// each bin holds exactly one point. Reproducible for a fixed seed.
pub fn sample_doe(space: &ParamSpace, n: usize, seed: u64) -> Result<DoePlan> {
    if n == 0 {
        return Err(Error::InvalidParameter("DOE needs at least one point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![ParamPoint::new(); n];
    let mut bins: Vec<usize> = (0..n).collect();
    for range in space.ranges() {
        bins.shuffle(&mut rng);
        let width = (range.upper - range.lower) / n as f64;
        for (point, &bin) in points.iter_mut().zip(&bins) {
            let u: f64 = rng.random();
            let v = (range.lower + (bin as f64 + u) * width).min(range.upper);
            point.0.insert(range.name.clone(), v);
        }
    }
    Ok(DoePlan {
        points,
        seed,
        requested: n,
        retained: n,
    })
}

/// Keeps the points whose inlet air carries no more water vapour than the
/// ambient air (`T_inlet`, `r_inlet` against `T_ext`, `r_ext`; humidities in
/// percent), at total pressure `pressure` Pa.
pub fn filter_constraints(plan: &DoePlan, pressure: f64) -> Result<DoePlan> {
    let get = |p: &ParamPoint, name: &str| p.get(name).ok_or_else(|| Error::MissingChannel(name.to_string()));
    let mut kept = Vec::with_capacity(plan.points.len());
    for p in &plan.points {
        let x_inlet = absolute_humidity(get(p, "T_inlet")?, get(p, "r_inlet")? / 100.0, pressure)?;
        let x_ext = absolute_humidity(get(p, "T_ext")?, get(p, "r_ext")? / 100.0, pressure)?;
        if x_inlet <= x_ext {
            kept.push(p.clone());
        }
    }
    Ok(DoePlan {
        retained: kept.len(),
        points: kept,
        seed: plan.seed,
        requested: plan.requested,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_inside_bounds() {
        let space = ParamSpace::cabin_cooling();
        let plan = sample_doe(&space, 1, 3).unwrap();
        assert_eq!(plan.len(), 1);
        assert!(space.contains(&plan.points[0]));
    }

    #[test]
    fn same_seed_same_plan() {
        let space = ParamSpace::cabin_cooling();
        assert_eq!(sample_doe(&space, 50, 11).unwrap(), sample_doe(&space, 50, 11).unwrap());
        assert_ne!(sample_doe(&space, 50, 11).unwrap(), sample_doe(&space, 50, 12).unwrap());
    }

    #[test]
    fn one_point_per_bin() {
        let space = ParamSpace::cabin_cooling();
        let n = 40;
        let plan = sample_doe(&space, n, 5).unwrap();
        for r in space.ranges() {
            let mut seen = vec![false; n];
            for p in &plan.points {
                let v = p.get(&r.name).unwrap();
                let bin = (((v - r.lower) / (r.upper - r.lower)) * n as f64).floor().min((n - 1) as f64) as usize;
                assert!(!seen[bin], "bin {bin} of {} hit twice", r.name);
                seen[bin] = true;
            }
        }
    }

    #[test]
    fn rejects_inverted_range() {
        let bad = ParamSpace::new(vec![ParamRange {
            name: "a".into(),
            lower: 1.0,
            upper: 1.0,
            unit: String::new(),
        }]);
        assert!(bad.is_err());
    }

    #[test]
    fn dry_inlet_always_kept() {
        let p = ParamPoint::new()
            .with("T_inlet", 2.0)
            .with("r_inlet", 0.0)
            .with("T_ext", 20.0)
            .with("r_ext", 0.0);
        let plan = filter_constraints(&DoePlan::from_points(vec![p]), 101_325.0).unwrap();
        assert_eq!(plan.retained, 1);
    }

    #[test]
    fn humid_inlet_below_hot_ambient_kept() {
        // x_inlet ≈ 8.7 g/kg, x_ext ≈ 24.5 g/kg
        let p = ParamPoint::new()
            .with("T_inlet", 12.0)
            .with("r_inlet", 100.0)
            .with("T_ext", 45.0)
            .with("r_ext", 40.0);
        let plan = filter_constraints(&DoePlan::from_points(vec![p]), 101_325.0).unwrap();
        assert_eq!(plan.retained, 1);
    }

    #[test]
    fn humid_inlet_above_dry_ambient_dropped() {
        let p = ParamPoint::new()
            .with("T_inlet", 12.0)
            .with("r_inlet", 100.0)
            .with("T_ext", 20.0)
            .with("r_ext", 10.0);
        let plan = filter_constraints(&DoePlan::from_points(vec![p]), 101_325.0).unwrap();
        assert_eq!(plan.retained, 0);
        assert_eq!(plan.requested, 1);
    }

    #[test]
    fn missing_channel_is_an_error() {
        let p = ParamPoint::new().with("T_inlet", 2.0);
        let err = filter_constraints(&DoePlan::from_points(vec![p]), 101_325.0).unwrap_err();
        assert!(matches!(err, Error::MissingChannel(_)));
    }
}
