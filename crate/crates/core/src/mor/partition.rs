use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_util::one_based;

/// Primary / secondary / tertiary index sets (0-based, sorted).
///
/// Differential sets are disjoint and cover `0..n_theta`; algebraic sets are
/// disjoint and cover `0..n_gamma` (there are no secondary algebraic
/// variables). JSON stores 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    n_theta: usize,
    n_gamma: usize,
    primary_theta: Vec<usize>,
    secondary_theta: Vec<usize>,
    tertiary_theta: Vec<usize>,
    primary_gamma: Vec<usize>,
    tertiary_gamma: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    n_theta: usize,
    n_gamma: usize,
    #[serde(with = "one_based")]
    primary_theta: Vec<usize>,
    #[serde(with = "one_based")]
    secondary_theta: Vec<usize>,
    #[serde(with = "one_based")]
    tertiary_theta: Vec<usize>,
    #[serde(with = "one_based")]
    primary_gamma: Vec<usize>,
    #[serde(with = "one_based")]
    tertiary_gamma: Vec<usize>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        Partition::new(
            r.n_theta,
            r.n_gamma,
            r.primary_theta,
            r.secondary_theta,
            r.tertiary_theta,
            r.primary_gamma,
            r.tertiary_gamma,
        )
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        Self {
            n_theta: p.n_theta,
            n_gamma: p.n_gamma,
            primary_theta: p.primary_theta,
            secondary_theta: p.secondary_theta,
            tertiary_theta: p.tertiary_theta,
            primary_gamma: p.primary_gamma,
            tertiary_gamma: p.tertiary_gamma,
        }
    }
}

fn check_cover(what: &str, n: usize, sets: &[&[usize]]) -> Result<()> {
    let mut seen = vec![false; n];
    for set in sets {
        if set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidModel(format!("{what} index sets must be sorted and unique")));
        }
        for &i in *set {
            if i >= n {
                return Err(Error::IndexOutOfRange {
                    what: what.into(),
                    index: i,
                    len: n,
                });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidModel(format!("{what} index {} belongs to two sets", i + 1)));
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidModel(format!("{what} index {} belongs to no set", i + 1)));
    }
    Ok(())
}

impl Partition {
    pub fn new(
        n_theta: usize,
        n_gamma: usize,
        primary_theta: Vec<usize>,
        secondary_theta: Vec<usize>,
        tertiary_theta: Vec<usize>,
        primary_gamma: Vec<usize>,
        tertiary_gamma: Vec<usize>,
    ) -> Result<Self> {
        check_cover("differential", n_theta, &[&primary_theta, &secondary_theta, &tertiary_theta])?;
        check_cover("algebraic", n_gamma, &[&primary_gamma, &tertiary_gamma])?;
        if primary_theta.is_empty() {
            return Err(Error::Empty("primary differential set".into()));
        }
        Ok(Self {
            n_theta,
            n_gamma,
            primary_theta,
            secondary_theta,
            tertiary_theta,
            primary_gamma,
            tertiary_gamma,
        })
    }

    /// Every variable primary.
    pub fn all_primary(n_theta: usize, n_gamma: usize) -> Result<Self> {
        Self::new(n_theta, n_gamma, (0..n_theta).collect(), vec![], vec![], (0..n_gamma).collect(), vec![])
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_gamma(&self) -> usize {
        self.n_gamma
    }

    pub fn primary_theta(&self) -> &[usize] {
        &self.primary_theta
    }

    pub fn secondary_theta(&self) -> &[usize] {
        &self.secondary_theta
    }

    pub fn tertiary_theta(&self) -> &[usize] {
        &self.tertiary_theta
    }

    pub fn primary_gamma(&self) -> &[usize] {
        &self.primary_gamma
    }

    pub fn tertiary_gamma(&self) -> &[usize] {
        &self.tertiary_gamma
    }

    /// 1-based copy of a set, for display.
    pub fn one_based(set: &[usize]) -> Vec<usize> {
        set.iter().map(|i| i + 1).collect()
    }
}
