use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structurally nonzero mixed second derivative `d²ψ_row / dγ_gamma dθ_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MixedPair {
    pub row: usize,
    pub gamma: usize,
    pub theta: usize,
}

/// Declared sparsity of the derivative map φ and the algebraic map ψ.
///
/// Each relation is stored row-wise as a sorted list of the variables that
/// structurally appear in that equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incidence {
    phi_theta: Vec<Vec<usize>>,
    phi_gamma: Vec<Vec<usize>>,
    psi_theta: Vec<Vec<usize>>,
    psi_gamma: Vec<Vec<usize>>,
    mixed: Vec<MixedPair>,
}

/// Row-wise builder for [`Incidence`].
#[derive(Debug, Clone)]
pub struct IncidenceBuilder {
    n_theta: usize,
    n_gamma: usize,
    phi_theta: Vec<BTreeSet<usize>>,
    phi_gamma: Vec<BTreeSet<usize>>,
    psi_theta: Vec<BTreeSet<usize>>,
    psi_gamma: Vec<BTreeSet<usize>>,
    mixed: BTreeSet<MixedPair>,
}

impl IncidenceBuilder {
    pub fn new(n_theta: usize, n_gamma: usize) -> Self {
        Self {
            n_theta,
            n_gamma,
            phi_theta: vec![BTreeSet::new(); n_theta],
            phi_gamma: vec![BTreeSet::new(); n_theta],
            psi_theta: vec![BTreeSet::new(); n_gamma],
            // each ψ_k defines γ_k
            psi_gamma: (0..n_gamma).map(|k| BTreeSet::from([k])).collect(),
            mixed: BTreeSet::new(),
        }
    }

    pub fn phi(&mut self, row: usize, thetas: &[usize], gammas: &[usize]) -> &mut Self {
        self.phi_theta[row].extend(thetas);
        self.phi_gamma[row].extend(gammas);
        self
    }

    pub fn psi(&mut self, row: usize, thetas: &[usize], gammas: &[usize]) -> &mut Self {
        self.psi_theta[row].extend(thetas);
        self.psi_gamma[row].extend(gammas);
        self
    }

    pub fn mixed(&mut self, row: usize, gamma: usize, theta: usize) -> &mut Self {
        self.mixed.insert(MixedPair { row, gamma, theta });
        self
    }

    pub fn build(&self) -> Result<Incidence> {
        let collect = |v: &[BTreeSet<usize>]| v.iter().map(|s| s.iter().copied().collect()).collect();
        Incidence::from_rows(
            self.n_theta,
            self.n_gamma,
            collect(&self.phi_theta),
            collect(&self.phi_gamma),
            collect(&self.psi_theta),
            collect(&self.psi_gamma),
            self.mixed.iter().copied().collect(),
        )
    }
}

fn check_rows(what: &str, rows: &mut [Vec<usize>], len: usize) -> Result<()> {
    for row in rows.iter_mut() {
        row.sort_unstable();
        row.dedup();
        if let Some(&bad) = row.iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange {
                what: what.to_string(),
                index: bad,
                len,
            });
        }
    }
    Ok(())
}

impl Incidence {
    pub fn from_rows(
        n_theta: usize,
        n_gamma: usize,
        mut phi_theta: Vec<Vec<usize>>,
        mut phi_gamma: Vec<Vec<usize>>,
        mut psi_theta: Vec<Vec<usize>>,
        mut psi_gamma: Vec<Vec<usize>>,
        mut mixed: Vec<MixedPair>,
    ) -> Result<Self> {
        for (what, rows, expected) in [
            ("theta-in-phi rows", &phi_theta, n_theta),
            ("gamma-in-phi rows", &phi_gamma, n_theta),
            ("theta-in-psi rows", &psi_theta, n_gamma),
            ("gamma-in-psi rows", &psi_gamma, n_gamma),
        ] {
            if rows.len() != expected {
                return Err(Error::dim(what, expected, rows.len()));
            }
        }
        check_rows("theta (in phi)", &mut phi_theta, n_theta)?;
        check_rows("gamma (in phi)", &mut phi_gamma, n_gamma)?;
        check_rows("theta (in psi)", &mut psi_theta, n_theta)?;
        check_rows("gamma (in psi)", &mut psi_gamma, n_gamma)?;
        for (k, row) in psi_gamma.iter().enumerate() {
            if row.binary_search(&k).is_err() {
                return Err(Error::InvalidModel(format!(
                    "algebraic equation {k} does not involve the variable it defines"
                )));
            }
        }
        mixed.sort_unstable();
        mixed.dedup();
        for m in &mixed {
            let ok = m.row < n_gamma
                && psi_gamma[m.row].binary_search(&m.gamma).is_ok()
                && psi_theta[m.row].binary_search(&m.theta).is_ok();
            if !ok {
                return Err(Error::InvalidModel(format!(
                    "mixed pair {m:?} is not a position where both first derivatives are structurally nonzero"
                )));
            }
        }
        Ok(Self {
            phi_theta,
            phi_gamma,
            psi_theta,
            psi_gamma,
            mixed,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.phi_theta.len()
    }

    pub fn n_gamma(&self) -> usize {
        self.psi_gamma.len()
    }

    pub fn phi_theta(&self, row: usize) -> &[usize] {
        &self.phi_theta[row]
    }

    pub fn phi_gamma(&self, row: usize) -> &[usize] {
        &self.phi_gamma[row]
    }

    pub fn psi_theta(&self, row: usize) -> &[usize] {
        &self.psi_theta[row]
    }

    pub fn psi_gamma(&self, row: usize) -> &[usize] {
        &self.psi_gamma[row]
    }

    pub fn mixed(&self) -> &[MixedPair] {
        &self.mixed
    }

    /// Order in which the algebraic rows can be assigned one after another,
    /// or `None` when the algebraic dependency graph has a cycle.
    pub fn algebraic_order(&self) -> Option<Vec<usize>> {
        let n = self.n_gamma();
        // dependents[i] = rows that read γ_i
        let mut dependents = vec![Vec::new(); n];
        let mut pending = vec![0usize; n];
        for (k, row) in self.psi_gamma.iter().enumerate() {
            for &i in row.iter().filter(|&&i| i != k) {
                dependents[i].push(k);
                pending[k] += 1;
            }
        }
        let mut ready: std::collections::VecDeque<usize> = (0..n).filter(|&k| pending[k] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(k) = ready.pop_front() {
            order.push(k);
            for &d in &dependents[k] {
                pending[d] -= 1;
                if pending[d] == 0 {
                    ready.push_back(d);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}
