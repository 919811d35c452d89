use super::partition::Partition;
use crate::dae::DaeModel;
use crate::error::{Error, Result};

/// Splits the variables of `model` given the primary differential set.
///
/// * primary algebraic: γ_i appearing in φ[P^θ], or carrying a declared mixed
///   pair (∂²ψ_k/∂γ_i∂θ_j ≠ 0 for some row k) with j ∈ P^θ;
/// * secondary differential: non-primary θ_j read by φ[P^θ] or ψ[P^γ];
/// * tertiary: everything else.
///
/// A non-primary γ read by ψ[P^γ] would be a secondary algebraic variable,
/// which the reduction does not support.
pub fn classify_variables(model: &DaeModel, primary_theta: &[usize]) -> Result<Partition> {
    let (nt, ng) = (model.n_theta(), model.n_gamma());
    let inc = model.incidence();
    let mut p_theta = primary_theta.to_vec();
    p_theta.sort_unstable();
    p_theta.dedup();
    if p_theta.len() != primary_theta.len() {
        return Err(Error::InvalidParameter("primary differential indices repeat".into()));
    }
    if let Some(&j) = p_theta.iter().find(|&&j| j >= nt) {
        return Err(Error::IndexOutOfRange {
            what: "primary differential".into(),
            index: j,
            len: nt,
        });
    }
    let mut is_pt = vec![false; nt];
    for &j in &p_theta {
        is_pt[j] = true;
    }

    let mut is_pg = vec![false; ng];
    for &j in &p_theta {
        for &i in inc.phi_gamma(j) {
            is_pg[i] = true;
        }
    }
    for m in inc.mixed() {
        if is_pt[m.theta] {
            is_pg[m.gamma] = true;
        }
    }

    let mut coupled_theta = vec![false; nt];
    let mut secondary_gamma = Vec::new();
    for &j in &p_theta {
        for &i in inc.phi_theta(j) {
            coupled_theta[i] = true;
        }
    }
    for k in (0..ng).filter(|&k| is_pg[k]) {
        for &i in inc.psi_theta(k) {
            coupled_theta[i] = true;
        }
        for &i in inc.psi_gamma(k) {
            if !is_pg[i] {
                secondary_gamma.push(i);
            }
        }
    }
    if !secondary_gamma.is_empty() {
        secondary_gamma.sort_unstable();
        secondary_gamma.dedup();
        return Err(Error::SecondaryAlgebraic(secondary_gamma));
    }

    let secondary: Vec<usize> = (0..nt).filter(|&i| !is_pt[i] && coupled_theta[i]).collect();
    let tertiary: Vec<usize> = (0..nt).filter(|&i| !is_pt[i] && !coupled_theta[i]).collect();
    let pg: Vec<usize> = (0..ng).filter(|&k| is_pg[k]).collect();
    let tg: Vec<usize> = (0..ng).filter(|&k| !is_pg[k]).collect();
    Partition::new(nt, ng, p_theta, secondary, tertiary, pg, tg)
}
