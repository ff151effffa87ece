use super::{degeneracy_groups, DEFAULT_DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, ComplexMatrix};

/// Default number of levels in the regularized trace.
pub const DEFAULT_WITTEN_K: usize = 60;
/// Largest admissible Boltzmann weight of the first neglected level.
pub const WITTEN_TAIL_MAX: f64 = 1e-8;

/// `β = 5/ω`
pub fn default_witten_beta(omega: f64) -> f64 {
    5.0 / omega
}

#[derive(Clone, Debug, PartialEq)]
pub struct WittenReport {
    pub beta: f64,
    pub index_value: f64,
    pub rounded: i64,
    /// `e^{−β E}` of the first level left out of the trace.
    pub truncation_tail: f64,
    /// Levels actually traced; a degenerate group straddling `k` is completed.
    pub levels_used: usize,
    /// `⟨N_F⟩` of each traced eigenvector.
    pub grading_expectations: Vec<f64>,
}

impl WittenReport {
    pub fn rounding_error(&self) -> f64 {
        (self.index_value - self.rounded as f64).abs()
    }
}

/// `Σ_{i<k} ⟨ψ_i|N_F|ψ_i⟩ e^{−β E_i}` over the lowest eigenpairs of `h`.
pub fn witten_index(
    h: &ComplexMatrix,
    grading: &ComplexMatrix,
    beta: f64,
    k: usize,
) -> Result<WittenReport> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta must be positive"));
    }
    if grading.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: grading.dim(),
        });
    }
    if k == 0 || k > h.dim() {
        return Err(Error::contract(format!(
            "k = {k} must lie in 1..={}",
            h.dim()
        )));
    }
    let eig = hermitian_eigs(h)?;
    // Complete a degenerate group cut by k; the trace over it is basis-free.
    let levels_used = degeneracy_groups(&eig.values, DEFAULT_DEGENERACY_TOL)
        .iter()
        .map(|g| g.start + g.size)
        .find(|&end| end >= k)
        .unwrap_or(eig.values.len());
    let truncation_tail = eig
        .values
        .get(levels_used)
        .map_or(0.0, |&e| (-beta * e).exp());
    if truncation_tail >= WITTEN_TAIL_MAX {
        return Err(Error::InvalidBeta {
            tail: truncation_tail,
        });
    }
    let grading_expectations: Vec<f64> = (0..levels_used)
        .map(|i| {
            let v = eig.vector(i);
            let nv = grading.apply(&v);
            v.iter().zip(&nv).map(|(a, b)| (a.conj() * b).re).sum()
        })
        .collect();
    let index_value = grading_expectations
        .iter()
        .zip(&eig.values)
        .map(|(n, e)| n * (-beta * e).exp())
        .sum::<f64>();
    Ok(WittenReport {
        beta,
        index_value,
        rounded: index_value.round() as i64,
        truncation_tail,
        levels_used,
        grading_expectations,
    })
}
