//! Eigenvalue tables, degeneracy grouping, spectral flows and the
//! supersymmetry diagnostics built on them.

mod convergence;
mod flow;
mod susy;
mod witten;

pub use convergence::{
    truncation_convergence, truncation_convergence_capped, ConvergenceReport, ConvergenceStep,
    DEFAULT_N_CAP,
};
pub use flow::{
    asymptotic_self_energy, coupling_hamiltonian, linear_grid, log_grid, no_go_asymptote_check,
    spectral_flow_g, spectral_flow_r, FlowResult, FlowSource, NoGoReport, SweepKind,
    MAX_G_SWEEP_N_FOCK,
};
pub use susy::{
    goldstino_check, limit_check, susy_algebra_report, susy_algebra_report_with, AlgebraReport,
    AlgebraThresholds, GoldstinoReport, LimitReport, LIMIT_LEVELS,
};
pub use witten::{
    default_witten_beta, witten_index, WittenReport, DEFAULT_WITTEN_K, WITTEN_TAIL_MAX,
};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, ComplexMatrix};

/// Relative tolerance for grouping eigenvalues as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;

/// Consecutive run of (near-)degenerate levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegeneracyGroup {
    pub start: usize,
    pub size: usize,
}

/// Lowest levels of one Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    pub energies: Vec<f64>,
    pub groups: Vec<DegeneracyGroup>,
    pub n_fock_used: usize,
    pub converged: bool,
}

impl SpectrumTable {
    pub fn new(energies: Vec<f64>, tol_rel: f64, n_fock_used: usize) -> Self {
        let groups = degeneracy_groups(&energies, tol_rel);
        Self {
            energies,
            groups,
            n_fock_used,
            converged: false,
        }
    }

    pub fn regroup(&mut self, tol_rel: f64) {
        self.groups = degeneracy_groups(&self.energies, tol_rel);
    }

    /// `(group_id, group_size)` of a level.
    pub fn group_of(&self, level: usize) -> Option<(usize, usize)> {
        self.groups
            .iter()
            .enumerate()
            .find(|(_, g)| (g.start..g.start + g.size).contains(&level))
            .map(|(id, g)| (id, g.size))
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.size).collect()
    }
}

/// The `k` smallest eigenvalues of a Hermitian matrix, ascending, with
/// multiplicity.
pub fn lowest_k(h: &ComplexMatrix, k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > h.dim() {
        return Err(Error::contract(format!(
            "k = {k} must lie in 1..={}",
            h.dim()
        )));
    }
    let mut values = hermitian_eigvals(h)?;
    values.truncate(k);
    Ok(values)
}

/// Greedy grouping of ascending energies. A level joins the current group
/// while it lies within `tol_rel · max(1, |E_first|)` of the group's first
/// level.
pub fn degeneracy_groups(energies: &[f64], tol_rel: f64) -> Vec<DegeneracyGroup> {
    let mut groups: Vec<DegeneracyGroup> = Vec::new();
    for (i, &e) in energies.iter().enumerate() {
        match groups.last_mut() {
            Some(g)
                if {
                    let first = energies[g.start];
                    e - first <= tol_rel * first.abs().max(1.0)
                } =>
            {
                g.size += 1
            }
            _ => groups.push(DegeneracyGroup { start: i, size: 1 }),
        }
    }
    groups
}
