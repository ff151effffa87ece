use super::lowest_k;
use crate::error::{Error, Result};
use crate::fock::FockParams;
use crate::linalg::ComplexMatrix;

/// Default truncation ceiling for convergence studies.
pub const DEFAULT_N_CAP: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceStep {
    pub n_fock: usize,
    /// Largest change of the lowest levels relative to the previous step.
    pub drift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    /// Smaller truncation of the first pair that agrees within `tol`.
    pub n_star: usize,
    pub fock: FockParams,
    pub drift: f64,
    pub energies: Vec<f64>,
    pub history: Vec<ConvergenceStep>,
    pub tol: f64,
}

/// Doubles the truncation from `fp0` until the lowest `k` eigenvalues move
/// by at most `tol`, up to [`DEFAULT_N_CAP`].
pub fn truncation_convergence<F>(
    builder: F,
    k: usize,
    tol: f64,
    fp0: &FockParams,
) -> Result<ConvergenceReport>
where
    F: Fn(&FockParams) -> Result<ComplexMatrix>,
{
    truncation_convergence_capped(builder, k, tol, fp0, DEFAULT_N_CAP)
}

pub fn truncation_convergence_capped<F>(
    builder: F,
    k: usize,
    tol: f64,
    fp0: &FockParams,
    cap: usize,
) -> Result<ConvergenceReport>
where
    F: Fn(&FockParams) -> Result<ComplexMatrix>,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid("convergence tolerance must be positive"));
    }
    let mut fp = *fp0;
    let mut energies = lowest_k(&builder(&fp)?, k)?;
    let mut history = vec![ConvergenceStep {
        n_fock: fp.n_fock(),
        drift: f64::INFINITY,
    }];
    let mut drift = f64::INFINITY;
    loop {
        let n_next = fp.n_fock() * 2;
        if n_next > cap {
            return Err(Error::TruncationNotConverged { cap, drift });
        }
        let fp_next = fp.rescaled(n_next)?;
        let next = lowest_k(&builder(&fp_next)?, k)?;
        drift = energies
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        log::debug!("n_fock {} -> {n_next}: drift {drift:e}", fp.n_fock());
        history.push(ConvergenceStep {
            n_fock: n_next,
            drift,
        });
        if drift <= tol {
            return Ok(ConvergenceReport {
                n_star: fp.n_fock(),
                fock: fp,
                drift,
                energies,
                history,
                tol,
            });
        }
        fp = fp_next;
        energies = next;
    }
}
