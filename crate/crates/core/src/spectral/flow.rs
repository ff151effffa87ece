use rayon::prelude::*;

use super::{lowest_k, SpectrumTable, DEFAULT_DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::fock::FockParams;
use crate::linalg::ComplexMatrix;
use crate::model::{h_total_r, hamiltonian, renormalized_frequency, ModelParams, Schedule};

/// Truncation ceiling for the automatic raise in coupling sweeps.
pub const MAX_G_SWEEP_N_FOCK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    RSweep,
    GSweep,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::RSweep => "r_sweep",
            SweepKind::GSweep => "g_sweep",
        }
    }

    pub fn variable(self) -> &'static str {
        match self {
            SweepKind::RSweep => "r",
            SweepKind::GSweep => "g",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowSource {
    Schedule(Schedule),
    Coupling { omega: f64, c: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    pub grid: Vec<f64>,
    pub tables: Vec<SpectrumTable>,
    pub sweep_kind: SweepKind,
    pub source: FlowSource,
}

impl FlowResult {
    pub fn regroup(&mut self, tol_rel: f64) {
        for t in &mut self.tables {
            t.regroup(tol_rel);
        }
    }

    pub fn levels(&self) -> usize {
        self.tables.first().map_or(0, |t| t.energies.len())
    }

    /// Energies of one level across the grid.
    pub fn level_curve(&self, level: usize) -> Vec<f64> {
        self.tables.iter().map(|t| t.energies[level]).collect()
    }
}

/// `points` evenly spaced values on `[start, stop]`, endpoints included.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    check_range(start, stop, points)?;
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

/// `points` logarithmically spaced values on `[start, stop]`, `start > 0`.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    check_range(start, stop, points)?;
    if start <= 0.0 {
        return Err(Error::invalid("logarithmic grid needs a positive start"));
    }
    let (a, b) = (start.ln(), stop.ln());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => start,
            i if i == points - 1 => stop,
            i => (a + step * i as f64).exp(),
        })
        .collect())
}

fn check_range(start: f64, stop: f64, points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::invalid("a grid needs at least two points"));
    }
    if !(start.is_finite() && stop.is_finite() && start < stop) {
        return Err(Error::invalid(format!(
            "grid range [{start}, {stop}] must be finite and increasing"
        )));
    }
    Ok(())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Lowest `k` levels of `H(r)` at each grid point.
pub fn spectral_flow_r(
    s: &Schedule,
    grid: &[f64],
    k: usize,
    fp: &FockParams,
) -> Result<FlowResult> {
    check_grid(grid)?;
    grid.iter().try_for_each(|&r| Schedule::check_r(r))?;
    let tables = grid
        .par_iter()
        .map(|&r| {
            let h = h_total_r(s, r, fp)?;
            Ok(SpectrumTable::new(
                lowest_k(&h, k)?,
                DEFAULT_DEGENERACY_TOL,
                fp.n_fock(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowResult {
        grid: grid.to_vec(),
        tables,
        sweep_kind: SweepKind::RSweep,
        source: FlowSource::Schedule(*s),
    })
}

/// `H(ω, ω, g, C) + g̃²/Ω(g)`, the coupling-sweep Hamiltonian.
pub fn coupling_hamiltonian(omega: f64, c: f64, g: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    let p = ModelParams::new(omega, omega, g, c)?;
    let (omega_g, g_tilde) = renormalized_frequency(omega, c, g);
    let mut h = hamiltonian(&p, fp)?;
    h += &ComplexMatrix::identity(fp.total_dim()).scale(g_tilde * g_tilde / omega_g);
    Ok(h)
}

/// Smallest power-of-two multiple of `fp.n_fock()` with `β² < N/4`, where
/// `β = g̃/Ω(g)` is the polaron displacement.
fn raised_fock(omega: f64, c: f64, g: f64, fp: &FockParams) -> Result<FockParams> {
    let (omega_g, g_tilde) = renormalized_frequency(omega, c, g);
    let beta = g_tilde / omega_g;
    let b2 = beta * beta;
    let mut n = fp.n_fock();
    while b2 >= n as f64 / 4.0 {
        n *= 2;
        if n > MAX_G_SWEEP_N_FOCK {
            return Err(Error::TruncationInsufficient {
                n_fock: MAX_G_SWEEP_N_FOCK,
                required: (4.0 * b2).floor() as usize + 1,
            });
        }
    }
    if n == fp.n_fock() {
        Ok(*fp)
    } else {
        log::info!("g = {g}: raising n_fock to {n} for displacement {beta:.3}");
        fp.rescaled(n)
    }
}

/// Lowest `k` levels of `H(ω, ω, g, C) + g̃²/Ω(g)` along a coupling grid.
pub fn spectral_flow_g(
    omega: f64,
    c: f64,
    g_grid: &[f64],
    k: usize,
    fp: &FockParams,
) -> Result<FlowResult> {
    check_grid(g_grid)?;
    if g_grid[0] < 0.0 {
        return Err(Error::invalid("coupling grid must be non-negative"));
    }
    let tables = g_grid
        .par_iter()
        .map(|&g| {
            let fpg = raised_fock(omega, c, g, fp)?;
            let h = coupling_hamiltonian(omega, c, g, &fpg)?;
            Ok(SpectrumTable::new(
                lowest_k(&h, k)?,
                DEFAULT_DEGENERACY_TOL,
                fpg.n_fock(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowResult {
        grid: g_grid.to_vec(),
        tables,
        sweep_kind: SweepKind::GSweep,
        source: FlowSource::Coupling { omega, c },
    })
}

/// `(g̃²/Ω(g), 1/(4C))`; the limit is `None` for `C = 0`.
pub fn asymptotic_self_energy(omega: f64, c: f64, g: f64) -> (f64, Option<f64>) {
    let (omega_g, g_tilde) = renormalized_frequency(omega, c, g);
    let limit = (c > 0.0).then(|| 1.0 / (4.0 * c));
    (g_tilde * g_tilde / omega_g, limit)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoGoReport {
    pub omega: f64,
    pub c: f64,
    pub g: f64,
    pub energies: Vec<f64>,
    /// `ω(n+½)` twice for `C = 0`; `Ω(g)(n+½) ± ω/2` for `C > 0`.
    pub reference: Vec<f64>,
    pub max_deviation: f64,
    /// `E₁ − E₀`
    pub ground_split: f64,
    pub self_energy: f64,
    pub self_energy_limit: Option<f64>,
    pub n_fock_used: usize,
}

impl NoGoReport {
    pub fn self_energy_rel_error(&self) -> Option<f64> {
        self.self_energy_limit
            .map(|l| (self.self_energy - l).abs() / l)
    }
}

/// Compares the strong-coupling spectrum with its analytic limit pattern.
pub fn no_go_asymptote_check(
    omega: f64,
    c: f64,
    g: f64,
    k: usize,
    fp: &FockParams,
) -> Result<NoGoReport> {
    if g < 3.0 * omega {
        return Err(Error::invalid(format!(
            "asymptote check needs g >= 3 omega, got g = {g}"
        )));
    }
    if k < 2 {
        return Err(Error::invalid("asymptote check needs at least two levels"));
    }
    let fpg = raised_fock(omega, c, g, fp)?;
    let energies = lowest_k(&coupling_hamiltonian(omega, c, g, &fpg)?, k)?;
    let omega_g = renormalized_frequency(omega, c, g).0;
    let mut reference: Vec<f64> = (0..k)
        .flat_map(|n| {
            let base = n as f64 + 0.5;
            if c == 0.0 {
                [omega * base, omega * base]
            } else {
                [omega_g * base - omega / 2.0, omega_g * base + omega / 2.0]
            }
        })
        .collect();
    reference.sort_by(f64::total_cmp);
    reference.truncate(k);
    let max_deviation = energies
        .iter()
        .zip(&reference)
        .map(|(e, r)| (e - r).abs())
        .fold(0.0, f64::max);
    let (self_energy, self_energy_limit) = asymptotic_self_energy(omega, c, g);
    Ok(NoGoReport {
        omega,
        c,
        g,
        ground_split: energies[1] - energies[0],
        energies,
        reference,
        max_deviation,
        self_energy,
        self_energy_limit,
        n_fock_used: fpg.n_fock(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const W: f64 = 6.2832;

    #[test]
    fn grids() {
        let g = linear_grid(0.0, 1.0, 51).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!((g[0], g[50]), (0.0, 1.0));
        assert_abs_diff_eq!(g[25], 0.5, epsilon = 1e-15);
        let l = log_grid(1.0, 100.0, 3).unwrap();
        assert_eq!(l[0], 1.0);
        assert_abs_diff_eq!(l[1], 10.0, epsilon = 1e-12);
        assert_eq!(l[2], 100.0);
        assert!(linear_grid(0.0, 1.0, 1).is_err());
        assert!(log_grid(0.0, 1.0, 3).is_err());
        assert!(linear_grid(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn r_flow_endpoints() {
        let fp = FockParams::new(64, 16).unwrap();
        let s = Schedule::new(W, W, 0.0).unwrap();
        let f = spectral_flow_r(&s, &[0.0, 0.5, 1.0], 5, &fp).unwrap();
        assert_eq!(f.tables.len(), 3);
        assert_eq!(f.tables[0].group_sizes(), [1, 2, 2]);
        assert_abs_diff_eq!(f.tables[0].energies[0], 0.0, epsilon = 1e-9);
        assert_eq!(f.tables[2].group_sizes(), [2, 2, 1]);
        assert!(spectral_flow_r(&s, &[0.0, 1.5], 5, &fp).is_err());
        assert!(spectral_flow_r(&s, &[0.5, 0.5], 5, &fp).is_err());
    }

    #[test]
    fn g_flow_free_start_and_auto_raise() {
        let fp = FockParams::new(32, 8).unwrap();
        let f = spectral_flow_g(W, 0.0, &[0.0, 4.0 * W], 4, &fp).unwrap();
        assert_eq!(f.sweep_kind, SweepKind::GSweep);
        assert_eq!(f.tables[0].group_sizes(), [1, 2, 1]);
        // β = 4, β² = 16 ≥ 32/4 → raised to 128
        assert_eq!(f.tables[1].n_fock_used, 128);
        assert!(matches!(
            spectral_flow_g(W, 0.0, &[30.0 * W], 4, &fp),
            Err(Error::TruncationInsufficient { required: 3601, .. })
        ));
    }

    #[test]
    fn self_energy_limit() {
        let (v, lim) = asymptotic_self_energy(W, 0.0377, 100.0);
        let lim = lim.unwrap();
        assert_abs_diff_eq!(lim, 6.6313, epsilon = 1e-4);
        assert!((v - lim).abs() / lim <= 0.01);
        assert_eq!(asymptotic_self_energy(W, 0.0, 1.0).1, None);
    }

    #[test]
    fn no_go_requires_strong_coupling() {
        let fp = FockParams::default();
        assert!(no_go_asymptote_check(W, 0.0, 2.0 * W, 6, &fp).is_err());
    }
}
