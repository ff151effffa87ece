use super::{degeneracy_groups, lowest_k, DEFAULT_DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::fock::{basis_state, embed_qubit, interior_projector, pauli_x, FockParams, Spin};
use crate::linalg::{
    anticommutator, commutator, hermitian_eigs, projected_norm, ComplexMatrix, C64,
};
use crate::model::{
    broken_supercharges, h_total_r, hamiltonian, heavy_hamiltonian, ChargeVariant, ModelParams,
    Schedule, SuperchargeSet,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraThresholds {
    /// Bound on every relative algebra residual.
    pub algebra: f64,
    /// Bound on `‖q± v‖` for unbroken vacua.
    pub vacuum: f64,
    /// Allowed deviation of `‖Q± v‖` from `√(Ω/2)` for broken vacua.
    pub broken_vacuum: f64,
}

impl Default for AlgebraThresholds {
    fn default() -> Self {
        Self {
            algebra: 1e-10,
            vacuum: 1e-8,
            broken_vacuum: 1e-6,
        }
    }
}

/// Residuals of the supersymmetry algebra, each relative to `max(1, ‖H‖₂)`
/// and measured on the interior.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraReport {
    pub variant: ChargeVariant,
    /// `{q1,q1} − H`, `{q2,q2} − H`, `{q1,q2}`
    pub anticommutator: [f64; 3],
    /// `[q1,H]`, `[q2,H]`
    pub commutator_with_h: [f64; 2],
    /// `{q1,N_F}`, `{q2,N_F}`
    pub anticommutator_with_grading: [f64; 2],
    /// `{q+,q+}`, `{q−,q−}`
    pub nilpotency: [f64; 2],
    /// `√(‖q+ v‖² + ‖q− v‖²)` for each graded ground state `v`.
    pub vacuum_annihilation: Vec<f64>,
    pub ground_energy: f64,
    /// `max(1, ‖H‖₂)`, to recover absolute residuals.
    pub h_scale: f64,
    pub thresholds: AlgebraThresholds,
    pub pass: bool,
}

impl AlgebraReport {
    pub fn algebra_residuals(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        const NAMES: [&str; 9] = [
            "anticommutator_11",
            "anticommutator_22",
            "anticommutator_12",
            "commutator_h_1",
            "commutator_h_2",
            "grading_1",
            "grading_2",
            "nilpotency_plus",
            "nilpotency_minus",
        ];
        let values = self
            .anticommutator
            .iter()
            .chain(&self.commutator_with_h)
            .chain(&self.anticommutator_with_grading)
            .chain(&self.nilpotency)
            .copied();
        NAMES.into_iter().zip(values)
    }

    pub fn max_algebra_residual(&self) -> f64 {
        self.algebra_residuals().map(|(_, v)| v).fold(0.0, f64::max)
    }

    /// Expected vacuum value: 0 for unbroken charges, `√(Ω/2)` for broken.
    pub fn expected_vacuum_norm(&self, omega: f64) -> f64 {
        match self.variant {
            ChargeVariant::Free => 0.0,
            ChargeVariant::Broken => (omega / 2.0).sqrt(),
        }
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Ground states of `h` diagonalized against the grading.
fn graded_vacua(h: &ComplexMatrix, grading: &ComplexMatrix) -> Result<(f64, Vec<Vec<C64>>)> {
    let eig = hermitian_eigs(h)?;
    let m = degeneracy_groups(&eig.values, DEFAULT_DEGENERACY_TOL)[0].size;
    let basis: Vec<Vec<C64>> = (0..m).map(|i| eig.vector(i)).collect();
    let graded: Vec<Vec<C64>> = basis.iter().map(|v| grading.apply(v)).collect();
    let block = ComplexMatrix::from_fn(m, |i, j| {
        basis[i]
            .iter()
            .zip(&graded[j])
            .map(|(a, b)| a.conj() * b)
            .sum()
    });
    let local = hermitian_eigs(&block)?;
    let vacua = (0..m)
        .map(|j| {
            let u = local.vector(j);
            let mut v = vec![C64::new(0.0, 0.0); h.dim()];
            for (coef, b) in u.iter().zip(&basis) {
                for (x, y) in v.iter_mut().zip(b) {
                    *x += coef * y;
                }
            }
            v
        })
        .collect();
    Ok((eig.values[0], vacua))
}

pub fn susy_algebra_report(
    h: &ComplexMatrix,
    charges: &SuperchargeSet,
    fp: &FockParams,
) -> Result<AlgebraReport> {
    susy_algebra_report_with(h, charges, fp, AlgebraThresholds::default())
}

pub fn susy_algebra_report_with(
    h: &ComplexMatrix,
    charges: &SuperchargeSet,
    fp: &FockParams,
    thresholds: AlgebraThresholds,
) -> Result<AlgebraReport> {
    let dim = fp.total_dim();
    for m in [h, &charges.q1, &charges.q2, &charges.grading] {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
    }
    let p = interior_projector(fp);
    let h_scale = h.spectral_norm()?.max(1.0);
    let rel = |m: ComplexMatrix| -> Result<f64> { Ok(projected_norm(&m, &p)? / h_scale) };
    let (q1, q2, nf) = (&charges.q1, &charges.q2, &charges.grading);

    let anticommutators = [
        rel(&anticommutator(q1, q1) - h)?,
        rel(&anticommutator(q2, q2) - h)?,
        rel(anticommutator(q1, q2))?,
    ];
    let commutator_with_h = [rel(commutator(q1, h))?, rel(commutator(q2, h))?];
    let anticommutator_with_grading = [rel(anticommutator(q1, nf))?, rel(anticommutator(q2, nf))?];
    let nilpotency = [
        rel(anticommutator(&charges.q_plus, &charges.q_plus))?,
        rel(anticommutator(&charges.q_minus, &charges.q_minus))?,
    ];

    let (ground_energy, vacua) = graded_vacua(h, nf)?;
    let vacuum_annihilation: Vec<f64> = vacua
        .iter()
        .map(|v| norm(&charges.q_plus.apply(v)).hypot(norm(&charges.q_minus.apply(v))))
        .collect();

    let mut report = AlgebraReport {
        variant: charges.variant,
        anticommutator: anticommutators,
        commutator_with_h,
        anticommutator_with_grading,
        nilpotency,
        vacuum_annihilation,
        ground_energy,
        h_scale,
        thresholds,
        pass: false,
    };
    let algebra_ok = report.max_algebra_residual() <= thresholds.algebra;
    let expected = report.expected_vacuum_norm(charges.omega);
    let vacua_ok = report
        .vacuum_annihilation
        .iter()
        .all(|&x| match charges.variant {
            ChargeVariant::Free => x <= thresholds.vacuum,
            ChargeVariant::Broken => (x - expected).abs() <= thresholds.broken_vacuum,
        });
    report.pass = algebra_ok && vacua_ok;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldstinoReport {
    pub omega: f64,
    /// `‖H Q⁺|↓,0⟩ − (ω/2) Q⁺|↓,0⟩‖`
    pub plus_residual: f64,
    /// `‖H Q⁻|↑,0⟩ − (ω/2) Q⁻|↑,0⟩‖`
    pub minus_residual: f64,
    /// `‖Q⁺|↓,0⟩ − √(ω/2)|↑,0⟩‖`
    pub plus_ladder_residual: f64,
    /// `‖Q⁻|↑,0⟩ − √(ω/2)|↓,0⟩‖`
    pub minus_ladder_residual: f64,
    /// `‖σx Q⁺|↓,0⟩ − Q⁻|↑,0⟩‖`
    pub partner_residual: f64,
    pub plus_norm: f64,
    pub minus_norm: f64,
    /// Energy of the excited state minus the vacuum energy.
    pub energy_increment: f64,
}

impl GoldstinoReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.plus_residual,
            self.minus_residual,
            self.plus_ladder_residual,
            self.minus_ladder_residual,
            self.partner_residual,
            self.energy_increment.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

fn expectation(h: &ComplexMatrix, v: &[C64]) -> f64 {
    let hv = h.apply(v);
    let num: f64 = v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum();
    num / v.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

fn eigen_residual(h: &ComplexMatrix, v: &[C64], e: f64) -> f64 {
    let hv = h.apply(v);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - b * e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn distance(a: &[C64], b: &[C64], scale: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * scale).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigen-relation of the broken charges acting on the two vacua of
/// `H(0, ω, 0, 0)`.
pub fn goldstino_check(omega: f64, fp: &FockParams) -> Result<GoldstinoReport> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega must be positive"));
    }
    let h = hamiltonian(&ModelParams::new(0.0, omega, 0.0, 0.0)?, fp)?;
    let q = broken_supercharges(omega, fp)?;
    let down = basis_state(Spin::Down, 0, fp);
    let up = basis_state(Spin::Up, 0, fp);
    let w = q.q_plus.apply(&down);
    let u = q.q_minus.apply(&up);
    let half = omega / 2.0;
    let amp = half.sqrt();
    let sx = embed_qubit(&pauli_x(), fp)?;
    Ok(GoldstinoReport {
        omega,
        plus_residual: eigen_residual(&h, &w, half),
        minus_residual: eigen_residual(&h, &u, half),
        plus_ladder_residual: distance(&w, &up, amp),
        minus_ladder_residual: distance(&u, &down, amp),
        partner_residual: distance(&sx.apply(&w), &u, 1.0),
        plus_norm: norm(&w),
        minus_norm: norm(&u),
        energy_increment: expectation(&h, &w) - expectation(&h, &down),
    })
}

/// Levels compared by [`limit_check`].
pub const LIMIT_LEVELS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub omega_g: f64,
    pub energies_r0: Vec<f64>,
    pub energies_r1: Vec<f64>,
    /// Lowest levels of the heavy-boson Hamiltonian, `ω_g(n+½)` twice.
    pub target: Vec<f64>,
    pub max_deviation: f64,
    pub ground_energy: f64,
    pub group_sizes_r0: Vec<usize>,
    pub group_sizes_r1: Vec<usize>,
    /// Singlet ground followed by doublets at `r = 0`.
    pub susy_pattern_r0: bool,
    /// Doublets only at `r = 1`.
    pub paired_r1: bool,
    pub max_pair_splitting: f64,
}

/// Group sizes with a trailing group cut by the level count removed.
fn complete_sizes(sizes: &[usize], full: usize) -> &[usize] {
    match sizes.split_last() {
        Some((&last, rest)) if last < full && !rest.is_empty() => rest,
        _ => sizes,
    }
}

/// Compares `H(r = 1)` with the heavy-boson ladder and checks the change of
/// degeneracy pattern between the endpoints.
pub fn limit_check(s: &Schedule, fp: &FockParams) -> Result<LimitReport> {
    let k = LIMIT_LEVELS;
    let energies_r0 = lowest_k(&h_total_r(s, 0.0, fp)?, k)?;
    let energies_r1 = lowest_k(&h_total_r(s, 1.0, fp)?, k)?;
    let target = lowest_k(&heavy_hamiltonian(s, fp)?, k)?;
    let sizes = |e: &[f64]| -> Vec<usize> {
        degeneracy_groups(e, DEFAULT_DEGENERACY_TOL)
            .iter()
            .map(|g| g.size)
            .collect()
    };
    let group_sizes_r0 = sizes(&energies_r0);
    let group_sizes_r1 = sizes(&energies_r1);
    let susy_pattern_r0 = match group_sizes_r0.split_first() {
        Some((1, rest)) => complete_sizes(rest, 2).iter().all(|&n| n == 2),
        _ => false,
    };
    let paired_r1 = complete_sizes(&group_sizes_r1, 2).iter().all(|&n| n == 2);
    let max_deviation = energies_r1
        .iter()
        .zip(&target)
        .map(|(e, t)| (e - t).abs())
        .fold(0.0, f64::max);
    let max_pair_splitting = energies_r1
        .chunks_exact(2)
        .map(|p| p[1] - p[0])
        .fold(0.0, f64::max);
    Ok(LimitReport {
        omega_g: s.omega_g(1.0),
        ground_energy: energies_r1[0],
        energies_r0,
        energies_r1,
        target,
        max_deviation,
        group_sizes_r0,
        group_sizes_r1,
        susy_pattern_r0,
        paired_r1,
        max_pair_splitting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::free_supercharges;
    use approx::assert_abs_diff_eq;

    const W: f64 = 6.2832;

    fn fp() -> FockParams {
        FockParams::new(64, 16).unwrap()
    }

    #[test]
    fn free_algebra_passes() {
        let f = fp();
        let h = hamiltonian(&ModelParams::new(W, W, 0.0, 0.0).unwrap(), &f).unwrap();
        let rep = susy_algebra_report(&h, &free_supercharges(W, &f).unwrap(), &f).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.vacuum_annihilation.len(), 1);
        assert!(rep.vacuum_annihilation[0] <= 1e-8);
    }

    #[test]
    fn broken_algebra_passes_with_nonzero_vacua() {
        let f = fp();
        let h = hamiltonian(&ModelParams::new(0.0, W, 0.0, 0.0).unwrap(), &f).unwrap();
        let rep = susy_algebra_report(&h, &broken_supercharges(W, &f).unwrap(), &f).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.vacuum_annihilation.len(), 2);
        for v in &rep.vacuum_annihilation {
            assert_abs_diff_eq!(*v, (W / 2.0).sqrt(), epsilon = 1e-6);
        }
        assert_abs_diff_eq!(rep.ground_energy, W / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn mismatched_hamiltonian_fails() {
        let f = fp();
        let wrong = hamiltonian(&ModelParams::new(0.0, W, 0.0, 0.0).unwrap(), &f).unwrap();
        let rep = susy_algebra_report(&wrong, &free_supercharges(W, &f).unwrap(), &f).unwrap();
        assert!(!rep.pass);
        // {q1,q1} − H(0,ω,0,0) = (ω/2)σz
        assert!(rep.anticommutator[0] * rep.h_scale >= 0.4);
    }

    #[test]
    fn goldstino_relations() {
        let rep = goldstino_check(W, &fp()).unwrap();
        assert!(rep.passes(1e-10), "{rep:?}");
        assert_abs_diff_eq!(rep.plus_norm, (W / 2.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(rep.minus_norm, (W / 2.0).sqrt(), epsilon = 1e-12);
        assert!(goldstino_check(0.0, &fp()).is_err());
    }

    #[test]
    fn sizes_trailing() {
        assert_eq!(complete_sizes(&[2, 2, 1], 2), &[2, 2]);
        assert_eq!(complete_sizes(&[2, 2], 2), &[2, 2]);
        assert_eq!(complete_sizes(&[1], 2), &[1]);
    }

    #[test]
    fn limit_without_a2() {
        let s = Schedule::new(W, W, 0.0).unwrap();
        let rep = limit_check(&s, &FockParams::new(128, 32).unwrap()).unwrap();
        assert!(rep.susy_pattern_r0 && rep.paired_r1, "{rep:?}");
        assert!(rep.max_pair_splitting <= 1e-3);
        assert_abs_diff_eq!(rep.energies_r1[2] - rep.energies_r1[0], W, epsilon = 1e-6);
    }
}
