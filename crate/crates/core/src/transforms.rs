//! Displacement, squeeze and polaron unitaries, and the residual checks of
//! the unitary equivalences they implement.
//!
//! Every residual is measured on the interior of the truncated space: the
//! interior projector of the [`FockParams`], further restricted to the Fock
//! levels whose images under the unitary stay clear of the boundary band
//! (the top `buffer` levels). Squeezing spreads level `n` over roughly
//! `n·e^{2|ζ|}` levels, so for a squeeze the usable interior is much smaller
//! than `N − B`.

use crate::error::{Error, Result};
use crate::fock::{
    annihilation, embed_boson, embed_qubit, level_projector, pauli_x, sigma_minus, sigma_plus,
    FockParams,
};
use crate::linalg::{kron, projected_norm, unitary_exp, ComplexMatrix};
use crate::model::{fields, h_total_r, hamiltonian, ModelParams, Schedule};

/// Residual threshold for the A²-removing squeeze identity.
pub const A2_RESIDUAL_TOL: f64 = 1e-6;
/// Residual threshold for the polaron identity.
pub const POLARON_RESIDUAL_TOL: f64 = 1e-7;
/// Residual threshold for the light/heavy boson identity.
pub const HEAVY_RESIDUAL_TOL: f64 = 1e-8;

/// Largest admissible squeeze parameter.
pub const MAX_SQUEEZE: f64 = 2.0;

/// Column amplitude allowed inside the boundary band for a level to count as
/// resolved by the truncation.
pub const SUPPORT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum ParamsSnapshot {
    None,
    Model(ModelParams),
    Schedule { schedule: Schedule, r: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformReport {
    pub identity_name: String,
    /// `‖P(U† lhs U − rhs)P‖₂ / max(1, ‖rhs‖₂)`
    pub residual: f64,
    /// `‖U†U − I‖₂`
    pub unitarity_defect: f64,
    /// Highest Fock level inside the projector actually used.
    pub checked_max_level: usize,
    pub params_used: ParamsSnapshot,
    pub fock: FockParams,
}

impl TransformReport {
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.identity_name = name.into();
        self
    }

    pub fn with_params(mut self, params: ParamsSnapshot) -> Self {
        self.params_used = params;
        self
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.residual <= threshold
    }
}

/// `D(β) = exp[β(a† − a)]` on the boson factor.
pub fn displacement(beta: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    check_displacement(beta, fp)?;
    let a = annihilation(fp.n_fock());
    let gen = (&a.adjoint() - &a).scale(beta);
    unitary_exp(&gen)
}

fn check_displacement(beta: f64, fp: &FockParams) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::invalid("displacement amplitude must be finite"));
    }
    let n = fp.n_fock() as f64;
    let b2 = beta * beta;
    if b2 > n / 2.0 {
        return Err(Error::TruncationInsufficient {
            n_fock: fp.n_fock(),
            required: (4.0 * b2).ceil() as usize,
        });
    }
    if b2 > n / 4.0 {
        log::warn!(
            "displacement β = {beta} is large for n_fock = {}; the displaced vacuum nears the boundary",
            fp.n_fock()
        );
    }
    Ok(())
}

/// `S(ζ) = exp[(ζ/2)(a² − a†²)]` on the boson factor; `S(ζ)† x S(ζ) = e^{−ζ} x`.
pub fn squeeze(zeta: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    if !(zeta.is_finite() && zeta.abs() <= MAX_SQUEEZE) {
        return Err(Error::invalid(format!(
            "squeeze parameter {zeta} outside [-{MAX_SQUEEZE}, {MAX_SQUEEZE}]"
        )));
    }
    let a = annihilation(fp.n_fock());
    let a2 = a.matmul(&a);
    let gen = (&a2 - &a2.adjoint()).scale(0.5 * zeta);
    unitary_exp(&gen)
}

/// The A²-removing unitary with its build-time verification.
#[derive(Clone, Debug)]
pub struct SqueezeTransform {
    /// `I₂ ⊗ S(ζ)` on the composite space.
    pub unitary: ComplexMatrix,
    pub zeta: f64,
    pub report: TransformReport,
}

/// `U_{A²}` with `U† H(Ωa, Ωb, G, C) U = H(Ωa, Ω(G), G̃, 0)`.
///
/// Realized as `S(ζ)` with `|ζ| = ½ ln(Ω(G)/Ωb)`; the sign is chosen by the
/// smaller residual and the identity is verified before returning.
pub fn u_a2(p: &ModelParams, fp: &FockParams) -> Result<SqueezeTransform> {
    p.validate()?;
    let omega_g = p.renormalized_omega();
    let target = ModelParams {
        omega_a: p.omega_a,
        omega_b: omega_g,
        g: p.renormalized_coupling(),
        c: 0.0,
    };
    let lhs = hamiltonian(p, fp)?;
    let rhs = hamiltonian(&target, fp)?;
    let magnitude = 0.5 * (omega_g / p.omega_b).ln();

    let candidates: &[f64] = if magnitude == 0.0 {
        &[0.0]
    } else {
        &[magnitude, -magnitude]
    };
    let mut best: Option<SqueezeTransform> = None;
    for &zeta in candidates {
        let unitary = embed_boson(&squeeze(zeta, fp)?, fp)?;
        let report = verify_equivalence(&unitary, &lhs, &rhs, fp)?
            .named("A2 squeeze")
            .with_params(ParamsSnapshot::Model(*p));
        if best
            .as_ref()
            .is_none_or(|b| report.residual < b.report.residual)
        {
            best = Some(SqueezeTransform {
                unitary,
                zeta,
                report,
            });
        }
    }
    let best = best.expect("at least one candidate");
    if best.report.residual > A2_RESIDUAL_TOL {
        return Err(Error::TransformMismatch {
            identity: best.report.identity_name.clone(),
            residual: best.report.residual,
            threshold: A2_RESIDUAL_TOL,
        });
    }
    Ok(best)
}

/// `U(β) = (1/√2){(σ₋ − 1)σ₊ D(β) + (σ₊ + 1)σ₋ D(−β)}` on the composite space.
pub fn u_polaron(beta: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    let sp = sigma_plus();
    let sm = sigma_minus();
    let id = ComplexMatrix::identity(2);
    let up_block = (&sm - &id).matmul(&sp);
    let down_block = (&sp + &id).matmul(&sm);
    let mut u = kron(&up_block, &displacement(beta, fp)?)?;
    u += &kron(&down_block, &displacement(-beta, fp)?)?;
    Ok(u.scale(std::f64::consts::FRAC_1_SQRT_2))
}

/// Highest Fock level `L ≤ N − 1 − B` such that every column of `u` for
/// levels `0..=L` (both spins) has amplitude at most [`SUPPORT_TOL`] in the
/// boundary band. Returns `None` if even level 0 leaks.
pub fn supported_max_level(u: &ComplexMatrix, fp: &FockParams) -> Option<usize> {
    let n = fp.n_fock();
    let band_start = n - fp.buffer().max(1);
    let leak = |col: usize| -> f64 {
        (0..2)
            .flat_map(|s| (band_start..n).map(move |k| s * n + k))
            .map(|row| u[(row, col)].norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let mut last = None;
    for level in 0..=fp.interior_max_level() {
        if leak(level) > SUPPORT_TOL || leak(n + level) > SUPPORT_TOL {
            break;
        }
        last = Some(level);
    }
    last
}

/// Checks `U† · lhs · U = rhs` on the support-limited interior.
pub fn verify_equivalence(
    u: &ComplexMatrix,
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    fp: &FockParams,
) -> Result<TransformReport> {
    let dim = fp.total_dim();
    for m in [u, lhs, rhs] {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
    }
    let unitarity_defect =
        (&u.adjoint().matmul(u) - &ComplexMatrix::identity(dim)).spectral_norm()?;
    let Some(top) = supported_max_level(u, fp) else {
        return Err(Error::TruncationInsufficient {
            n_fock: fp.n_fock(),
            required: 2 * fp.n_fock(),
        });
    };
    let p = level_projector(fp.n_fock(), top);
    let diff = &u.conjugate(lhs) - rhs;
    let residual = projected_norm(&diff, &p)? / rhs.spectral_norm()?.max(1.0);
    Ok(TransformReport {
        identity_name: "custom".into(),
        residual,
        unitarity_defect,
        checked_max_level: top,
        params_used: ParamsSnapshot::None,
        fock: *fp,
    })
}

/// Polaron identity for the Rabi Hamiltonian without A² term:
///
/// ```text
/// U(β)† {H(Ωa, Ωb, G, 0) + G²/Ωb} U(β) = H(0, Ωb, 0, 0) − (Ωa/2){σ₊D(β)² + σ₋D(−β)²},  β = G/Ωb
/// ```
pub fn polaron_identity(p: &ModelParams, fp: &FockParams) -> Result<TransformReport> {
    p.validate()?;
    let beta = p.g / p.omega_b;
    let u = u_polaron(beta, fp)?;
    let rabi = ModelParams { c: 0.0, ..*p };
    let mut lhs = hamiltonian(&rabi, fp)?;
    lhs += &ComplexMatrix::identity(fp.total_dim()).scale(p.g * p.g / p.omega_b);

    let free = ModelParams {
        omega_a: 0.0,
        omega_b: p.omega_b,
        g: 0.0,
        c: 0.0,
    };
    let d_plus = displacement(beta, fp)?;
    let d_minus = displacement(-beta, fp)?;
    let mut flip = kron(&sigma_plus(), &d_plus.matmul(&d_plus))?;
    flip += &kron(&sigma_minus(), &d_minus.matmul(&d_minus))?;
    let rhs = &hamiltonian(&free, fp)? - &flip.scale(0.5 * p.omega_a);

    Ok(verify_equivalence(&u, &lhs, &rhs, fp)?
        .named("polaron")
        .with_params(ParamsSnapshot::Model(rabi)))
}

/// Polaron identity applied after the squeeze: checks it at the renormalized
/// Rabi parameters `(Ωa, Ω(G), G̃)`.
pub fn renormalized_polaron_identity(p: &ModelParams, fp: &FockParams) -> Result<TransformReport> {
    let renormalized = ModelParams {
        omega_a: p.omega_a,
        omega_b: p.renormalized_omega(),
        g: p.renormalized_coupling(),
        c: 0.0,
    };
    polaron_identity(&renormalized, fp)
}

/// `ω_g(r)(B_r†B_r + ½) − (ωa(r)/2)(𝒟₋ + 𝒟₊) = H(r)`.
pub fn heavy_boson_identity(s: &Schedule, r: f64, fp: &FockParams) -> Result<TransformReport> {
    let f = fields(s, r, fp)?;
    let lhs = f.heavy_form(s.omega_a(r));
    let rhs = h_total_r(s, r, fp)?;
    let id = ComplexMatrix::identity(fp.total_dim());
    Ok(verify_equivalence(&id, &lhs, &rhs, fp)?
        .named("light/heavy boson")
        .with_params(ParamsSnapshot::Schedule { schedule: *s, r }))
}

/// `U† σx U` for the polaron unitary.
pub fn polaron_frame_swap(beta: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    let u = u_polaron(beta, fp)?;
    Ok(u.conjugate(&embed_qubit(&pauli_x(), fp)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{boson_interior_projector, interior_projector, number};
    use crate::linalg::{commutator, hermitian_eigvals};
    use approx::assert_abs_diff_eq;

    const W: f64 = 6.2832;

    fn fp(n: usize, b: usize) -> FockParams {
        FockParams::new(n, b).unwrap()
    }

    fn unitarity(u: &ComplexMatrix) -> f64 {
        (&u.adjoint().matmul(u) - &ComplexMatrix::identity(u.dim())).max_abs()
    }

    #[test]
    fn displacement_basics() {
        let f = fp(128, 32);
        assert!(
            (&displacement(0.0, &f).unwrap() - &ComplexMatrix::identity(128)).max_abs() < 1e-14
        );
        let d = displacement(1.0, &f).unwrap();
        assert!(unitarity(&d) <= 1e-10);
        assert_abs_diff_eq!(d[(0, 0)].re, (-0.5f64).exp(), epsilon = 1e-8);
        assert_abs_diff_eq!(d[(0, 0)].im, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn displacement_shifts_annihilation() {
        let f = fp(128, 32);
        let beta = 1.3;
        let d = displacement(beta, &f).unwrap();
        let a = annihilation(128);
        let shifted = &d.conjugate(&a) - &(&a + &ComplexMatrix::identity(128).scale(beta));
        // restrict to levels whose displaced images stay far from the edge
        let p = boson_interior_projector(&fp(128, 64));
        assert!(projected_norm(&shifted, &p).unwrap() <= 1e-8);
    }

    #[test]
    fn displacement_amplitude_limits() {
        let f = fp(16, 4);
        assert!(displacement(2.5, &f).is_ok()); // β² = 6.25 > N/4: warning only
        assert!(matches!(
            displacement(3.0, &f),
            Err(Error::TruncationInsufficient { required: 36, .. })
        ));
    }

    #[test]
    fn displacement_group_law() {
        let f = fp(128, 64);
        let lhs = displacement(0.4, &f)
            .unwrap()
            .matmul(&displacement(0.7, &f).unwrap());
        let rhs = displacement(1.1, &f).unwrap();
        let p = boson_interior_projector(&f);
        assert!(projected_norm(&(&lhs - &rhs), &p).unwrap() <= 1e-8);
    }

    #[test]
    fn squeeze_basics() {
        let f = fp(256, 64);
        assert!((&squeeze(0.0, &f).unwrap() - &ComplexMatrix::identity(256)).max_abs() < 1e-14);
        let s = squeeze(0.3, &f).unwrap();
        assert!(unitarity(&s) <= 1e-10);
        let inv = s.matmul(&squeeze(-0.3, &f).unwrap());
        assert!((&inv - &ComplexMatrix::identity(256)).max_abs() <= 1e-9);
        let a = annihilation(256);
        let x = &a + &a.adjoint();
        let d = &s.conjugate(&x) - &x.scale((-0.3f64).exp());
        // levels whose squeezed images stay clear of the top
        let top = supported_max_level(&embed_boson(&s, &f).unwrap(), &f).unwrap();
        assert!(top >= 40, "support too small: {top}");
        let p = crate::fock::level_projector(256, top).truncate(256);
        assert!(projected_norm(&d, &p).unwrap() <= 1e-7);
        assert!(squeeze(2.5, &f).is_err());
    }

    #[test]
    fn a2_squeeze_trivial_when_c_zero() {
        let f = fp(32, 8);
        let t = u_a2(&ModelParams::new(W, W, W, 0.0).unwrap(), &f).unwrap();
        assert_eq!(t.zeta, 0.0);
        assert!((&t.unitary - &ComplexMatrix::identity(64)).max_abs() < 1e-14);
    }

    #[test]
    fn a2_squeeze_removes_quadratic_term() {
        let f = fp(256, 64);
        let p = ModelParams::new(W, W, W, 0.2513).unwrap();
        let t = u_a2(&p, &f).unwrap();
        assert_abs_diff_eq!(t.zeta, 0.5 * (16.995f64 / W).ln(), epsilon = 1e-4);
        assert_abs_diff_eq!(t.zeta, 0.4975, epsilon = 1e-4);
        assert!(t.report.residual <= A2_RESIDUAL_TOL);
        assert!(t.report.unitarity_defect <= 1e-10);
    }

    #[test]
    fn wrong_rhs_is_detected() {
        let f = fp(128, 32);
        let p = ModelParams::new(W, W, W, 0.2513).unwrap();
        let t = u_a2(&p, &f).unwrap();
        let lhs = hamiltonian(&p, &f).unwrap();
        // bare ω where the renormalized ω_g belongs
        let wrong = hamiltonian(
            &ModelParams::new(W, W, p.renormalized_coupling(), 0.0).unwrap(),
            &f,
        )
        .unwrap();
        let r = verify_equivalence(&t.unitary, &lhs, &wrong, &f).unwrap();
        assert!(r.residual >= 0.1, "{r:?}");
    }

    #[test]
    fn identity_transform_zero_residual() {
        let f = fp(16, 4);
        let h = hamiltonian(&ModelParams::new(W, W, 1.0, 0.1).unwrap(), &f).unwrap();
        let r = verify_equivalence(&ComplexMatrix::identity(32), &h, &h, &f).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.checked_max_level, f.interior_max_level());
    }

    #[test]
    fn polaron_at_zero_is_spin_rotation() {
        let f = fp(16, 4);
        let u = u_polaron(0.0, &f).unwrap();
        assert!(unitarity(&u) <= 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let n = 16;
        // (1/√2)[[1, −1], [1, 1]] ⊗ I
        assert_abs_diff_eq!(u[(0, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(0, n)].re, -s, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(n, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(n, n)].re, s, epsilon = 1e-15);
    }

    #[test]
    fn polaron_identity_holds() {
        let f = fp(256, 64);
        let p = ModelParams::new(W, W, 3.0, 0.0).unwrap();
        let r = polaron_identity(&p, &f).unwrap();
        assert!(r.residual <= POLARON_RESIDUAL_TOL, "{r:?}");
        assert!(r.unitarity_defect <= 1e-9);
    }

    #[test]
    fn polaron_frame_decouples_swap() {
        let f = fp(128, 32);
        let swap = polaron_frame_swap(0.8, &f).unwrap();
        let b = embed_boson(&annihilation(128), &f).unwrap();
        let p = interior_projector(&fp(128, 64));
        assert!(projected_norm(&commutator(&swap, &b), &p).unwrap() <= 1e-8);
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let f = fp(64, 16);
        let h = hamiltonian(&ModelParams::new(W, W, 2.0, 0.0).unwrap(), &f).unwrap();
        let u = u_polaron(0.5, &f).unwrap();
        let a = hermitian_eigvals(&h).unwrap();
        let b = hermitian_eigvals(&u.conjugate(&h)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn heavy_identity_on_schedule() {
        let f = fp(64, 8);
        let s = Schedule::new(W, W, 0.628).unwrap();
        for r in [0.0, 0.5, 1.0] {
            let rep = heavy_boson_identity(&s, r, &f).unwrap();
            assert!(rep.residual <= HEAVY_RESIDUAL_TOL, "{rep:?}");
        }
    }

    #[test]
    fn number_operator_conjugation_by_identity() {
        let f = fp(8, 2);
        let nb = embed_boson(&number(8), &f).unwrap();
        let r = verify_equivalence(&ComplexMatrix::identity(16), &nb, &nb, &f).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(verify_equivalence(&ComplexMatrix::identity(4), &nb, &nb, &f).is_err());
    }
}
