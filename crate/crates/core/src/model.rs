//! Hamiltonians, supercharges and field operators of the qubit ⊗ boson model.
//!
//! Units: ħ = 1, so every energy is a frequency. The total Hamiltonian is
//!
//! ```text
//! H(Ωa, Ωb, G, C) = (Ωa/2) σz + Ωb (a†a + 1/2) + G σx (a + a†) + C G² (a + a†)²
//! ```
//!
//! and the interpolating family `H(r)` runs from the free supersymmetric
//! Hamiltonian at `r = 0` to the heavy-boson Hamiltonian at `r = 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{
    embed_boson, embed_qubit, make_operators, padded_product, pauli_x, pauli_y, pauli_z,
    position_squared, sigma_minus, sigma_plus, FockParams,
};
use crate::linalg::{kron, ComplexMatrix, C64};

/// Parameters `(Ωa, Ωb, G, C)` of the total Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub c: f64,
}

impl ModelParams {
    pub fn new(omega_a: f64, omega_b: f64, g: f64, c: f64) -> Result<Self> {
        let p = Self {
            omega_a,
            omega_b,
            g,
            c,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.omega_a, self.omega_b, self.g, self.c];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("model parameters must be finite"));
        }
        if self.omega_b <= 0.0 {
            return Err(Error::invalid("omega_b must be positive"));
        }
        if self.omega_a < 0.0 || self.g < 0.0 || self.c < 0.0 {
            return Err(Error::invalid("omega_a, g and c must be non-negative"));
        }
        Ok(())
    }

    /// `Ω(G) = √(Ωb² + 4 C Ωb G²)`
    pub fn renormalized_omega(&self) -> f64 {
        renormalized_frequency(self.omega_b, self.c, self.g).0
    }

    /// `G̃ = G √(Ωb / Ω(G))`
    pub fn renormalized_coupling(&self) -> f64 {
        renormalized_frequency(self.omega_b, self.c, self.g).1
    }
}

/// Named form of the atom-frequency schedule `ωa(r)`, with `ωa(0) = ω`, `ωa(1) = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AtomSchedule {
    /// `(1 − r) ω`
    #[default]
    Linear,
    /// `ω (1 + cos πr) / 2`
    Cosine,
}

/// Named form of the coupling schedule `g(r)`, with `g(0) = 0`, `g(1) = g_max`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingSchedule {
    /// `r · g_max`
    #[default]
    Linear,
    /// `g_max (1 − cos πr) / 2`
    Cosine,
}

macro_rules! schedule_names {
    ($ty:ident) => {
        impl $ty {
            pub fn name(&self) -> &'static str {
                match self {
                    $ty::Linear => "linear",
                    $ty::Cosine => "cosine",
                }
            }
        }

        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    "linear" => Ok($ty::Linear),
                    "cosine" => Ok($ty::Cosine),
                    other => Err(Error::invalid(format!(
                        "unknown schedule `{other}` (expected `linear` or `cosine`)"
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

schedule_names!(AtomSchedule);
schedule_names!(CouplingSchedule);

fn ramp_up(linear: bool, r: f64) -> f64 {
    if linear {
        r
    } else {
        0.5 * (1.0 - (std::f64::consts::PI * r).cos())
    }
}

fn ramp_up_slope(linear: bool, r: f64) -> f64 {
    if linear {
        1.0
    } else {
        0.5 * std::f64::consts::PI * (std::f64::consts::PI * r).sin()
    }
}

/// The `r`-parameterized path from the free supersymmetric Hamiltonian to the
/// heavy-boson one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub omega: f64,
    pub g_max: f64,
    pub c: f64,
    pub omega_a_form: AtomSchedule,
    pub g_form: CouplingSchedule,
}

impl Schedule {
    /// Linear schedules `ωa(r) = (1 − r) ω`, `g(r) = r g_max`.
    pub fn new(omega: f64, g_max: f64, c: f64) -> Result<Self> {
        Self::with_forms(
            omega,
            g_max,
            c,
            AtomSchedule::Linear,
            CouplingSchedule::Linear,
        )
    }

    pub fn with_forms(
        omega: f64,
        g_max: f64,
        c: f64,
        omega_a_form: AtomSchedule,
        g_form: CouplingSchedule,
    ) -> Result<Self> {
        if !(omega.is_finite() && g_max.is_finite() && c.is_finite()) {
            return Err(Error::invalid("schedule parameters must be finite"));
        }
        if omega <= 0.0 {
            return Err(Error::invalid("omega must be positive"));
        }
        if g_max < 0.0 || c < 0.0 {
            return Err(Error::invalid("g_max and c must be non-negative"));
        }
        Ok(Self {
            omega,
            g_max,
            c,
            omega_a_form,
            g_form,
        })
    }

    pub fn check_r(r: f64) -> Result<()> {
        if (0.0..=1.0).contains(&r) {
            Ok(())
        } else {
            Err(Error::invalid(format!("r = {r} outside [0, 1]")))
        }
    }

    pub fn omega_a(&self, r: f64) -> f64 {
        let linear = self.omega_a_form == AtomSchedule::Linear;
        self.omega * (1.0 - ramp_up(linear, r))
    }

    pub fn g(&self, r: f64) -> f64 {
        let linear = self.g_form == CouplingSchedule::Linear;
        self.g_max * ramp_up(linear, r)
    }

    pub fn omega_a_slope(&self, r: f64) -> f64 {
        let linear = self.omega_a_form == AtomSchedule::Linear;
        -self.omega * ramp_up_slope(linear, r)
    }

    pub fn g_slope(&self, r: f64) -> f64 {
        let linear = self.g_form == CouplingSchedule::Linear;
        self.g_max * ramp_up_slope(linear, r)
    }

    /// `ω_g(r) = √(ω² + 4 C ω g(r)²)`
    pub fn omega_g(&self, r: f64) -> f64 {
        renormalized_frequency(self.omega, self.c, self.g(r)).0
    }

    /// `g̃(r) = g(r) √(ω / ω_g(r))`
    pub fn g_tilde(&self, r: f64) -> f64 {
        renormalized_frequency(self.omega, self.c, self.g(r)).1
    }

    /// Self-energy constant `g(r)² / (4 C g(r)² + ω)`, equal to `g̃(r)² / ω_g(r)`.
    pub fn self_energy(&self, r: f64) -> f64 {
        let g = self.g(r);
        g * g / (4.0 * self.c * g * g + self.omega)
    }

    /// `(ωa(r), ω, g(r), C)`
    pub fn params_at(&self, r: f64) -> ModelParams {
        ModelParams {
            omega_a: self.omega_a(r),
            omega_b: self.omega,
            g: self.g(r),
            c: self.c,
        }
    }
}

/// `(Ω(g), g̃) = (√(ω² + 4Cωg²), g √(ω/Ω(g)))`
pub fn renormalized_frequency(omega: f64, c: f64, g: f64) -> (f64, f64) {
    let omega_g = (omega * omega + 4.0 * c * omega * g * g).sqrt();
    (omega_g, g * (omega / omega_g).sqrt())
}

/// `Δm = 2 √(Cω) g`, so that `ω_g² = ω² + Δm²`.
pub fn mass_increment(omega: f64, c: f64, g: f64) -> f64 {
    2.0 * (c * omega).sqrt() * g
}

/// `H(Ωa, Ωb, G, C)` on the truncated qubit ⊗ boson space.
pub fn hamiltonian(p: &ModelParams, fp: &FockParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let n = fp.n_fock();
    let ops = make_operators(fp);
    let x = &ops.a + &ops.a_dag;
    let mut boson = ComplexMatrix::from_real_diag(
        &(0..n)
            .map(|k| p.omega_b * (k as f64 + 0.5))
            .collect::<Vec<_>>(),
    );
    if p.c != 0.0 && p.g != 0.0 {
        boson += &position_squared(n).scale(p.c * p.g * p.g);
    }
    let mut h = embed_boson(&boson, fp)?;
    h += &embed_qubit(&pauli_z(), fp)?.scale(0.5 * p.omega_a);
    if p.g != 0.0 {
        h += &kron(&pauli_x(), &x)?.scale(p.g);
    }
    Ok(h)
}

/// `H_SS = ½(p² + W²) + (ω/2) σz` with superpotential `W = ωx`, built from
/// the quadratures `x = (a + a†)/√(2ω)` and `p = i √(ω/2) (a† − a)`.
pub fn h_susy_ss(omega: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega must be positive"));
    }
    let oscillator = padded_product(fp.n_fock(), |a, ad| {
        let x = (a + ad).scale(1.0 / (2.0 * omega).sqrt());
        let p = (ad - a).scale_c(C64::new(0.0, (omega / 2.0).sqrt()));
        let w = x.scale(omega);
        (p.matmul(&p) + w.matmul(&w)).scale(0.5)
    });
    let mut h = embed_boson(&oscillator, fp)?;
    h += &embed_qubit(&pauli_z(), fp)?.scale(0.5 * omega);
    Ok(h)
}

/// `H_int(r) = g√(2/ω) σx W + (2C/ω) g² W² + g²/(4Cg² + ω) + ½ σz dWa/dx`
/// with `W = ωx` and `dWa/dx = ωa(r) − ω`.
pub fn h_interaction(s: &Schedule, r: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    Schedule::check_r(r)?;
    let n = fp.n_fock();
    let omega = s.omega;
    let g = s.g(r);
    let ops = make_operators(fp);
    // W = ω x = √(ω/2) (a + a†)
    let w = (&ops.a + &ops.a_dag).scale((omega / 2.0).sqrt());
    let w2 = position_squared(n).scale(omega / 2.0);

    let mut h = kron(&pauli_x(), &w)?.scale(g * (2.0 / omega).sqrt());
    h += &embed_boson(&w2, fp)?.scale(2.0 * s.c * g * g / omega);
    h += &ComplexMatrix::identity(fp.total_dim()).scale(s.self_energy(r));
    h += &embed_qubit(&pauli_z(), fp)?.scale(0.5 * (s.omega_a(r) - omega));
    Ok(h)
}

/// `H(r) = H_Rabi(r) + C g(r)² (b + b†)² + g(r)²/(4Cg(r)² + ω)`.
pub fn h_total_r(s: &Schedule, r: f64, fp: &FockParams) -> Result<ComplexMatrix> {
    Schedule::check_r(r)?;
    let mut h = hamiltonian(&s.params_at(r), fp)?;
    let shift = s.self_energy(r);
    if shift != 0.0 {
        h += &ComplexMatrix::identity(fp.total_dim()).scale(shift);
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChargeVariant {
    /// Charges of `H(Ω, Ω, 0, 0)`; supersymmetry unbroken.
    Free,
    /// Charges of `H(0, Ω, 0, 0)`; supersymmetry spontaneously broken.
    Broken,
}

/// Real supercharges `q1, q2`, complex ones `q±`, and the grading `N_F = −σz`.
#[derive(Clone, Debug)]
pub struct SuperchargeSet {
    pub q1: ComplexMatrix,
    pub q2: ComplexMatrix,
    pub q_plus: ComplexMatrix,
    pub q_minus: ComplexMatrix,
    pub grading: ComplexMatrix,
    pub variant: ChargeVariant,
    pub omega: f64,
}

pub fn grading_operator(fp: &FockParams) -> ComplexMatrix {
    embed_qubit(&-&pauli_z(), fp).expect("2x2 spin operator")
}

fn complex_charges(q1: &ComplexMatrix, q2: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let iq2 = q2.scale_c(C64::i());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((q1 + &iq2).scale(s), (q1 - &iq2).scale(s))
}

/// `q1 = √(Ω/2)(σ₊a + σ₋a†)`, `q2 = i√(Ω/2)(σ₋a† − σ₊a)`.
pub fn free_supercharges(omega: f64, fp: &FockParams) -> Result<SuperchargeSet> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega must be positive"));
    }
    let ops = make_operators(fp);
    let sp_a = kron(&sigma_plus(), &ops.a)?;
    let sm_ad = kron(&sigma_minus(), &ops.a_dag)?;
    let amp = (omega / 2.0).sqrt();
    let q1 = (&sp_a + &sm_ad).scale(amp);
    let q2 = (&sm_ad - &sp_a).scale_c(C64::new(0.0, amp));
    let (q_plus, q_minus) = complex_charges(&q1, &q2);
    Ok(SuperchargeSet {
        q1,
        q2,
        q_plus,
        q_minus,
        grading: grading_operator(fp),
        variant: ChargeVariant::Free,
        omega,
    })
}

/// `Q1 = √(Ω/2) σx √(a†a + ½)`, `Q2 = √(Ω/2) σy √(a†a + ½)`; the square root
/// is taken entrywise on the diagonal number operator.
pub fn broken_supercharges(omega: f64, fp: &FockParams) -> Result<SuperchargeSet> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega must be positive"));
    }
    let root = ComplexMatrix::from_real_diag(
        &(0..fp.n_fock())
            .map(|k| (k as f64 + 0.5).sqrt())
            .collect::<Vec<_>>(),
    );
    let amp = (omega / 2.0).sqrt();
    let q1 = kron(&pauli_x(), &root)?.scale(amp);
    let q2 = kron(&pauli_y(), &root)?.scale(amp);
    let (q_plus, q_minus) = complex_charges(&q1, &q2);
    Ok(SuperchargeSet {
        q1,
        q2,
        q_plus,
        q_minus,
        grading: grading_operator(fp),
        variant: ChargeVariant::Broken,
        omega,
    })
}

/// Heavy and light field operators together with `B_r` and `𝒟±`.
#[derive(Clone, Debug)]
pub struct FieldSet {
    pub phi_r: ComplexMatrix,
    pub pi_r: ComplexMatrix,
    pub phi: ComplexMatrix,
    pub pi: ComplexMatrix,
    pub b_r: ComplexMatrix,
    pub d_plus: ComplexMatrix,
    pub d_minus: ComplexMatrix,
    pub c1: f64,
    pub c2: f64,
    pub omega_g: f64,
    pub g_tilde: f64,
}

impl FieldSet {
    /// `ω_g(r)(B_r†B_r + ½) − (ωa(r)/2)(𝒟₋ + 𝒟₊)`, which reproduces `H(r)`.
    pub fn heavy_form(&self, omega_a: f64) -> ComplexMatrix {
        let dim = self.b_r.dim();
        let mut h = self.b_r.adjoint().matmul(&self.b_r);
        h += &ComplexMatrix::identity(dim).scale(0.5);
        let mut h = h.scale(self.omega_g);
        h -= &(&self.d_minus + &self.d_plus).scale(0.5 * omega_a);
        h
    }
}

/// `B_r = (c₁ + c₂) b + (c₁ − c₂) b† + (g̃/ω_g) σx` with `c₁ = ½√(ω_g/ω)`,
/// `c₂ = ½√(ω/ω_g)`, the fields built from it, and `𝒟± = −(σz ∓ iσy)/2`.
pub fn fields(s: &Schedule, r: f64, fp: &FockParams) -> Result<FieldSet> {
    Schedule::check_r(r)?;
    let omega = s.omega;
    let omega_g = s.omega_g(r);
    let g_tilde = s.g_tilde(r);
    let c1 = 0.5 * (omega_g / omega).sqrt();
    let c2 = 0.5 * (omega / omega_g).sqrt();

    let ops = make_operators(fp);
    let b = ops.boson(&ops.a);
    let b_dag = ops.boson(&ops.a_dag);
    let sx = embed_qubit(&pauli_x(), fp)?;

    let mut b_r = b.scale(c1 + c2);
    b_r += &b_dag.scale(c1 - c2);
    b_r += &sx.scale(g_tilde / omega_g);
    let b_r_dag = b_r.adjoint();

    let phi_r = (&b_r + &b_r_dag).scale((1.0 / (2.0 * omega_g)).sqrt());
    let pi_r = (&b_r - &b_r_dag).scale_c(C64::new(0.0, -(omega_g / 2.0).sqrt()));
    let phi = (&b + &b_dag).scale((1.0 / (2.0 * omega)).sqrt());
    let pi = (&b - &b_dag).scale_c(C64::new(0.0, -(omega / 2.0).sqrt()));

    let i_sy = pauli_y().scale_c(C64::i());
    let d_plus = embed_qubit(&(&pauli_z() - &i_sy).scale(-0.5), fp)?;
    let d_minus = embed_qubit(&(&pauli_z() + &i_sy).scale(-0.5), fp)?;

    Ok(FieldSet {
        phi_r,
        pi_r,
        phi,
        pi,
        b_r,
        d_plus,
        d_minus,
        c1,
        c2,
        omega_g,
        g_tilde,
    })
}

/// Heavy-boson oscillator `½P² + (ω_g²/2)X²` at the schedule endpoint, on its
/// own Fock space tensored with the qubit identity.
pub fn heavy_hamiltonian(s: &Schedule, fp: &FockParams) -> Result<ComplexMatrix> {
    let omega_g = s.omega_g(1.0);
    let osc = padded_product(fp.n_fock(), |a, ad| {
        let x = (a + ad).scale(1.0 / (2.0 * omega_g).sqrt());
        let p = (ad - a).scale_c(C64::new(0.0, (omega_g / 2.0).sqrt()));
        (p.matmul(&p) + x.matmul(&x).scale(omega_g * omega_g)).scale(0.5)
    });
    embed_boson(&osc, fp)
}
