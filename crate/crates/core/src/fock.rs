//! Truncated boson Fock space, qubit operators and their tensor embeddings.
//!
//! The composite basis is qubit-major: index `s * N + n` for spin `s`
//! (`↑ = 0`, `↓ = 1`) and Fock level `n`, so `|↑⟩ = (1, 0)ᵀ` and `|↓⟩ = (0, 1)ᵀ`.

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64};

pub const DEFAULT_N_FOCK: usize = 256;
pub const DEFAULT_BUFFER: usize = 64;
pub const MIN_N_FOCK: usize = 8;

/// Truncation of the boson factor: levels `0..n_fock`, of which the top
/// `buffer` are masked by the interior projector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockParams {
    n_fock: usize,
    buffer: usize,
}

impl Default for FockParams {
    fn default() -> Self {
        Self {
            n_fock: DEFAULT_N_FOCK,
            buffer: DEFAULT_BUFFER,
        }
    }
}

impl FockParams {
    pub fn new(n_fock: usize, buffer: usize) -> Result<Self> {
        if n_fock < MIN_N_FOCK {
            return Err(Error::invalid(format!(
                "n_fock must be at least {MIN_N_FOCK} (got {n_fock})"
            )));
        }
        if buffer > n_fock / 2 {
            return Err(Error::invalid(format!(
                "buffer must not exceed n_fock/2 (got buffer {buffer}, n_fock {n_fock})"
            )));
        }
        if 2 * n_fock > crate::linalg::MAX_DIM {
            return Err(Error::Sizing {
                dim: 2 * n_fock,
                max: crate::linalg::MAX_DIM,
            });
        }
        Ok(Self { n_fock, buffer })
    }

    pub fn n_fock(&self) -> usize {
        self.n_fock
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    /// Dimension of the qubit ⊗ boson space.
    pub fn total_dim(&self) -> usize {
        2 * self.n_fock
    }

    /// Highest Fock level kept by the interior projector.
    pub fn interior_max_level(&self) -> usize {
        self.n_fock - 1 - self.buffer
    }

    /// Same buffer fraction at a different truncation.
    pub fn rescaled(&self, n_fock: usize) -> Result<Self> {
        let buffer = (self.buffer * n_fock) / self.n_fock;
        Self::new(n_fock, buffer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// Basis ordering of the composite space. Only qubit-major is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisOrdering {
    QubitMajor,
}

pub fn basis_index(spin: Spin, level: usize, fp: &FockParams) -> usize {
    assert!(level < fp.n_fock, "Fock level out of range");
    spin.index() * fp.n_fock + level
}

/// Unit vector `|spin⟩ ⊗ |level⟩`.
pub fn basis_state(spin: Spin, level: usize, fp: &FockParams) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); fp.total_dim()];
    v[basis_index(spin, level, fp)] = C64::new(1.0, 0.0);
    v
}

/// Boson annihilation operator on `n` levels: `⟨k-1|a|k⟩ = √k`.
pub fn annihilation(n: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(n: usize) -> ComplexMatrix {
    annihilation(n).adjoint()
}

pub fn number(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&(0..n).map(|k| k as f64).collect::<Vec<_>>())
}

/// `(a + a†)²` with exact Fock matrix elements on every kept level,
/// i.e. the truncation of the infinite-space operator, not the square of the
/// truncated `a + a†` (which is wrong on the top level).
pub fn position_squared(n: usize) -> ComplexMatrix {
    padded_product(n, |a, ad| {
        let x = a + ad;
        x.matmul(&x)
    })
}

/// `-(a - a†)²`, the momentum counterpart of [`position_squared`].
pub fn momentum_squared(n: usize) -> ComplexMatrix {
    padded_product(n, |a, ad| {
        let y = a - ad;
        -&y.matmul(&y)
    })
}

/// Evaluates a polynomial of degree ≤ 2 in the ladder operators on `n + 2`
/// levels and keeps the top-left `n × n` block, which equals the exact
/// matrix elements of the untruncated operator.
pub fn padded_product(
    n: usize,
    f: impl FnOnce(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let a = annihilation(n + 2);
    let ad = a.adjoint();
    f(&a, &ad).truncate(n)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    let i = C64::i();
    ComplexMatrix::from_row_major(2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)])
        .expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// `σ₊ = (σx + iσy)/2`, mapping `|↓⟩ → |↑⟩`.
pub fn sigma_plus() -> ComplexMatrix {
    (&pauli_x() + &pauli_y().scale_c(C64::i())).scale(0.5)
}

/// `σ₋ = (σx − iσy)/2`, mapping `|↑⟩ → |↓⟩`.
pub fn sigma_minus() -> ComplexMatrix {
    (&pauli_x() - &pauli_y().scale_c(C64::i())).scale(0.5)
}

/// Ladder and spin operators on their own factors.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub n_op: ComplexMatrix,
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
    pub s_plus: ComplexMatrix,
    pub s_minus: ComplexMatrix,
    pub ordering: BasisOrdering,
    pub fock: FockParams,
}

impl OperatorSet {
    pub fn boson(&self, op: &ComplexMatrix) -> ComplexMatrix {
        embed_boson(op, &self.fock).expect("operator on the boson factor")
    }

    pub fn qubit(&self, op: &ComplexMatrix) -> ComplexMatrix {
        embed_qubit(op, &self.fock).expect("operator on the qubit factor")
    }

    /// `spin ⊗ boson` on the composite space.
    pub fn product(&self, spin: &ComplexMatrix, boson: &ComplexMatrix) -> ComplexMatrix {
        kron(spin, boson).expect("validated FockParams keep the product in range")
    }
}

pub fn make_operators(fp: &FockParams) -> OperatorSet {
    let n = fp.n_fock;
    let a = annihilation(n);
    let a_dag = a.adjoint();
    let n_op = a_dag.matmul(&a);
    OperatorSet {
        a,
        a_dag,
        n_op,
        sx: pauli_x(),
        sy: pauli_y(),
        sz: pauli_z(),
        s_plus: sigma_plus(),
        s_minus: sigma_minus(),
        ordering: BasisOrdering::QubitMajor,
        fock: *fp,
    }
}

/// `I₂ ⊗ op`
pub fn embed_boson(op: &ComplexMatrix, fp: &FockParams) -> Result<ComplexMatrix> {
    if op.dim() != fp.n_fock {
        return Err(Error::DimensionMismatch {
            expected: fp.n_fock,
            found: op.dim(),
        });
    }
    kron(&ComplexMatrix::identity(2), op)
}

/// `op ⊗ I_N`
pub fn embed_qubit(op: &ComplexMatrix, fp: &FockParams) -> Result<ComplexMatrix> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: op.dim(),
        });
    }
    kron(op, &ComplexMatrix::identity(fp.n_fock))
}

/// Orthogonal projector onto `|s⟩ ⊗ |n⟩` with `n ≤ N − 1 − B`, both spins.
pub fn interior_projector(fp: &FockParams) -> ComplexMatrix {
    level_projector(fp.n_fock, fp.interior_max_level())
}

/// Projector onto Fock levels `0..=max_level` in both spin sectors of a
/// `2 · n_fock` space.
pub fn level_projector(n_fock: usize, max_level: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..2 * n_fock)
        .map(|i| if i % n_fock <= max_level { 1.0 } else { 0.0 })
        .collect();
    ComplexMatrix::from_real_diag(&diag)
}

/// Interior projector on the boson factor alone.
pub fn boson_interior_projector(fp: &FockParams) -> ComplexMatrix {
    let top = fp.interior_max_level();
    let diag: Vec<f64> = (0..fp.n_fock)
        .map(|n| if n <= top { 1.0 } else { 0.0 })
        .collect();
    ComplexMatrix::from_real_diag(&diag)
}
