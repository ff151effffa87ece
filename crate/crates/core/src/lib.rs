//! Qubit ⊗ boson simulation of the quantum Rabi model with an A² term:
//! supersymmetric charges, the Witten index, unitary equivalences, and the
//! spectral flows between the supersymmetric and the broken regime.

pub mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod transforms;

pub use error::{Error, Result};
pub use fock::FockParams;
pub use linalg::{ComplexMatrix, C64};
pub use model::{ModelParams, Schedule};
