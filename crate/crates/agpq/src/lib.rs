//! Hybrid classical/quantum pipeline for the antisymmetrized geminal power
//! (AGP) state on the reduced BCS (pairing) Hamiltonian: classical geminal
//! optimization, pair-to-qubit BCS circuit preparation, measurement-based
//! number projection, a unitary pair-hopper VQE, and seniority-zero exact
//! diagonalization as ground truth.

pub mod agp_classical;
pub mod circuit;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod optim;
pub mod pair_model;
pub mod projection;
pub mod rng;
pub mod statevector;
pub mod vqe;

pub use error::{AgpqError, Result};
