//! Numerical second quantization: truncated fermion and boson Fock spaces,
//! an abstract fermion-plus-environment Hamiltonian, a discretized
//! Dirac/Klein-Gordon Yukawa model, and Weyl-sequence probes of the bottom of
//! the essential spectrum.

pub mod abstract_model;
pub mod boson;
pub mod cli;
pub mod error;
pub mod fermion;
pub mod linalg;
pub mod report;
pub mod verify;
pub mod weyl_probe;
pub mod yukawa;

pub use error::{FockError, Result};
pub use linalg::C64;
