//! Discretized Dirac field coupled to a Klein-Gordon field through
//! `κ ∫ χ_I(x) ψ̄(x)ψ(x) φ(x) dx`.

pub mod bounds;
pub mod config;
pub mod dirac;
pub mod fields;
pub mod grid;
pub mod hvz;
pub mod interaction;

pub use config::{GridSpec, YukawaConfig};
pub use fields::YukawaModel;
pub use grid::{MomentumGrid, Profile, SpatialGrid};
pub use interaction::{boson_factor, build_hamiltonian, build_interaction, build_interaction_direct};
