//! Numeric substrate: complex vectors, CSR sparse operators, Kronecker
//! structure, dense and Lanczos eigensolvers and operator norms.
//!
//! Tensor index convention used everywhere in the crate:
//! `index = left_index * dim(right) + right_index`.

mod eigen;
mod kron;
mod sparse;
mod vector;

pub use eigen::{
    dense_cap, eig_dense, eig_diagonal, eig_low, eig_low_with, eigenvalues_dense, op_norm, op_norm_with,
    LanczosOptions, Spectrum, SolverMethod, DEFAULT_DENSE_CAP,
};
pub use kron::{apply_left, apply_right, KronSum, KronTerm, LinearMap};
pub use sparse::{kron, kron_with_cap, SparseOperator, DEFAULT_BASIS_CAP};
pub use vector::{inner, norm, random_unit_vector, random_vector, ComplexVector};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Shorthand for a real-valued complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
