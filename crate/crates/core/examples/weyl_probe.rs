//! Weyl-sequence probe on an abstract system H = dΓ(K) ⊗ I + I ⊗ T + H_I.

use fockbench::abstract_model::{AbstractSystem, TensorOperator};
use fockbench::fermion::{annihilation, creation, FermionBasis, OneParticleOperator};
use fockbench::linalg::{kron, SparseOperator, C64};
use fockbench::weyl_probe::{gaussian_packets, probe_lambda, WindowSelection, CHAIN_TOL};

fn main() -> fockbench::Result<()> {
    let basis = FermionBasis::new(4)?;
    let f = [C64::new(0.6, 0.0), C64::new(0.0, 0.3), C64::new(0.2, 0.0), C64::new(0.1, -0.1)];
    let nf = creation(&basis, &f)?.matmul(&annihilation(&basis, &f)?)?;
    let sx = SparseOperator::from_dense(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
    let hi = kron(&nf, &sx)?.scale(C64::new(0.2, 0.0)).symmetrized()?;
    let sys = AbstractSystem::new(
        basis,
        OneParticleOperator::diagonal(&[0.9, 1.2, 1.6, 2.2]),
        SparseOperator::from_real_diagonal(&[0.0, 0.5]),
        Some(TensorOperator::Sparse(hi)),
    )?;
    let spectrum = sys.full_spectrum()?;
    let lambda = 1.2;
    let family = gaussian_packets(sys.k(), lambda, &[0.5, 0.2, 0.05, 0.01])?;
    let report = probe_lambda(&sys, &spectrum, lambda, &family, &[0.5, 0.1], WindowSelection::Ground)?;

    println!("E0 = {:.10}, probing λ = {lambda}", report.e0);
    println!("{:>2} {:>5} {:>12} {:>12} {:>12}", "n", "ε", "residual", "bound", "term_I");
    for r in &report.rows {
        println!("{:>2} {:>5} {:>12.4e} {:>12.4e} {:>12.4e}", r.n, r.eps, r.residual, r.bound, r.term_i);
    }
    println!("chain violations: {}", report.violations(CHAIN_TOL));
    Ok(())
}
