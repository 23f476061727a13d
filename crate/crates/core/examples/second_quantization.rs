//! dΓ of a one-particle operator: ladder commutators and the spectrum as occupation sums.

use fockbench::fermion::{annihilation, second_quantization_fermi, FermionBasis, OneParticleOperator};
use fockbench::linalg::{eigenvalues_dense, random_vector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fockbench::Result<()> {
    let d = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_vector(&mut rng, d * d);
    let m = (0..d * d)
        .map(|i| (a[i] + a[(i % d) * d + i / d].conj()) * 0.5)
        .collect();
    let x = OneParticleOperator::new(d, m)?;
    let basis = FermionBasis::new(d)?;
    let dg = second_quantization_fermi(&basis, &x)?;

    let f = random_vector(&mut rng, d);
    let lhs = dg.commutator(&annihilation(&basis, &f)?)?;
    let rhs = annihilation(&basis, &x.apply(&f))?.scale(C64::new(-1.0, 0.0));
    println!("[dΓ(X), B(f)] + B(Xf)   {:.2e}", lhs.max_abs_diff(&rhs)?);

    // eigenvalues of dΓ(X) are sums over subsets of eigenvalues of X
    let (mu, _) = x.eigen();
    let mut sums: Vec<f64> = (0..1u32 << d)
        .map(|mask| (0..d).filter(|j| mask >> j & 1 == 1).map(|j| mu[j]).sum())
        .collect();
    sums.sort_by(f64::total_cmp);
    let ev = eigenvalues_dense(&dg)?;
    let worst = ev.iter().zip(&sums).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("spectrum vs subset sums {worst:.2e} over {} levels", ev.len());
    Ok(())
}
