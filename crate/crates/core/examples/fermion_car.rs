//! Fermionic ladder operators on a 4-mode Fock space: CAR and operator norms.

use fockbench::fermion::{annihilation, creation, number_operator, vacuum, FermionBasis};
use fockbench::linalg::{inner, op_norm, random_vector, SparseOperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fockbench::Result<()> {
    let basis = FermionBasis::new(4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_vector(&mut rng, 4);
    let g = random_vector(&mut rng, 4);

    let bf = annihilation(&basis, &f)?;
    let bsg = creation(&basis, &g)?;
    let id = SparseOperator::identity(basis.dim());
    let car = bf.anticommutator(&bsg)?.max_abs_diff(&id.scale(inner(&f, &g)))?;
    println!("Fock dimension          {}", basis.dim());
    println!("{{B(f), B*(g)}} - (f,g)  {car:.2e}");
    println!("{{B(f), B(f)}}           {:.2e}", bf.anticommutator(&bf)?.max_abs());
    println!("‖f‖ = {:.12}  ‖B(f)‖ = {:.12}", f.norm(), op_norm(&bf, 1e-13)?);

    // B*(g) acting on the vacuum gives the one-particle vector g
    let one = bsg.apply(&vacuum(&basis));
    let n = number_operator(&basis);
    println!("⟨N⟩ after one creation  {:.12}", (inner(&one, &n.apply(&one)) / inner(&one, &one)).re);
    Ok(())
}
