//! Truncated boson Fock space: CCR hold below the occupancy cutoff and fail on the top sector.

use fockbench::boson::{a_dag, a_op, BosonBasis};
use fockbench::linalg::{inner, random_vector, SparseOperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fockbench::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("{:>5} {:>6} {:>6} {:>14} {:>14}", "modes", "n_max", "dim", "sub-cutoff", "top sector");
    for modes in 1..=3 {
        for n_max in 1..=3 {
            let basis = BosonBasis::new(modes, n_max)?;
            let f = random_vector(&mut rng, modes);
            let g = random_vector(&mut rng, modes);
            let lhs = a_op(&basis, &f)?.commutator(&a_dag(&basis, &g)?)?;
            let rhs = SparseOperator::identity(basis.dim()).scale(inner(&f, &g));
            let sub = lhs.max_abs_diff_on_columns(&rhs, &basis.sub_cutoff_states())?;
            let top = lhs.max_abs_diff_on_columns(&rhs, &basis.top_sector())?;
            println!("{modes:>5} {n_max:>6} {:>6} {sub:>14.2e} {top:>14.2e}", basis.dim());
        }
    }
    Ok(())
}
