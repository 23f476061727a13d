//! `H_I = Σ_x w_x χ_I(x) ψ̄ψ(x) ⊗ φ(x)` and the full Hamiltonian.

use rayon::prelude::*;

use super::fields::YukawaModel;
use crate::abstract_model::{AbstractSystem, TensorOperator, HERMITIAN_TOL};
use crate::boson;
use crate::error::{FockError, Result};
use crate::linalg::{kron, KronSum, SparseOperator, C64};
use crate::weyl_probe::BosonFactor;

/// Factored form `Σ_k G_k† ⊗ a_k + G_k ⊗ a_k*` with
/// `G_k = Σ_x w_x χ_I(x) h_x(k) ψ̄ψ(x) / √2`.
pub fn build_interaction(model: &YukawaModel) -> Result<KronSum> {
    let densities = model.densities()?;
    let spatial = model.spatial();
    let fdim = model.fermion_basis().dim();
    let bbasis = model.boson_basis();
    let h_modes: Vec<Vec<C64>> = spatial.points.iter().map(|x| model.h_mode(x)).collect();
    let g_ops: Vec<SparseOperator> = (0..model.n_k())
        .into_par_iter()
        .map(|k| {
            let mut acc = SparseOperator::zeros(fdim, fdim);
            for (i, dens) in densities.iter().enumerate() {
                let c = h_modes[i][k] * (spatial.weights[i] * spatial.chi[i] * std::f64::consts::FRAC_1_SQRT_2);
                if c != C64::new(0.0, 0.0) {
                    acc = acc.add_scaled(dens, c)?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut sum = KronSum::new(fdim, bbasis.dim());
    for (k, g) in g_ops.into_iter().enumerate() {
        if g.nnz() == 0 {
            continue;
        }
        let mut e = vec![C64::new(0.0, 0.0); model.n_k()];
        e[k] = C64::new(1.0, 0.0);
        let a = boson::a_op(bbasis, &e)?;
        let ad = boson::a_dag(bbasis, &e)?;
        sum.push(Some(g.adjoint()), Some(a))?;
        sum.push(Some(g), Some(ad))?;
    }
    Ok(sum)
}

/// Direct assembly of the defining sum, one Kronecker product per point.
pub fn build_interaction_direct(model: &YukawaModel) -> Result<SparseOperator> {
    let spatial = model.spatial();
    let terms: Vec<SparseOperator> = spatial
        .points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let p = model.density(x)?;
            let phi = model.phi_field(x)?;
            Ok(kron(&p, &phi)?.scale(C64::new(spatial.weights[i] * spatial.chi[i], 0.0)))
        })
        .collect::<Result<_>>()?;
    let dim = model.dim();
    let mut acc = SparseOperator::zeros(dim, dim);
    for t in &terms {
        acc = acc.add(t)?;
    }
    let defect = acc.hermiticity_defect() / acc.max_abs().max(1.0);
    if defect > HERMITIAN_TOL {
        return Err(FockError::NotHermitian {
            defect,
            tol: HERMITIAN_TOL,
        });
    }
    Ok(acc.with_hermitian(true))
}

/// `H_κ = H_D ⊗ I + I ⊗ H_KG + κ H_I` with `H_D = dΓ_f(ω_M)` and `H_KG = dΓ_b(ω_m)`.
/// The interaction is left out entirely at `κ = 0`.
pub fn build_hamiltonian(model: &YukawaModel) -> Result<AbstractSystem> {
    let kappa = model.config().kappa;
    let interaction = if kappa == 0.0 {
        None
    } else {
        Some(TensorOperator::Kron(build_interaction(model)?.scaled(C64::new(kappa, 0.0))))
    };
    AbstractSystem::new(
        model.fermion_basis().clone(),
        model.k_operator(),
        model.h_kg()?,
        interaction,
    )
}

/// Boson factor used by the bosonic probe branch.
pub fn boson_factor(model: &YukawaModel) -> BosonFactor {
    BosonFactor {
        basis: model.boson_basis().clone(),
        s: model.s_operator(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues_dense, inner, random_unit_vector, LinearMap};
    use crate::yukawa::config::YukawaConfig;
    use crate::yukawa::fields::tests::{tiny, TINY};
    use crate::yukawa::grid::Profile;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn factored_matches_direct() {
        let m = tiny();
        let fac = build_interaction(&m).unwrap().to_sparse().unwrap();
        let direct = build_interaction_direct(&m).unwrap();
        assert!(fac.max_abs_diff(&direct).unwrap() < 1e-13);
        assert!(direct.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn form_matches_defining_sum() {
        let m = tiny();
        let hi = build_interaction(&m).unwrap();
        let dens: Vec<_> = m.spatial().points.iter().map(|x| m.density(x).unwrap()).collect();
        let phis: Vec<_> = m.spatial().points.iter().map(|x| m.phi_field(x).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let a = random_unit_vector(&mut rng, m.dim());
            let b = random_unit_vector(&mut rng, m.dim());
            let lhs = inner(&a, &hi.apply(&b));
            let mut rhs = C64::new(0.0, 0.0);
            for i in 0..dens.len() {
                let t = kron(&dens[i], &phis[i]).unwrap();
                rhs += t.form(&a, &b) * (m.spatial().weights[i] * m.spatial().chi[i]);
            }
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_spatial_cutoff_gives_zero() {
        let mut c = YukawaConfig::from_toml_str(TINY).unwrap();
        c.spatial.chi = Some(vec![0.0; 3]);
        let m = YukawaModel::new(&c).unwrap();
        assert!(build_interaction(&m).unwrap().terms().is_empty());
        assert_eq!(build_interaction_direct(&m).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn free_hamiltonian_spectrum() {
        let mut c = YukawaConfig::from_toml_str(TINY).unwrap();
        c.kappa = 0.0;
        c.n_max = 1;
        c.cutoff.kg = Profile::Sharp { lambda: 2.0 };
        let m = YukawaModel::new(&c).unwrap();
        let sys = build_hamiltonian(&m).unwrap();
        assert!(sys.interaction().is_none());
        let spec = sys.low_spectrum(3, 1e-10).unwrap();
        assert_eq!(spec.ground_energy(), 0.0);
        // lowest excitation is one boson at |k| = 0.5
        assert!((spec.eigenvalues[1] - (0.61f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn interacting_hamiltonian_is_hermitian() {
        let mut c = YukawaConfig::from_toml_str(TINY).unwrap();
        c.n_max = 1;
        let m = YukawaModel::new(&c).unwrap();
        let sys = build_hamiltonian(&m).unwrap();
        let h = sys.hamiltonian().unwrap();
        assert!(h.hermiticity_defect() < 1e-13);
        let ev = eigenvalues_dense(&h).unwrap();
        assert!(ev[0].is_finite() && ev[0] < 0.0);
    }
}
