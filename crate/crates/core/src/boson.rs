//! Truncated boson Fock space with a total-occupancy cutoff.
//!
//! States are multi-indices `(n_1, ..., n_d)` with `Σ n_j <= n_max`, ordered by
//! total occupancy first and lexicographically inside each total, so every
//! particle-number sector is a contiguous block. Creation is truncated hard:
//! `A*(e_j)` maps the top sector to zero, which keeps `A(f) = A*(f)^†` exact
//! while the CCR only hold on columns below the cutoff.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FockError, Result};
use crate::fermion::OneParticleOperator;
use crate::linalg::{ComplexVector, SparseOperator, C64};
use crate::report::{random_state_on, BoundReport};

/// Hermitian one-particle operator on the boson modes.
pub type BosonOneParticleOperator = OneParticleOperator;

#[derive(Debug, Clone)]
pub struct BosonBasis {
    modes: usize,
    n_max: u32,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    sector_start: Vec<usize>,
}

impl PartialEq for BosonBasis {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.n_max == other.n_max
    }
}

fn push_compositions(total: u32, modes: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == modes {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        push_compositions(total - first, modes, prefix, out);
        prefix.pop();
    }
}

impl BosonBasis {
    pub fn new(modes: usize, n_max: u32) -> Result<Self> {
        Self::with_cap(modes, n_max, crate::linalg::DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(modes: usize, n_max: u32, cap: usize) -> Result<Self> {
        if modes == 0 {
            return Err(FockError::InvalidArgument(
                "boson basis needs at least one mode".into(),
            ));
        }
        let size = binomial(modes as u64 + n_max as u64, n_max as u64);
        if size > cap as u128 {
            return Err(FockError::Capacity {
                what: "boson basis size",
                requested: usize::try_from(size).unwrap_or(usize::MAX),
                cap,
            });
        }
        let mut states = Vec::with_capacity(size as usize);
        let mut sector_start = Vec::with_capacity(n_max as usize + 2);
        for total in 0..=n_max {
            sector_start.push(states.len());
            push_compositions(total, modes, &mut Vec::with_capacity(modes), &mut states);
        }
        sector_start.push(states.len());
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            modes,
            n_max,
            states,
            index,
            sector_start,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn occupancy(&self, index: usize) -> &[u32] {
        &self.states[index]
    }

    pub fn total(&self, index: usize) -> u32 {
        self.states[index].iter().sum()
    }

    pub fn index_of(&self, occupancy: &[u32]) -> Option<usize> {
        self.index.get(occupancy).copied()
    }

    /// Index range of the states with total occupancy `n`.
    pub fn sector(&self, n: u32) -> std::ops::Range<usize> {
        if n > self.n_max {
            return self.dim()..self.dim();
        }
        self.sector_start[n as usize]..self.sector_start[n as usize + 1]
    }

    /// Indices with total occupancy at most `n_max - 1`, where the CCR hold.
    pub fn sub_cutoff_states(&self) -> Vec<usize> {
        if self.n_max == 0 {
            return Vec::new();
        }
        (0..self.sector_start[self.n_max as usize]).collect()
    }

    /// Indices in the top sector `Σ n = n_max`.
    pub fn top_sector(&self) -> Vec<usize> {
        self.sector(self.n_max).collect()
    }

    fn check_vec(&self, v: &[C64], context: &'static str) -> Result<()> {
        if v.len() != self.modes {
            return Err(FockError::DimensionMismatch {
                expected: self.modes,
                got: v.len(),
                context,
            });
        }
        Ok(())
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Fock vacuum `Ω_b`.
pub fn vacuum(basis: &BosonBasis) -> ComplexVector {
    ComplexVector::basis(basis.dim(), 0)
}

/// `A*(g) = Σ_j g_j A*(e_j)` with hard truncation at `n_max`.
pub fn a_dag(basis: &BosonBasis, g: &[C64]) -> Result<SparseOperator> {
    basis.check_vec(g, "boson creation argument")?;
    let mut t = Vec::new();
    let mut target = vec![0u32; basis.modes()];
    for col in 0..basis.dim() {
        if basis.total(col) >= basis.n_max() {
            continue;
        }
        let occ = basis.occupancy(col);
        for (j, &coef) in g.iter().enumerate() {
            if coef == C64::new(0.0, 0.0) {
                continue;
            }
            target.copy_from_slice(occ);
            target[j] += 1;
            let row = basis.index_of(&target).expect("sub-cutoff target exists");
            t.push((row, col, coef * ((occ[j] + 1) as f64).sqrt()));
        }
    }
    SparseOperator::from_triplets(basis.dim(), basis.dim(), t)
}

/// `A(f) = A*(f)^†`, antilinear in `f`.
pub fn a_op(basis: &BosonBasis, f: &[C64]) -> Result<SparseOperator> {
    Ok(a_dag(basis, f)?.adjoint())
}

/// `dΓ_b(Y) = Σ_{j,k} Y_{jk} A*(e_j) A(e_k)`; preserves total occupancy, so it
/// is exact on the whole truncated space.
pub fn second_quantization_bose(
    basis: &BosonBasis,
    y: &BosonOneParticleOperator,
) -> Result<SparseOperator> {
    if y.dim() != basis.modes() {
        return Err(FockError::DimensionMismatch {
            expected: basis.modes(),
            got: y.dim(),
            context: "second quantization of a boson one-particle operator",
        });
    }
    let d = basis.modes();
    let mut t = Vec::new();
    let mut mid = vec![0u32; d];
    for col in 0..basis.dim() {
        let occ = basis.occupancy(col);
        for k in 0..d {
            if occ[k] == 0 {
                continue;
            }
            mid.copy_from_slice(occ);
            mid[k] -= 1;
            let down = (occ[k] as f64).sqrt();
            for j in 0..d {
                let coef = y.entry(j, k);
                if coef == C64::new(0.0, 0.0) {
                    continue;
                }
                let up = ((mid[j] + 1) as f64).sqrt();
                mid[j] += 1;
                let row = basis.index_of(&mid).expect("same-sector target exists");
                mid[j] -= 1;
                t.push((row, col, coef * (down * up)));
            }
        }
    }
    Ok(SparseOperator::from_triplets(basis.dim(), basis.dim(), t)?.with_hermitian(true))
}

/// Total number operator `dΓ_b(I)`.
pub fn number_operator(basis: &BosonBasis) -> SparseOperator {
    let diag: Vec<f64> = (0..basis.dim()).map(|i| basis.total(i) as f64).collect();
    SparseOperator::from_real_diagonal(&diag)
}

/// `‖dΓ_b(Y)^{1/2} Ψ‖ = ⟨Ψ, dΓ_b(Y) Ψ⟩^{1/2}` for `Y >= 0`.
pub fn half_power_norm(dgamma: &SparseOperator, psi: &[C64]) -> f64 {
    dgamma.form(psi, psi).re.max(0.0).sqrt()
}

/// `(‖A(f)Ψ‖, ‖Y^{-1/2}f‖ ‖dΓ_b(Y)^{1/2}Ψ‖)`
pub fn annihilation_bound_terms(
    basis: &BosonBasis,
    y: &BosonOneParticleOperator,
    f: &[C64],
    psi: &[C64],
) -> Result<(f64, f64)> {
    let dg = second_quantization_bose(basis, y)?;
    let lhs = a_op(basis, f)?.apply(psi).norm();
    let yf = y.apply_power(f, -0.5)?.norm();
    Ok((lhs, yf * half_power_norm(&dg, psi)))
}

/// `(‖A*(f)Ψ‖, ‖Y^{-1/2}f‖ ‖dΓ_b(Y)^{1/2}Ψ‖ + ‖f‖ ‖Ψ‖)`
pub fn creation_bound_terms(
    basis: &BosonBasis,
    y: &BosonOneParticleOperator,
    f: &[C64],
    psi: &[C64],
) -> Result<(f64, f64)> {
    let dg = second_quantization_bose(basis, y)?;
    let lhs = a_dag(basis, f)?.apply(psi).norm();
    let yf = y.apply_power(f, -0.5)?.norm();
    let rhs = yf * half_power_norm(&dg, psi) + crate::linalg::norm(f) * crate::linalg::norm(psi);
    Ok((lhs, rhs))
}

fn bound_report(
    name: &str,
    basis: &BosonBasis,
    y: &BosonOneParticleOperator,
    f: &[C64],
    samples: usize,
    seed: u64,
    support: &[usize],
    creation: bool,
) -> Result<BoundReport> {
    basis.check_vec(f, "bound test vector")?;
    y.require_strictly_positive()?;
    let dg = second_quantization_bose(basis, y)?;
    let op = if creation { a_dag(basis, f)? } else { a_op(basis, f)? };
    let yf = y.apply_power(f, -0.5)?.norm();
    let fnorm = crate::linalg::norm(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BoundReport::new(name);
    for _ in 0..samples {
        let psi = random_state_on(&mut rng, basis.dim(), support);
        let lhs = op.apply(&psi).norm();
        let mut rhs = yf * half_power_norm(&dg, &psi);
        if creation {
            rhs += fnorm * psi.norm();
        }
        report.push(lhs, rhs, None);
    }
    Ok(report)
}

/// Samples `‖A(f)Ψ‖ <= ‖Y^{-1/2}f‖ ‖dΓ_b(Y)^{1/2}Ψ‖` over random states of the
/// whole truncated space.
pub fn check_annihilation_bound(
    basis: &BosonBasis,
    y: &BosonOneParticleOperator,
    f: &[C64],
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let all: Vec<usize> = (0..basis.dim()).collect();
    bound_report("annihilation", basis, y, f, samples, seed, &all, false)
}

/// Samples `‖A*(f)Ψ‖ <= ‖Y^{-1/2}f‖ ‖dΓ_b(Y)^{1/2}Ψ‖ + ‖f‖‖Ψ‖` over random
/// sub-cutoff states.
pub fn check_creation_bound(
    basis: &BosonBasis,
    y: &BosonOneParticleOperator,
    f: &[C64],
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let sub = basis.sub_cutoff_states();
    bound_report("creation", basis, y, f, samples, seed, &sub, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues_dense, inner, random_vector};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn basis_size_is_binomial() {
        for (d, n, size) in [(1, 2, 3), (2, 2, 6), (2, 3, 10), (3, 3, 20), (4, 2, 15)] {
            assert_eq!(BosonBasis::new(d, n).unwrap().dim(), size);
        }
    }

    #[test]
    fn graded_lex_ordering() {
        let b = BosonBasis::new(2, 2).unwrap();
        let states: Vec<Vec<u32>> = (0..b.dim()).map(|i| b.occupancy(i).to_vec()).collect();
        assert_eq!(
            states,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0]
            ]
        );
        for (i, s) in states.iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
        }
        assert_eq!(b.sector(1), 1..3);
        assert_eq!(b.sub_cutoff_states(), vec![0, 1, 2]);
    }

    #[test]
    fn single_mode_ladder_matrix() {
        let b = BosonBasis::new(1, 2).unwrap();
        let ad = a_dag(&b, &[c(1.0)]).unwrap().to_dense();
        let s2 = 2f64.sqrt();
        let expected = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, s2, 0.0];
        for (a, e) in ad.iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn one_particle_creation_norm() {
        let b = BosonBasis::new(3, 2).unwrap();
        let f = vec![c(0.3), C64::new(0.0, 0.4), c(-1.2)];
        let v = a_dag(&b, &f).unwrap().apply(&vacuum(&b));
        assert!((v.norm() - crate::linalg::norm(&f)).abs() < 1e-14);
        assert!(a_op(&b, &f).unwrap().apply(&vacuum(&b)).norm() < 1e-15);
    }

    #[test]
    fn ccr_on_sub_cutoff_sector() {
        let b = BosonBasis::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_vector(&mut rng, 3);
        let g = random_vector(&mut rng, 3);
        let comm = a_op(&b, &f)
            .unwrap()
            .commutator(&a_dag(&b, &g).unwrap())
            .unwrap();
        let id = SparseOperator::identity(b.dim()).scale(inner(&f, &g));
        let sub = b.sub_cutoff_states();
        assert!(comm.max_abs_diff_on_columns(&id, &sub).unwrap() < 1e-12);
        // the top sector is where truncation shows up
        assert!(comm.max_abs_diff(&id).unwrap() > 1e-3);
        let aa = a_op(&b, &f).unwrap().commutator(&a_op(&b, &g).unwrap()).unwrap();
        assert!(aa.max_abs() < 1e-12);
    }

    #[test]
    fn dgamma_single_mode_occupancy() {
        let m = 0.7;
        let b = BosonBasis::new(1, 4).unwrap();
        let dg = second_quantization_bose(&b, &OneParticleOperator::diagonal(&[m])).unwrap();
        for n in 0..5 {
            assert!((dg.get(n, n).re - m * n as f64).abs() < 1e-15);
        }
        let b3 = BosonBasis::new(3, 2).unwrap();
        let dg = second_quantization_bose(&b3, &OneParticleOperator::identity(3)).unwrap();
        assert!(dg.max_abs_diff(&number_operator(&b3)).unwrap() < 1e-15);
    }

    #[test]
    fn dgamma_creation_commutator() {
        let b = BosonBasis::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raw = SparseOperator::from_dense(3, 3, &random_vector(&mut rng, 9)).unwrap();
        let y = OneParticleOperator::new(3, raw.symmetrized().unwrap().to_dense()).unwrap();
        let f = random_vector(&mut rng, 3);
        let dg = second_quantization_bose(&b, &y).unwrap();
        let lhs = dg.commutator(&a_dag(&b, &f).unwrap()).unwrap();
        let rhs = a_dag(&b, &y.apply(&f)).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        let lhs = dg.commutator(&a_op(&b, &f).unwrap()).unwrap();
        let rhs = a_op(&b, &y.apply(&f)).unwrap().scale(c(-1.0));
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn low_spectrum_independent_of_cutoff() {
        let y = OneParticleOperator::diagonal(&[0.6, 0.9]);
        let low = |n_max| {
            let b = BosonBasis::new(2, n_max).unwrap();
            let mut e = eigenvalues_dense(&second_quantization_bose(&b, &y).unwrap()).unwrap();
            e.truncate(6);
            e
        };
        let a = low(2);
        let bb = low(4);
        for (x, z) in a.iter().zip(&bb) {
            assert!((x - z).abs() < 1e-14);
        }
    }

    #[test]
    fn annihilation_bound_equality_on_number_states() {
        let omega = 1.7;
        let b = BosonBasis::new(1, 5).unwrap();
        let y = OneParticleOperator::diagonal(&[omega]);
        for n in 0..=5usize {
            let psi = ComplexVector::basis(b.dim(), n);
            let (lhs, rhs) = annihilation_bound_terms(&b, &y, &[c(1.0)], &psi).unwrap();
            assert!((lhs - (n as f64).sqrt()).abs() < 1e-14);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn random_bounds_hold() {
        let b = BosonBasis::new(3, 3).unwrap();
        let y = OneParticleOperator::diagonal(&[0.5, 1.0, 2.5]);
        let f = vec![C64::new(0.2, 0.1), c(-0.7), C64::new(0.0, 0.3)];
        let ra = check_annihilation_bound(&b, &y, &f, 100, 3).unwrap();
        let rc = check_creation_bound(&b, &y, &f, 100, 4).unwrap();
        assert_eq!(ra.samples.len(), 100);
        assert!(ra.passed(), "min margin {}", ra.min_margin());
        assert!(rc.passed(), "min margin {}", rc.min_margin());
    }

    #[test]
    fn singular_y_rejected() {
        let b = BosonBasis::new(2, 2).unwrap();
        let y = OneParticleOperator::diagonal(&[0.0, 1.0]);
        assert!(matches!(
            check_annihilation_bound(&b, &y, &[c(1.0), c(0.0)], 4, 0),
            Err(FockError::NotPositive { .. })
        ));
    }
}
