//! Truncated fermion Fock space over a `d`-dimensional one-particle space.
//!
//! States are occupation bitmasks: bit `j` set means mode `j` is occupied and
//! the state index equals the bitmask value. Creation operators carry the
//! Jordan-Wigner sign `(-1)^{#occupied modes below j}`, which makes the CAR
//! exact on the full `2^d`-dimensional space.

use faer::{Mat, Side};

use crate::error::{FockError, Result};
use crate::linalg::{ComplexVector, SparseOperator, C64};

/// Largest mode count accepted by [`FermionBasis::new`].
pub const DEFAULT_MODE_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionBasis {
    modes: usize,
}

impl FermionBasis {
    pub fn new(modes: usize) -> Result<Self> {
        Self::with_cap(modes, DEFAULT_MODE_CAP)
    }

    pub fn with_cap(modes: usize, cap: usize) -> Result<Self> {
        if modes == 0 {
            return Err(FockError::InvalidArgument(
                "fermion basis needs at least one mode".into(),
            ));
        }
        if modes > cap {
            return Err(FockError::Capacity {
                what: "fermion mode count",
                requested: modes,
                cap,
            });
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    /// Bitmask of state `index` (the identity map, kept for readability).
    pub fn occupation(&self, index: usize) -> u32 {
        index as u32
    }

    pub fn particle_number(&self, index: usize) -> u32 {
        self.occupation(index).count_ones()
    }

    /// Indices of all states with exactly `n` particles.
    pub fn sector(&self, n: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.particle_number(i) == n).collect()
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

/// Jordan-Wigner parity of the occupied modes strictly below `mode`.
#[inline]
fn sign_below(state: usize, mode: usize) -> f64 {
    if (state & ((1usize << mode) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One-particle operator as a `d x d` Hermitian matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleOperator {
    dim: usize,
    matrix: Vec<C64>,
}

impl OneParticleOperator {
    pub fn new(dim: usize, matrix: Vec<C64>) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(FockError::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
                context: "one-particle matrix",
            });
        }
        let op = Self { dim, matrix };
        let defect = op.hermiticity_defect();
        if defect > 1e-12 {
            return Err(FockError::NotHermitian { defect, tol: 1e-12 });
        }
        Ok(op)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut matrix = vec![C64::new(0.0, 0.0); d * d];
        for (i, &v) in values.iter().enumerate() {
            matrix[i * d + i] = C64::new(v, 0.0);
        }
        Self { dim: d, matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[i * self.dim + j]
    }

    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `X f`
    pub fn apply(&self, f: &[C64]) -> ComplexVector {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.entry(i, j) * f[j]).sum())
            .collect()
    }

    /// `X - s I`
    pub fn shifted(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.matrix[i * self.dim + i] -= C64::new(s, 0.0);
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| i == j || self.entry(i, j) == C64::new(0.0, 0.0)))
    }

    /// Ascending eigenvalues with orthonormal eigenvectors. Diagonal
    /// operators return standard basis vectors, ties broken by index.
    pub fn eigen(&self) -> (Vec<f64>, Vec<ComplexVector>) {
        let d = self.dim;
        if self.is_diagonal() {
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| {
                self.entry(a, a).re.total_cmp(&self.entry(b, b).re).then(a.cmp(&b))
            });
            let values = order.iter().map(|&i| self.entry(i, i).re).collect();
            let vectors = order.iter().map(|&i| ComplexVector::basis(d, i)).collect();
            return (values, vectors);
        }
        let a = Mat::<C64>::from_fn(d, d, |i, j| self.entry(i, j));
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .expect("small Hermitian eigenproblem converges");
        let s = evd.S();
        let u = evd.U();
        let values = (0..d).map(|i| s[i].re).collect();
        let vectors = (0..d)
            .map(|j| (0..d).map(|i| u[(i, j)]).collect())
            .collect();
        (values, vectors)
    }

    /// `X^power f` through the eigendecomposition; requires `X > 0` for negative powers.
    pub fn apply_power(&self, f: &[C64], power: f64) -> Result<ComplexVector> {
        if f.len() != self.dim {
            return Err(FockError::DimensionMismatch {
                expected: self.dim,
                got: f.len(),
                context: "one-particle operator power",
            });
        }
        let (values, vectors) = self.eigen();
        let mut out = ComplexVector::zeros(self.dim);
        for (lam, v) in values.iter().zip(&vectors) {
            if power < 0.0 && *lam <= 0.0 {
                return Err(FockError::NotPositive {
                    min_eigenvalue: *lam,
                });
            }
            let coef = v.dot(f) * lam.powf(power);
            out.axpy(coef, v);
        }
        Ok(out)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0[0]
    }

    /// Errors unless every eigenvalue is strictly positive.
    pub fn require_strictly_positive(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min <= 0.0 {
            return Err(FockError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }
}

/// Fock vacuum `Ω_f`, the empty bitmask.
pub fn vacuum(basis: &FermionBasis) -> ComplexVector {
    ComplexVector::basis(basis.dim(), 0)
}

fn creation_triplets(basis: &FermionBasis, mode: usize, coef: C64, out: &mut Vec<(usize, usize, C64)>) {
    let bit = 1usize << mode;
    for state in 0..basis.dim() {
        if state & bit == 0 {
            out.push((state | bit, state, coef * sign_below(state, mode)));
        }
    }
}

/// `B*(e_mode)`
pub fn creation_mode(basis: &FermionBasis, mode: usize) -> SparseOperator {
    assert!(mode < basis.modes(), "mode out of range");
    let mut t = Vec::with_capacity(basis.dim() / 2);
    creation_triplets(basis, mode, C64::new(1.0, 0.0), &mut t);
    SparseOperator::from_triplets(basis.dim(), basis.dim(), t).expect("indices in range")
}

/// `B*(g) = Σ_j g_j B*(e_j)`, linear in `g`.
pub fn creation(basis: &FermionBasis, g: &[C64]) -> Result<SparseOperator> {
    basis.check_vec(g, "creation operator argument")?;
    let mut t = Vec::new();
    for (mode, &coef) in g.iter().enumerate() {
        if coef != C64::new(0.0, 0.0) {
            creation_triplets(basis, mode, coef, &mut t);
        }
    }
    SparseOperator::from_triplets(basis.dim(), basis.dim(), t)
}

/// `B(f) = B*(f)^†`, antilinear in `f`.
pub fn annihilation(basis: &FermionBasis, f: &[C64]) -> Result<SparseOperator> {
    Ok(creation(basis, f)?.adjoint())
}

/// `dΓ_f(X) = Σ_{j,k} X_{jk} B*(e_j) B(e_k)`.
pub fn second_quantization_fermi(
    basis: &FermionBasis,
    x: &OneParticleOperator,
) -> Result<SparseOperator> {
    if x.dim() != basis.modes() {
        return Err(FockError::DimensionMismatch {
            expected: basis.modes(),
            got: x.dim(),
            context: "second quantization of a one-particle operator",
        });
    }
    let d = basis.modes();
    let mut t = Vec::new();
    for state in 0..basis.dim() {
        for k in 0..d {
            let kb = 1usize << k;
            if state & kb == 0 {
                continue;
            }
            let mid = state ^ kb;
            let s_k = sign_below(state, k);
            for j in 0..d {
                let coef = x.entry(j, k);
                if coef == C64::new(0.0, 0.0) {
                    continue;
                }
                let jb = 1usize << j;
                if mid & jb != 0 {
                    continue;
                }
                let target = mid | jb;
                t.push((target, state, coef * (s_k * sign_below(mid, j))));
            }
        }
    }
    Ok(SparseOperator::from_triplets(basis.dim(), basis.dim(), t)?.with_hermitian(true))
}

/// Number operator `dΓ_f(I)`.
pub fn number_operator(basis: &FermionBasis) -> SparseOperator {
    let diag: Vec<f64> = (0..basis.dim()).map(|i| basis.particle_number(i) as f64).collect();
    SparseOperator::from_real_diagonal(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, op_norm, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn vacuum_is_first_basis_vector() {
        let b = FermionBasis::new(1).unwrap();
        assert_eq!(vacuum(&b).as_slice(), &[c(1.0), c(0.0)]);
        let b3 = FermionBasis::new(3).unwrap();
        let v = vacuum(&b3);
        assert_eq!(v.dim(), 8);
        assert_eq!(v[0], c(1.0));
    }

    #[test]
    fn single_mode_creation_matrix() {
        let b = FermionBasis::new(1).unwrap();
        let cr = creation(&b, &[c(1.0)]).unwrap();
        assert_eq!(cr.to_dense(), vec![c(0.0), c(0.0), c(1.0), c(0.0)]);
    }

    #[test]
    fn annihilation_kills_vacuum() {
        let b = FermionBasis::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_vector(&mut rng, 4);
        let out = annihilation(&b, &f).unwrap().apply(&vacuum(&b));
        assert!(out.norm() < 1e-15);
    }

    #[test]
    fn two_mode_sign_string() {
        // Explicit 4x4 matrices in the basis |00>,|01>,|10>,|11> (bit 0 = mode 0).
        let b = FermionBasis::new(2).unwrap();
        let c1 = creation_mode(&b, 0);
        let c2 = creation_mode(&b, 1);
        let omega = vacuum(&b);
        let a = c2.apply(&c1.apply(&omega));
        let bb = c1.apply(&c2.apply(&omega));
        // B*(e2)B*(e1)Ω = -|11>, B*(e1)B*(e2)Ω = +|11>
        assert_eq!(a[3], c(-1.0));
        assert_eq!(bb[3], c(1.0));
        for i in 0..4 {
            assert!((a[i] + bb[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn car_relations() {
        let b = FermionBasis::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = random_vector(&mut rng, 4);
        let g = random_vector(&mut rng, 4);
        let bf = annihilation(&b, &f).unwrap();
        let bg = annihilation(&b, &g).unwrap();
        let bsg = creation(&b, &g).unwrap();
        let fg = inner(&f, &g);
        let id = SparseOperator::identity(b.dim()).scale(fg);
        assert!(bf.anticommutator(&bsg).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
        assert!(bf.anticommutator(&bg).unwrap().max_abs() < 1e-12);
        let bsf = creation(&b, &f).unwrap();
        assert!(bsf.anticommutator(&bsg).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn creation_norm_equals_vector_norm() {
        let b = FermionBasis::new(3).unwrap();
        let g: Vec<C64> = vec![c(0.3), C64::new(0.2, -0.4), c(0.0)];
        let expected = crate::linalg::norm(&g);
        let n = op_norm(&creation(&b, &g).unwrap(), 1e-12).unwrap();
        assert!((n - expected).abs() < 1e-9);
        let scaled: Vec<C64> = vec![c(0.7), c(0.0), c(0.0)];
        let n = op_norm(&annihilation(&b, &scaled).unwrap(), 1e-12).unwrap();
        assert!((n - 0.7).abs() < 1e-9);
    }

    #[test]
    fn dgamma_of_diagonal_is_occupation_sum() {
        let omegas = [0.5, 1.25, 2.0];
        let b = FermionBasis::new(3).unwrap();
        let dg = second_quantization_fermi(&b, &OneParticleOperator::diagonal(&omegas)).unwrap();
        assert!(dg.is_diagonal());
        for state in 0..8 {
            let oracle: f64 = (0..3)
                .filter(|j| state & (1 << j) != 0)
                .map(|j| omegas[j])
                .sum();
            assert!((dg.get(state, state).re - oracle).abs() < 1e-15);
        }
    }

    #[test]
    fn dgamma_identity_is_number_operator() {
        let b = FermionBasis::new(4).unwrap();
        let dg = second_quantization_fermi(&b, &OneParticleOperator::identity(4)).unwrap();
        assert!(dg.max_abs_diff(&number_operator(&b)).unwrap() < 1e-15);
        assert_eq!(dg.get(0, 0), c(0.0));
    }

    #[test]
    fn dgamma_matches_bilinear_sum() {
        let b = FermionBasis::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let raw = SparseOperator::from_dense(3, 3, &random_vector(&mut rng, 9)).unwrap();
        let x = OneParticleOperator::new(3, raw.symmetrized().unwrap().to_dense()).unwrap();
        let dg = second_quantization_fermi(&b, &x).unwrap();
        let mut acc = SparseOperator::zeros(8, 8);
        for j in 0..3 {
            for k in 0..3 {
                let term = creation_mode(&b, j).matmul(&creation_mode(&b, k).adjoint()).unwrap();
                acc = acc.add_scaled(&term, x.entry(j, k)).unwrap();
            }
        }
        assert!(dg.max_abs_diff(&acc).unwrap() < 1e-14);
        assert!(dg.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn mode_cap_enforced() {
        assert!(matches!(
            FermionBasis::new(15),
            Err(FockError::Capacity { .. })
        ));
        assert!(FermionBasis::with_cap(15, 16).is_ok());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let b = FermionBasis::new(3).unwrap();
        assert!(creation(&b, &[c(1.0)]).is_err());
        assert!(second_quantization_fermi(&b, &OneParticleOperator::identity(2)).is_err());
    }

    #[test]
    fn non_hermitian_one_particle_rejected() {
        let m = vec![c(0.0), c(1.0), c(0.0), c(0.0)];
        assert!(matches!(
            OneParticleOperator::new(2, m),
            Err(FockError::NotHermitian { .. })
        ));
    }

    #[test]
    fn disjoint_support_annihilation_vanishes() {
        // Ψ supported on modes {0,1}; h = e_n for n >= 2.
        let b = FermionBasis::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut psi = ComplexVector::zeros(b.dim());
        for state in 0..4usize {
            psi[state] = C64::new(rand::Rng::random::<f64>(&mut rng), 0.0);
        }
        let psi = psi.normalized();
        let phi = {
            let mut p = ComplexVector::zeros(b.dim());
            p[1] = c(1.0);
            p[2] = c(0.5);
            p.normalized()
        };
        for n in 2..6 {
            let e = ComplexVector::basis(6, n);
            assert_eq!(annihilation(&b, &e).unwrap().apply(&psi).norm(), 0.0);
            let bs = creation(&b, &e).unwrap().apply(&psi);
            assert_eq!(inner(&phi, &bs).norm(), 0.0);
        }
    }
}
