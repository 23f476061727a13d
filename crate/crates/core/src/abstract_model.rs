//! The abstract fermion-plus-environment system
//! `H = dΓ_f(K) ⊗ I + I ⊗ T + H_I` on `F_f ⊗ T`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};
use crate::fermion::{second_quantization_fermi, FermionBasis, OneParticleOperator};
use crate::linalg::{
    apply_left, apply_right, dense_cap, eig_dense, eig_diagonal, eig_low_with, inner, kron, norm, random_unit_vector,
    ComplexVector, KronSum, LanczosOptions, LinearMap, SparseOperator, Spectrum, C64,
};

/// Hermiticity tolerance for assembled operators.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Operator on the tensor space, either assembled or kept in factored form.
#[derive(Debug, Clone)]
pub enum TensorOperator {
    Sparse(SparseOperator),
    Kron(KronSum),
}

impl TensorOperator {
    pub fn to_sparse(&self) -> Result<SparseOperator> {
        match self {
            TensorOperator::Sparse(s) => Ok(s.clone()),
            TensorOperator::Kron(k) => k.to_sparse(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        match self {
            TensorOperator::Sparse(s) => TensorOperator::Sparse(s.scale(factor)),
            TensorOperator::Kron(k) => TensorOperator::Kron(k.scaled(factor)),
        }
    }

    /// Largest `|⟨x, Hy⟩ - conj⟨y, Hx⟩|` over a few random unit pairs,
    /// relative to `max(1, ‖Hx‖)`.
    pub fn sampled_hermiticity_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x = random_unit_vector(&mut rng, n);
            let y = random_unit_vector(&mut rng, n);
            let hx = self.apply(&x);
            let hy = self.apply(&y);
            let scale = hx.norm().max(1.0);
            worst = worst.max((inner(&x, &hy) - inner(&y, &hx).conj()).norm() / scale);
        }
        worst
    }
}

impl LinearMap for TensorOperator {
    fn dim(&self) -> usize {
        match self {
            TensorOperator::Sparse(s) => LinearMap::dim(s),
            TensorOperator::Kron(k) => k.dim(),
        }
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        match self {
            TensorOperator::Sparse(s) => s.apply_into(x, y),
            TensorOperator::Kron(k) => k.apply_into(x, y),
        }
    }
}

/// `H0 = dΓ_f(K) ⊗ I + I ⊗ T`; rejects `K` that is not strictly positive.
pub fn build_h0(
    basis: &FermionBasis,
    k: &OneParticleOperator,
    t_op: &SparseOperator,
) -> Result<SparseOperator> {
    k.require_strictly_positive()?;
    if !t_op.is_square() {
        return Err(FockError::DimensionMismatch {
            expected: t_op.rows(),
            got: t_op.cols(),
            context: "T operator must be square",
        });
    }
    let tol = HERMITIAN_TOL * t_op.max_abs().max(1.0);
    let defect = t_op.hermiticity_defect();
    if defect > tol {
        return Err(FockError::NotHermitian { defect, tol });
    }
    let dg = second_quantization_fermi(basis, k)?;
    let left = kron(&dg, &SparseOperator::identity(t_op.rows()))?;
    let right = kron(&SparseOperator::identity(basis.dim()), t_op)?;
    Ok(left.add(&right)?.with_hermitian(true))
}

#[derive(Debug, Clone)]
pub struct AbstractSystem {
    fermion_basis: FermionBasis,
    k: OneParticleOperator,
    t_op: SparseOperator,
    dgamma_k: SparseOperator,
    h0: SparseOperator,
    interaction: Option<TensorOperator>,
}

impl AbstractSystem {
    pub fn new(
        fermion_basis: FermionBasis,
        k: OneParticleOperator,
        t_op: SparseOperator,
        interaction: Option<TensorOperator>,
    ) -> Result<Self> {
        let h0 = build_h0(&fermion_basis, &k, &t_op)?;
        if let Some(hi) = &interaction {
            if hi.dim() != h0.rows() {
                return Err(FockError::DimensionMismatch {
                    expected: h0.rows(),
                    got: hi.dim(),
                    context: "interaction on the tensor space",
                });
            }
            let defect = match hi {
                TensorOperator::Sparse(s) => {
                    s.hermiticity_defect() / s.max_abs().max(1.0)
                }
                TensorOperator::Kron(_) => hi.sampled_hermiticity_defect(4, 0xA5),
            };
            if defect > HERMITIAN_TOL {
                return Err(FockError::NotHermitian {
                    defect,
                    tol: HERMITIAN_TOL,
                });
            }
        }
        let dgamma_k = second_quantization_fermi(&fermion_basis, &k)?;
        Ok(Self {
            fermion_basis,
            k,
            t_op,
            dgamma_k,
            h0,
            interaction,
        })
    }

    pub fn fermion_basis(&self) -> &FermionBasis {
        &self.fermion_basis
    }

    pub fn k(&self) -> &OneParticleOperator {
        &self.k
    }

    pub fn t_op(&self) -> &SparseOperator {
        &self.t_op
    }

    pub fn t_dim(&self) -> usize {
        self.t_op.rows()
    }

    pub fn fermion_dim(&self) -> usize {
        self.fermion_basis.dim()
    }

    pub fn dgamma_k(&self) -> &SparseOperator {
        &self.dgamma_k
    }

    pub fn h0(&self) -> &SparseOperator {
        &self.h0
    }

    pub fn interaction(&self) -> Option<&TensorOperator> {
        self.interaction.as_ref()
    }

    /// `H = H0 + H_I` assembled as one sparse matrix.
    pub fn hamiltonian(&self) -> Result<SparseOperator> {
        match &self.interaction {
            None => Ok(self.h0.clone()),
            Some(hi) => Ok(self.h0.add(&hi.to_sparse()?)?.symmetrized()?.with_hermitian(true)),
        }
    }

    /// `H_I x`, zero when there is no interaction.
    pub fn apply_interaction(&self, x: &[C64]) -> ComplexVector {
        match &self.interaction {
            None => ComplexVector::zeros(x.len()),
            Some(hi) => hi.apply(x),
        }
    }

    /// `(A ⊗ I) x` for a fermion-space operator `A`.
    pub fn apply_fermion(&self, op: &SparseOperator, x: &[C64]) -> ComplexVector {
        apply_left(op, self.t_dim(), x)
    }

    /// `A ⊗ I` assembled.
    pub fn lift_fermion(&self, op: &SparseOperator) -> Result<SparseOperator> {
        kron(op, &SparseOperator::identity(self.t_dim()))
    }

    /// `[H_I, A ⊗ I] x`
    pub fn interaction_commutator_apply(&self, op: &SparseOperator, x: &[C64]) -> ComplexVector {
        if self.interaction.is_none() {
            return ComplexVector::zeros(x.len());
        }
        let ax = self.apply_fermion(op, x);
        let hax = self.apply_interaction(&ax);
        let hx = self.apply_interaction(x);
        hax.sub(&self.apply_fermion(op, &hx))
    }

    /// `(I ⊗ W) x` for an operator `W` on the T factor.
    pub fn apply_env(&self, op: &SparseOperator, x: &[C64]) -> ComplexVector {
        apply_right(op, self.fermion_dim(), x)
    }

    /// `[H_I, I ⊗ W] x`
    pub fn interaction_env_commutator_apply(&self, op: &SparseOperator, x: &[C64]) -> ComplexVector {
        if self.interaction.is_none() {
            return ComplexVector::zeros(x.len());
        }
        let wx = self.apply_env(op, x);
        let hwx = self.apply_interaction(&wx);
        let hx = self.apply_interaction(x);
        hwx.sub(&self.apply_env(op, &hx))
    }

    /// `(H - s) x`
    pub fn apply_shifted(&self, s: f64, x: &[C64]) -> ComplexVector {
        let mut y = self.apply(x);
        y.axpy(C64::new(-s, 0.0), x);
        y
    }

    /// Lowest `count` eigenpairs: dense below the dense cap, Lanczos above it.
    pub fn low_spectrum(&self, count: usize, tol: f64) -> Result<Spectrum> {
        if self.interaction.is_none() && self.h0.is_diagonal() {
            return eig_diagonal(&self.h0, count);
        }
        if self.dim() <= dense_cap() {
            let mut s = eig_dense(&self.hamiltonian()?)?;
            let keep = count.min(s.len());
            s.eigenvalues.truncate(keep);
            if let Some(v) = s.eigenvectors.as_mut() {
                v.truncate(keep);
            }
            Ok(s)
        } else {
            eig_low_with(self, count, tol, &LanczosOptions::default())
        }
    }

    /// Full spectrum with eigenvectors (dense only).
    pub fn full_spectrum(&self) -> Result<Spectrum> {
        eig_dense(&self.hamiltonian()?)
    }
}

impl LinearMap for AbstractSystem {
    fn dim(&self) -> usize {
        self.h0.rows()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        self.h0.apply_into(x, y);
        if let Some(hi) = &self.interaction {
            let extra = hi.apply(x);
            for (o, e) in y.iter_mut().zip(extra.iter()) {
                *o += e;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeakCommutatorResult {
    pub z: SparseOperator,
    pub max_defect: f64,
}

/// `Z = XY - YX` together with the worst defect of
/// `⟨X†Φ, YΨ⟩ - ⟨Y†Φ, XΨ⟩ = ⟨Φ, ZΨ⟩` over random unit pairs.
pub fn weak_commutator(
    x: &SparseOperator,
    y: &SparseOperator,
    samples: usize,
    seed: u64,
) -> Result<WeakCommutatorResult> {
    let z = x.commutator(y)?;
    let xd = x.adjoint();
    let yd = y.adjoint();
    let n = x.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_defect: f64 = 0.0;
    for _ in 0..samples {
        let phi = random_unit_vector(&mut rng, n);
        let psi = random_unit_vector(&mut rng, n);
        let a = inner(&xd.apply(&phi), &y.apply(&psi));
        let b = inner(&yd.apply(&phi), &x.apply(&psi));
        let c = inner(&phi, &z.apply(&psi));
        max_defect = max_defect.max((a - b - c).norm());
    }
    Ok(WeakCommutatorResult { z, max_defect })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    /// `max_Ψ ‖[H_I, B(h_n)⊗I]Ψ‖`
    pub r: f64,
    /// `max_Ψ ‖[H_I, B*(h_n)⊗I]Ψ‖`
    pub r_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    /// Both columns are non-increasing along the family.
    pub monotone: bool,
}

impl DecayReport {
    pub fn max_r(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.r.max(r.r_star))
            .fold(0.0, f64::max)
    }
}

/// Commutator norms `‖[H_I, B(h_n)⊗I]Ψ‖` and `‖[H_I, B*(h_n)⊗I]Ψ‖` along a
/// family of normalized one-particle vectors.
pub fn check_a2_decay(
    system: &AbstractSystem,
    h_family: &[ComplexVector],
    psi_samples: &[ComplexVector],
) -> Result<DecayReport> {
    let basis = system.fermion_basis();
    let mut rows = Vec::with_capacity(h_family.len());
    for (n, h) in h_family.iter().enumerate() {
        let hn = norm(h);
        if (hn - 1.0).abs() > 1e-10 {
            return Err(FockError::NotNormalized { norm: hn });
        }
        let b = crate::fermion::annihilation(basis, h)?;
        let bs = crate::fermion::creation(basis, h)?;
        let mut r: f64 = 0.0;
        let mut r_star: f64 = 0.0;
        for psi in psi_samples {
            if psi.dim() != system.dim() {
                return Err(FockError::DimensionMismatch {
                    expected: system.dim(),
                    got: psi.dim(),
                    context: "decay sample state",
                });
            }
            r = r.max(system.interaction_commutator_apply(&b, psi).norm());
            r_star = r_star.max(system.interaction_commutator_apply(&bs, psi).norm());
        }
        rows.push(DecayRow { n, r, r_star });
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].r <= w[0].r + 1e-12 && w[1].r_star <= w[0].r_star + 1e-12);
    Ok(DecayReport { rows, monotone })
}
