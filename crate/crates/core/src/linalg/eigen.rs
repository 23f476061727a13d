use faer::{Mat, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{inner, norm, random_unit_vector, ComplexVector, LinearMap, SparseOperator, C64};
use crate::error::{FockError, Result};

pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Relative Hermiticity tolerance accepted by the solvers.
const HERMITIAN_TOL: f64 = 1e-12;

/// Dense-solver dimension cap, overridable with `FOCKBENCH_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("FOCKBENCH_DENSE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    Dense,
    Iterative,
}

/// Ascending eigenvalues with optional eigenvectors.
///
/// `residual_tol` is the guaranteed bound on `||M v - λ v||` for every stored
/// pair; `max_residual` is the largest residual actually measured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Option<Vec<ComplexVector>>,
    pub method: SolverMethod,
    pub residual_tol: f64,
    pub max_residual: f64,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Smallest eigenvalue difference above the ground energy exceeding `degeneracy_tol`.
    pub fn gap(&self, degeneracy_tol: f64) -> Option<f64> {
        let e0 = self.eigenvalues[0];
        self.eigenvalues
            .iter()
            .map(|e| e - e0)
            .find(|d| *d > degeneracy_tol)
    }
}

fn check_dense_input(m: &SparseOperator) -> Result<()> {
    if !m.is_square() {
        return Err(FockError::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
            context: "eigensolver requires a square operator",
        });
    }
    let cap = dense_cap();
    if m.rows() > cap {
        return Err(FockError::Capacity {
            what: "dense eigensolver dimension",
            requested: m.rows(),
            cap,
        });
    }
    let tol = HERMITIAN_TOL * m.max_abs().max(1.0);
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(FockError::NotHermitian { defect, tol });
    }
    Ok(())
}

fn to_faer(m: &SparseOperator) -> Mat<C64> {
    let n = m.rows();
    let mut a = Mat::<C64>::zeros(n, n);
    for (r, c, v) in m.triplets() {
        a[(r, c)] = v;
    }
    a
}

/// Full spectrum of a Hermitian operator with eigenvectors.
///
/// Exactly diagonal inputs are returned from their sorted diagonal.
pub fn eig_dense(m: &SparseOperator) -> Result<Spectrum> {
    check_dense_input(m)?;
    let n = m.rows();
    let (values, vectors) = if m.is_diagonal() {
        let diag = m.diagonal();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].re.total_cmp(&diag[b].re).then(a.cmp(&b)));
        let values = order.iter().map(|&i| diag[i].re).collect::<Vec<_>>();
        let vectors = order
            .iter()
            .map(|&i| ComplexVector::basis(n, i))
            .collect::<Vec<_>>();
        (values, vectors)
    } else {
        let evd = to_faer(m)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| FockError::InvalidArgument(format!("dense eigensolver failed: {e:?}")))?;
        let s = evd.S();
        let u = evd.U();
        let values = (0..n).map(|i| s[i].re).collect::<Vec<_>>();
        let vectors = (0..n)
            .map(|j| (0..n).map(|i| u[(i, j)]).collect::<ComplexVector>())
            .collect::<Vec<_>>();
        (values, vectors)
    };
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let max_residual = vectors
        .iter()
        .zip(&values)
        .map(|(v, &lam)| residual(m, lam, v))
        .fold(0.0, f64::max);
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: Some(vectors),
        method: SolverMethod::Dense,
        residual_tol: 1e-10 * scale,
        max_residual,
    })
}

/// Lowest `count` eigenpairs of an exactly diagonal operator, any dimension.
pub fn eig_diagonal(m: &SparseOperator, count: usize) -> Result<Spectrum> {
    if !m.is_square() || !m.is_diagonal() {
        return Err(FockError::InvalidArgument(
            "eig_diagonal needs a square diagonal operator".into(),
        ));
    }
    let n = m.rows();
    let diag = m.diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].re.total_cmp(&diag[b].re).then(a.cmp(&b)));
    order.truncate(count.min(n));
    let values: Vec<f64> = order.iter().map(|&i| diag[i].re).collect();
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    Ok(Spectrum {
        eigenvectors: Some(order.iter().map(|&i| ComplexVector::basis(n, i)).collect()),
        eigenvalues: values,
        method: SolverMethod::Dense,
        residual_tol: 1e-10 * scale,
        max_residual: 0.0,
    })
}

/// Eigenvalues only (no residual bookkeeping).
pub fn eigenvalues_dense(m: &SparseOperator) -> Result<Vec<f64>> {
    check_dense_input(m)?;
    if m.is_diagonal() {
        let mut d: Vec<f64> = m.diagonal().into_iter().map(|z| z.re).collect();
        d.sort_by(f64::total_cmp);
        return Ok(d);
    }
    let vals = to_faer(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| FockError::InvalidArgument(format!("dense eigensolver failed: {e:?}")))?;
    Ok(vals)
}

fn residual<M: LinearMap + ?Sized>(m: &M, lambda: f64, v: &[C64]) -> f64 {
    let mv = m.apply(v);
    mv.iter()
        .zip(v)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Largest Krylov basis per restart cycle.
    pub max_krylov: usize,
    /// Restart cycles allowed per eigenpair.
    pub max_restarts: usize,
    /// Ritz convergence is tested every `check_every` Lanczos steps.
    pub check_every: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_krylov: 160,
            max_restarts: 40,
            check_every: 8,
            seed: 0x5eed,
        }
    }
}

/// Lowest `k` eigenpairs of a Hermitian map, each with `||M v - λ v|| <= tol`.
pub fn eig_low<M: LinearMap + ?Sized>(m: &M, k: usize, tol: f64) -> Result<Spectrum> {
    eig_low_with(m, k, tol, &LanczosOptions::default())
}

/// Lanczos with full reorthogonalization and explicit locking: every cycle
/// converges the lowest eigenpair in the orthogonal complement of the pairs
/// already locked, so degenerate eigenvalues are recovered with multiplicity.
pub fn eig_low_with<M: LinearMap + ?Sized>(
    m: &M,
    k: usize,
    tol: f64,
    opts: &LanczosOptions,
) -> Result<Spectrum> {
    let n = m.dim();
    if k == 0 || k > n {
        return Err(FockError::InvalidArgument(format!(
            "requested {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let mut locked_vals: Vec<f64> = Vec::with_capacity(k);
    let mut locked_vecs: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut total_iterations = 0usize;

    for target in 0..k {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(target as u64));
        let mut start = random_unit_vector(&mut rng, n).into_inner();
        project_out(&mut start, &locked_vecs);
        if normalize(&mut start) == 0.0 {
            return Err(FockError::InvalidArgument(
                "start vector lies in the locked subspace".into(),
            ));
        }
        let mut best = f64::INFINITY;
        let mut found = None;
        for _cycle in 0..opts.max_restarts {
            let cycle = lanczos_cycle(m, &start, &locked_vecs, tol, opts);
            total_iterations += cycle.steps;
            if cycle.residual <= tol {
                found = Some((cycle.theta, cycle.vector));
                break;
            }
            best = best.min(cycle.residual);
            start = cycle.vector;
        }
        match found {
            Some((theta, vec)) => {
                locked_vals.push(theta);
                locked_vecs.push(vec);
            }
            None => {
                return Err(FockError::NonConvergence {
                    iterations: total_iterations,
                    achieved: best,
                    target: tol,
                })
            }
        }
    }

    // Each locked pair is the minimum over the complement of the previous
    // ones, so the order is ascending up to the residual tolerance.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| locked_vals[a].total_cmp(&locked_vals[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| locked_vals[i]).collect();
    let eigenvectors: Vec<ComplexVector> = order
        .iter()
        .map(|&i| ComplexVector::from(locked_vecs[i].clone()))
        .collect();
    let max_residual = eigenvectors
        .iter()
        .zip(&eigenvalues)
        .map(|(v, &l)| residual(m, l, v))
        .fold(0.0, f64::max);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
        method: SolverMethod::Iterative,
        residual_tol: tol,
        max_residual,
    })
}

struct CycleResult {
    theta: f64,
    vector: Vec<C64>,
    residual: f64,
    steps: usize,
}

fn project_out(v: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Lowest eigenpair of a real symmetric tridiagonal matrix.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .expect("tridiagonal eigenproblem converges");
    let s = evd.S();
    let u = evd.U();
    let mut best = 0;
    for i in 1..m {
        if s[i] < s[best] {
            best = i;
        }
    }
    (s[best], (0..m).map(|i| u[(i, best)]).collect())
}

fn lanczos_cycle<M: LinearMap + ?Sized>(
    m: &M,
    start: &[C64],
    locked: &[Vec<C64>],
    tol: f64,
    opts: &LanczosOptions,
) -> CycleResult {
    let n = m.dim();
    let limit = opts.max_krylov.min(n - locked.len()).max(1);
    let mut basis: Vec<Vec<C64>> = vec![start.to_vec()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut last = None;

    for j in 0..limit {
        m.apply_into(&basis[j], &mut w);
        project_out(&mut w, locked);
        let a = inner(&basis[j], &w).re;
        alpha.push(a);
        // Full reorthogonalization against the Krylov basis (twice is enough),
        // then against the locked vectors again: the basis sweep reintroduces
        // locked components that 1/beta would otherwise amplify step by step.
        project_out(&mut w, &basis);
        project_out(&mut w, locked);
        let b = norm(&w);
        let scale = alpha.iter().map(|x| x.abs()).fold(1.0, f64::max);
        let invariant = b <= 1e-13 * scale;
        let at_end = j + 1 == limit;
        if invariant || at_end || (j + 1) % opts.check_every == 0 {
            let (_, s) = tridiagonal_lowest(&alpha, &beta);
            let estimate = b * s[s.len() - 1].abs();
            if invariant || at_end || estimate <= tol {
                let mut y = vec![C64::new(0.0, 0.0); n];
                for (coef, v) in s.iter().zip(&basis) {
                    for (yi, vi) in y.iter_mut().zip(v) {
                        *yi += vi * *coef;
                    }
                }
                project_out(&mut y, locked);
                normalize(&mut y);
                let rq = inner(&y, &m.apply(&y)).re;
                let r = residual(m, rq, &y);
                let done = r <= tol || invariant || at_end;
                last = Some(CycleResult {
                    theta: rq,
                    vector: y,
                    residual: r,
                    steps: j + 1,
                });
                if done {
                    break;
                }
            }
        }
        if invariant || at_end {
            break;
        }
        beta.push(b);
        let next: Vec<C64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
    last.expect("at least one Ritz evaluation per cycle")
}

/// Spectral norm via power iteration on `M^dagger M`.
pub fn op_norm(m: &SparseOperator, tol: f64) -> Result<f64> {
    op_norm_with(m, tol, 20_000, 0xD0E5)
}

pub fn op_norm_with(m: &SparseOperator, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    if m.nnz() == 0 {
        return Ok(0.0);
    }
    let adj = m.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_unit_vector(&mut rng, m.cols()).into_inner();
    let mut rho = 0.0;
    for _ in 0..max_iter {
        let mv = m.apply(&v);
        let mut av = adj.apply(&mv).into_inner();
        rho = inner(&v, &av).re;
        let r = av
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * rho).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if rho <= 0.0 {
            return Ok(0.0);
        }
        if r <= tol * rho {
            return Ok(rho.sqrt());
        }
        normalize(&mut av);
        v = av;
    }
    Err(FockError::NormBracket {
        lower: rho.max(0.0).sqrt(),
        upper: m.norm_upper_bound(),
    })
}
