//! Weyl trial states for the bottom of the essential spectrum.
//!
//! For a window vector `Ξ` near the ground energy `E0` and a one-particle
//! vector `h` with `‖(K - λ)h‖` small, the fermionic trial state is
//! `Ψ = ((B(h) + B*(h)) ⊗ I) Ξ`. Pulling `H` through the creation and
//! annihilation parts gives the exact identity
//!
//! ```text
//! (H - E0 - λ)Ψ = (B + B*)(H - E0)Ξ + B*((K-λ)h)Ξ - B((K+λ)h)Ξ
//!                 + [H_I, B(h) ⊗ I]Ξ + [H_I, B*(h) ⊗ I]Ξ
//! ```
//!
//! which is replayed term by term in every [`ProbeRow`]. The bosonic
//! variant uses `Ψ = (I ⊗ (A(f) + A*(f))) Ξ` with the one-boson operator `S`
//! in place of `K`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abstract_model::AbstractSystem;
use crate::boson::{a_dag, a_op, BosonBasis};
use crate::error::{FockError, Result};
use crate::fermion::{annihilation, creation, OneParticleOperator};
use crate::linalg::{
    eig_dense, inner, norm, random_vector, ComplexVector, LinearMap, SparseOperator, Spectrum, C64,
};

/// Slack allowed on every inequality of the chain.
pub const CHAIN_TOL: f64 = 1e-9;
/// Allowed deviation of a fermionic trial-state norm from one.
pub const NORM_TOL: f64 = 1e-10;

/// How a vector is picked from a (possibly degenerate) spectral window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowSelection {
    /// The lowest eigenvector.
    Ground,
    /// A seeded random unit combination of all eigenvectors inside the window.
    Seeded(u64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralWindowVector {
    #[serde(skip)]
    pub vector: ComplexVector,
    pub eps: f64,
    pub e0: f64,
    pub energies_used: Vec<f64>,
    pub selection: WindowSelection,
}

/// Unit vector in the span of eigenvectors with eigenvalue in `[E0, E0 + eps)`.
pub fn spectral_window_from(
    spectrum: &Spectrum,
    eps: f64,
    selection: WindowSelection,
) -> Result<SpectralWindowVector> {
    if !(eps > 0.0) {
        return Err(FockError::InvalidArgument(format!(
            "window width must be positive, got {eps}"
        )));
    }
    let vectors = spectrum.eigenvectors.as_ref().ok_or_else(|| {
        FockError::InvalidArgument("spectral window needs eigenvectors".into())
    })?;
    let e0 = spectrum.ground_energy();
    let inside: Vec<usize> = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .take(vectors.len())
        .filter(|(_, &e)| e < e0 + eps)
        .map(|(i, _)| i)
        .collect();
    let (vector, energies_used) = match selection {
        WindowSelection::Ground => (vectors[0].clone(), vec![e0]),
        WindowSelection::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coefs = random_vector(&mut rng, inside.len());
            let mut v = ComplexVector::zeros(vectors[0].dim());
            for (c, &i) in coefs.iter().zip(&inside) {
                v.axpy(*c, &vectors[i]);
            }
            let energies = inside.iter().map(|&i| spectrum.eigenvalues[i]).collect();
            (v.normalized(), energies)
        }
    };
    Ok(SpectralWindowVector {
        vector,
        eps,
        e0,
        energies_used,
        selection,
    })
}

/// Dense convenience wrapper around [`spectral_window_from`].
pub fn spectral_window(
    h: &SparseOperator,
    eps: f64,
    selection: WindowSelection,
) -> Result<SpectralWindowVector> {
    spectral_window_from(&eig_dense(h)?, eps, selection)
}

fn require_unit(h: &[C64]) -> Result<()> {
    let n = norm(h);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(FockError::NotNormalized { norm: n });
    }
    Ok(())
}

/// `((B(h) + B*(h)) ⊗ I) Ξ`
pub fn trial_state(
    system: &AbstractSystem,
    h: &[C64],
    window: &SpectralWindowVector,
) -> Result<ComplexVector> {
    require_unit(h)?;
    let basis = system.fermion_basis();
    let op = annihilation(basis, h)?.add(&creation(basis, h)?)?;
    Ok(system.apply_fermion(&op, &window.vector))
}

/// `(I ⊗ (A(f) + A*(f))) Ξ`
pub fn boson_trial_state(
    system: &AbstractSystem,
    boson: &BosonBasis,
    f: &[C64],
    window: &SpectralWindowVector,
) -> Result<ComplexVector> {
    check_boson_factor(system, boson)?;
    let op = a_op(boson, f)?.add(&a_dag(boson, f)?)?;
    Ok(system.apply_env(&op, &window.vector))
}

/// Normalized packets `h ∝ Σ_i exp(-(μ_i - λ)² / 2σ²) v_i` over the
/// eigenpairs `(μ_i, v_i)` of `x`, one per width.
pub fn gaussian_packets(
    x: &OneParticleOperator,
    lambda: f64,
    widths: &[f64],
) -> Result<Vec<ComplexVector>> {
    if widths.is_empty() {
        return Err(FockError::InvalidArgument("empty packet width list".into()));
    }
    let (values, vectors) = x.eigen();
    let nearest = values
        .iter()
        .map(|v| (v - lambda).abs())
        .fold(f64::INFINITY, f64::min);
    widths
        .iter()
        .map(|&sigma| {
            if !(sigma > 0.0) {
                return Err(FockError::InvalidArgument(format!(
                    "packet width must be positive, got {sigma}"
                )));
            }
            let mut h = ComplexVector::zeros(x.dim());
            for (mu, v) in values.iter().zip(&vectors) {
                // offset by the nearest level so the peak weight is exactly one
                let d = (mu - lambda).abs();
                let w = (-(d * d - nearest * nearest) / (2.0 * sigma * sigma)).exp();
                h.axpy(C64::new(w, 0.0), v);
            }
            Ok(h.normalized())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeBranch {
    Fermion,
    Boson,
}

/// One `(n, ε)` evaluation of the inequality chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub lambda: f64,
    pub n: usize,
    pub eps: f64,
    pub residual: f64,
    pub term_eps: f64,
    #[serde(rename = "term_K")]
    pub term_k: f64,
    #[serde(rename = "term_B")]
    pub term_b: f64,
    pub bound: f64,
    pub norm_check: f64,
    #[serde(rename = "term_I")]
    pub term_i: f64,
    /// `‖C (H - E0) Ξ‖` with `C` the trial-state operator.
    pub chain_a: f64,
    /// `‖B*((K-λ)h)Ξ‖` (bosonic: `‖A*((S-λ)f)Ξ‖`).
    pub chain_b: f64,
    /// `‖B((K+λ)h)Ξ‖` (bosonic: `‖A((S+λ)f)Ξ‖`).
    pub chain_c: f64,
    /// Right-hand side of the `chain_c` estimate.
    pub chain_c_bound: f64,
    /// `‖(H - E0)Ξ‖`
    pub window_residual: f64,
    /// `‖(K-λ)h‖` (bosonic: `‖(S-λ)f‖`).
    pub detuning: f64,
    pub h_norm: f64,
    /// Bound without the interaction commutators.
    pub bound_literal: f64,
    /// Norm of the difference between the residual vector and its term-by-term expansion.
    pub decomposition_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_predicted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_defect: Option<f64>,
}

impl ProbeRow {
    pub fn normalized_residual(&self) -> f64 {
        if self.norm_check > 0.0 {
            self.residual / self.norm_check
        } else {
            0.0
        }
    }
}

/// Smallest `rhs - lhs` of each inequality over the rows of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSlack {
    /// `max |‖Ψ‖ - 1|` (fermionic) or `max |‖Ψ‖ - predicted|` on defect-free rows (bosonic).
    pub norm_defect: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub abc: f64,
    pub bound: f64,
    pub literal: f64,
}

impl ChainSlack {
    pub fn holds(&self, tol: f64) -> bool {
        self.a >= -tol && self.b >= -tol && self.c >= -tol && self.abc >= -tol && self.bound >= -tol
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub lambda: f64,
    pub branch: ProbeBranch,
    pub e0: f64,
    pub selection: WindowSelection,
    pub rows: Vec<ProbeRow>,
    pub warnings: Vec<String>,
}

pub const CSV_HEADER: &str =
    "lambda,n,eps,residual,term_eps,term_K,term_B,bound,norm_check,term_I";

/// Full-precision float formatting used by every CSV writer (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ProbeRow {
    pub fn csv_fields(&self) -> String {
        [
            fmt_f64(self.lambda),
            self.n.to_string(),
            fmt_f64(self.eps),
            fmt_f64(self.residual),
            fmt_f64(self.term_eps),
            fmt_f64(self.term_k),
            fmt_f64(self.term_b),
            fmt_f64(self.bound),
            fmt_f64(self.norm_check),
            fmt_f64(self.term_i),
        ]
        .join(",")
    }
}

impl ProbeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_fields());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn slack(&self) -> ChainSlack {
        let mut s = ChainSlack {
            norm_defect: 0.0,
            a: f64::INFINITY,
            b: f64::INFINITY,
            c: f64::INFINITY,
            abc: f64::INFINITY,
            bound: f64::INFINITY,
            literal: f64::INFINITY,
        };
        for r in &self.rows {
            let norm_defect = match (self.branch, r.norm_predicted, r.truncation_defect) {
                (ProbeBranch::Fermion, _, _) => (r.norm_check - 1.0).abs(),
                (ProbeBranch::Boson, Some(p), Some(d)) if d == 0.0 => (r.norm_check - p).abs(),
                _ => 0.0,
            };
            s.norm_defect = s.norm_defect.max(norm_defect);
            s.a = s.a.min(r.term_eps - r.chain_a);
            s.b = s.b.min(match self.branch {
                ProbeBranch::Fermion => r.detuning - r.chain_b,
                ProbeBranch::Boson => r.term_k - r.chain_b,
            });
            s.c = s.c.min(r.chain_c_bound - r.chain_c);
            s.abc = s.abc.min(r.chain_a + r.chain_b + r.chain_c + r.term_i - r.residual);
            s.bound = s.bound.min(r.bound - r.residual);
            s.literal = s.literal.min(r.bound_literal - r.residual);
        }
        s
    }

    /// Rows whose residual exceeds the bound by more than `tol`.
    pub fn violations(&self, tol: f64) -> usize {
        self.rows
            .iter()
            .filter(|r| r.residual > r.bound + tol)
            .count()
    }

    /// Whether, for each `ε`, the residual does not grow along the family and,
    /// for each `n`, does not grow as `ε` shrinks.
    pub fn refinement_monotone(&self) -> bool {
        let tol = 1e-12;
        let mut eps: Vec<f64> = self.rows.iter().map(|r| r.eps).collect();
        eps.sort_by(|a, b| b.total_cmp(a));
        eps.dedup();
        let ns = self.rows.iter().map(|r| r.n).max().map_or(0, |m| m + 1);
        let get = |n: usize, e: f64| {
            self.rows
                .iter()
                .find(|r| r.n == n && r.eps == e)
                .map(|r| r.normalized_residual())
        };
        for &e in &eps {
            for n in 1..ns {
                if let (Some(a), Some(b)) = (get(n - 1, e), get(n, e)) {
                    if b > a + tol {
                        return false;
                    }
                }
            }
        }
        for n in 0..ns {
            for w in eps.windows(2) {
                if let (Some(a), Some(b)) = (get(n, w[0]), get(n, w[1])) {
                    if b > a + tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn min_normalized_residual(&self) -> Option<&ProbeRow> {
        self.rows
            .iter()
            .min_by(|a, b| a.normalized_residual().total_cmp(&b.normalized_residual()))
    }
}

fn fermion_row(
    system: &AbstractSystem,
    window: &SpectralWindowVector,
    lambda: f64,
    n: usize,
    h: &[C64],
) -> Result<ProbeRow> {
    require_unit(h)?;
    let basis = system.fermion_basis();
    let xi = &window.vector;
    let e0 = window.e0;
    let b = annihilation(basis, h)?;
    let bs = creation(basis, h)?;
    let c_op = b.add(&bs)?;
    let psi = system.apply_fermion(&c_op, xi);
    let residual_vec = system.apply_shifted(e0 + lambda, &psi);

    let hxi = system.apply_shifted(e0, xi);
    let kminus = system.k().shifted(lambda).apply(h);
    let kplus = system.k().shifted(-lambda).apply(h);
    let a_vec = system.apply_fermion(&c_op, &hxi);
    let b_vec = system.apply_fermion(&creation(basis, &kminus)?, xi);
    let c_vec = system.apply_fermion(&annihilation(basis, &kplus)?, xi);
    let ib = system.interaction_commutator_apply(&b, xi);
    let ibs = system.interaction_commutator_apply(&bs, xi);
    let bxi = system.apply_fermion(&b, xi).norm();

    let mut expansion = a_vec.add(&b_vec).sub(&c_vec).add(&ib);
    expansion.axpy(C64::new(1.0, 0.0), &ibs);

    let h_norm = norm(h);
    let detuning = kminus.norm();
    let term_eps = 2.0 * window.eps;
    let term_k = 2.0 * detuning;
    let term_b = 2.0 * lambda.abs() * bxi;
    let term_i = ib.norm() + ibs.norm();
    let bound_literal = term_eps + term_k + term_b;
    Ok(ProbeRow {
        lambda,
        n,
        eps: window.eps,
        residual: residual_vec.norm(),
        term_eps,
        term_k,
        term_b,
        bound: bound_literal + term_i,
        norm_check: psi.norm(),
        term_i,
        chain_a: a_vec.norm(),
        chain_b: b_vec.norm(),
        chain_c: c_vec.norm(),
        chain_c_bound: detuning + term_b,
        window_residual: hxi.norm(),
        detuning,
        h_norm,
        bound_literal,
        decomposition_defect: residual_vec.sub(&expansion).norm(),
        norm_predicted: None,
        truncation_defect: None,
    })
}

fn check_boson_factor(system: &AbstractSystem, boson: &BosonBasis) -> Result<()> {
    if system.t_dim() != boson.dim() {
        return Err(FockError::DimensionMismatch {
            expected: system.t_dim(),
            got: boson.dim(),
            context: "boson basis must span the T factor",
        });
    }
    Ok(())
}

/// Weight of `Ξ` on boson states at the occupancy cutoff.
pub fn top_sector_weight(system: &AbstractSystem, boson: &BosonBasis, xi: &[C64]) -> f64 {
    let top = boson.top_sector();
    let t = system.t_dim();
    (0..system.fermion_dim())
        .map(|fi| top.iter().map(|&bi| xi[fi * t + bi].norm_sqr()).sum::<f64>())
        .sum()
}

fn boson_row(
    system: &AbstractSystem,
    boson: &BosonBasis,
    s: &OneParticleOperator,
    window: &SpectralWindowVector,
    lambda: f64,
    n: usize,
    f: &[C64],
) -> Result<ProbeRow> {
    let xi = &window.vector;
    let e0 = window.e0;
    let a = a_op(boson, f)?;
    let ad = a_dag(boson, f)?;
    let c_op = a.add(&ad)?;
    let psi = system.apply_env(&c_op, xi);
    let residual_vec = system.apply_shifted(e0 + lambda, &psi);

    let hxi = system.apply_shifted(e0, xi);
    let sminus = s.shifted(lambda).apply(f);
    let splus = s.shifted(-lambda).apply(f);
    let a_vec = system.apply_env(&c_op, &hxi);
    let b_vec = system.apply_env(&a_dag(boson, &sminus)?, xi);
    let c_vec = system.apply_env(&a_op(boson, &splus)?, xi);
    let ic = system.interaction_env_commutator_apply(&c_op, xi);
    let axi = system.apply_env(&a, xi);
    let a_minus = system.apply_env(&a_op(boson, &sminus)?, xi).norm();

    let expansion = a_vec.add(&b_vec).sub(&c_vec).add(&ic);

    let term_eps = a_vec.norm();
    let term_k = b_vec.norm() + a_minus;
    let term_b = 2.0 * lambda.abs() * axi.norm();
    let term_i = ic.norm();
    let bound_literal = term_eps + term_k + term_b;
    let aa = system.apply_env(&a, &axi);
    let f2 = norm(f).powi(2) * norm(xi).powi(2);
    let predicted = (f2 + 2.0 * inner(xi, &aa).re + 2.0 * axi.norm().powi(2)).max(0.0).sqrt();
    Ok(ProbeRow {
        lambda,
        n,
        eps: window.eps,
        residual: residual_vec.norm(),
        term_eps,
        term_k,
        term_b,
        bound: bound_literal + term_i,
        norm_check: psi.norm(),
        term_i,
        chain_a: a_vec.norm(),
        chain_b: b_vec.norm(),
        chain_c: c_vec.norm(),
        chain_c_bound: a_minus + term_b,
        window_residual: hxi.norm(),
        detuning: sminus.norm(),
        h_norm: norm(f),
        bound_literal,
        decomposition_defect: residual_vec.sub(&expansion).norm(),
        norm_predicted: Some(predicted),
        truncation_defect: Some(top_sector_weight(system, boson, xi)),
    })
}

fn windows_for(
    spectrum: &Spectrum,
    eps_list: &[f64],
    selection: WindowSelection,
) -> Result<Vec<SpectralWindowVector>> {
    if eps_list.is_empty() {
        return Err(FockError::InvalidArgument("empty eps list".into()));
    }
    eps_list
        .iter()
        .map(|&e| spectral_window_from(spectrum, e, selection))
        .collect()
}

/// Fermionic probe over every `(h_n, ε)` pair.
pub fn probe_lambda(
    system: &AbstractSystem,
    spectrum: &Spectrum,
    lambda: f64,
    h_family: &[ComplexVector],
    eps_list: &[f64],
    selection: WindowSelection,
) -> Result<ProbeReport> {
    if h_family.is_empty() {
        return Err(FockError::InvalidArgument("empty h family".into()));
    }
    let windows = windows_for(spectrum, eps_list, selection)?;
    let pairs: Vec<(usize, usize)> = (0..h_family.len())
        .flat_map(|n| (0..windows.len()).map(move |e| (n, e)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(n, e)| fermion_row(system, &windows[e], lambda, n, &h_family[n]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport {
        lambda,
        branch: ProbeBranch::Fermion,
        e0: spectrum.ground_energy(),
        selection,
        rows,
        warnings: Vec::new(),
    })
}

/// Bosonic probe with trial states `(I ⊗ (A(f) + A*(f)))Ξ`; `s` is the
/// one-boson operator whose second quantization is the boson part of `T`.
pub fn probe_lambda_boson(
    system: &AbstractSystem,
    spectrum: &Spectrum,
    boson: &BosonBasis,
    s: &OneParticleOperator,
    lambda: f64,
    f_family: &[ComplexVector],
    eps_list: &[f64],
    selection: WindowSelection,
) -> Result<ProbeReport> {
    check_boson_factor(system, boson)?;
    if f_family.is_empty() {
        return Err(FockError::InvalidArgument("empty f family".into()));
    }
    if s.dim() != boson.modes() {
        return Err(FockError::DimensionMismatch {
            expected: boson.modes(),
            got: s.dim(),
            context: "one-boson operator",
        });
    }
    let windows = windows_for(spectrum, eps_list, selection)?;
    let pairs: Vec<(usize, usize)> = (0..f_family.len())
        .flat_map(|n| (0..windows.len()).map(move |e| (n, e)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(n, e)| boson_row(system, boson, s, &windows[e], lambda, n, &f_family[n]))
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    let worst = rows
        .iter()
        .filter_map(|r| r.truncation_defect)
        .fold(0.0, f64::max);
    if worst > 0.0 {
        warnings.push(format!(
            "window vector carries weight {worst:.3e} at the occupancy cutoff; CCR norm prediction is inexact"
        ));
    }
    Ok(ProbeReport {
        lambda,
        branch: ProbeBranch::Boson,
        e0: spectrum.ground_energy(),
        selection,
        rows,
        warnings,
    })
}

/// Boson factor of a refinement level: basis plus one-boson operator.
#[derive(Debug, Clone)]
pub struct BosonFactor {
    pub basis: BosonBasis,
    pub s: OneParticleOperator,
}

/// One refinement level with its precomputed low spectrum.
#[derive(Debug, Clone)]
pub struct RefinementLevel {
    pub label: String,
    pub system: AbstractSystem,
    pub boson: Option<BosonFactor>,
    pub widths: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub spectrum: Spectrum,
}

impl RefinementLevel {
    /// Solves for the lowest `window_count` eigenpairs (dense or Lanczos).
    pub fn new(
        label: impl Into<String>,
        system: AbstractSystem,
        boson: Option<BosonFactor>,
        widths: Vec<f64>,
        eps_list: Vec<f64>,
        window_count: usize,
        tol: f64,
    ) -> Result<Self> {
        let count = window_count.min(system.dim());
        let spectrum = system.low_spectrum(count, tol)?;
        Ok(Self {
            label: label.into(),
            system,
            boson,
            widths,
            eps_list,
            spectrum,
        })
    }

    pub fn probe(
        &self,
        lambda: f64,
        branch: ProbeBranch,
        selection: WindowSelection,
    ) -> Result<ProbeReport> {
        match branch {
            ProbeBranch::Fermion => {
                let family = gaussian_packets(self.system.k(), lambda, &self.widths)?;
                probe_lambda(&self.system, &self.spectrum, lambda, &family, &self.eps_list, selection)
            }
            ProbeBranch::Boson => {
                let bf = self.boson.as_ref().ok_or_else(|| {
                    FockError::InvalidArgument(format!(
                        "level {} has no boson factor for the bosonic probe",
                        self.label
                    ))
                })?;
                let family = gaussian_packets(&bf.s, lambda, &self.widths)?;
                probe_lambda_boson(
                    &self.system,
                    &self.spectrum,
                    &bf.basis,
                    &bf.s,
                    lambda,
                    &family,
                    &self.eps_list,
                    selection,
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub label: String,
    pub dim: usize,
    pub e0: f64,
    pub min_residual: f64,
    pub min_normalized_residual: f64,
    pub argmin_n: usize,
    pub argmin_eps: f64,
    pub min_term_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub lambda: f64,
    pub branch: ProbeBranch,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Minimal normalized residual never grows by more than `tol` from one level to the next.
    pub fn non_increasing(&self, tol: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].min_normalized_residual <= w[0].min_normalized_residual + tol)
    }
}

/// Levels must grow monotonically in both factors and strictly in total dimension.
pub fn check_nested(levels: &[RefinementLevel]) -> Result<()> {
    if levels.is_empty() {
        return Err(FockError::NotNested("no refinement levels".into()));
    }
    for (i, w) in levels.windows(2).enumerate() {
        let (a, b) = (&w[0].system, &w[1].system);
        let grows = b.fermion_basis().modes() >= a.fermion_basis().modes()
            && b.t_dim() >= a.t_dim()
            && b.dim() > a.dim();
        if !grows {
            return Err(FockError::NotNested(format!(
                "level {} ({} modes, T dim {}) does not refine level {} ({} modes, T dim {})",
                i + 1,
                b.fermion_basis().modes(),
                b.t_dim(),
                i,
                a.fermion_basis().modes(),
                a.t_dim()
            )));
        }
    }
    Ok(())
}

/// Probes `λ` on every level and tabulates the best residual per level.
pub fn refine_and_probe(
    levels: &[RefinementLevel],
    lambda: f64,
    branch: ProbeBranch,
    selection: WindowSelection,
) -> Result<(ConvergenceTable, Vec<ProbeReport>)> {
    check_nested(levels)?;
    let mut rows = Vec::with_capacity(levels.len());
    let mut reports = Vec::with_capacity(levels.len());
    for (i, level) in levels.iter().enumerate() {
        let report = level.probe(lambda, branch, selection)?;
        let best = report
            .min_normalized_residual()
            .expect("non-empty report")
            .clone();
        let min_term_b = report.rows.iter().map(|r| r.term_b).fold(f64::INFINITY, f64::min);
        rows.push(ConvergenceRow {
            level: i,
            label: level.label.clone(),
            dim: level.system.dim(),
            e0: level.spectrum.ground_energy(),
            min_residual: report.rows.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min),
            min_normalized_residual: best.normalized_residual(),
            argmin_n: best.n,
            argmin_eps: best.eps,
            min_term_b,
        });
        reports.push(report);
    }
    Ok((
        ConvergenceTable {
            lambda,
            branch,
            rows,
        },
        reports,
    ))
}
