//! Field bounds, the relative bound of `H_I` and the commutator formulas.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fields::{YukawaModel, BETA_DIAG};
use super::interaction::{build_interaction, build_interaction_direct};
use crate::abstract_model::build_h0;
use crate::boson::{self, check_annihilation_bound, check_creation_bound, half_power_norm};
use crate::error::{FockError, Result};
use crate::linalg::{inner, kron, op_norm, LinearMap, SparseOperator, C64};
use crate::report::{random_state_on, BoundReport, DefectReport};

/// Tolerance on the commutator identities.
pub const COMMUTATOR_TOL: f64 = 1e-10;

/// `C_ψ = Σ_{l,l'} Σ_{s,s'} |β_{ll'}| (‖f_s^l‖+‖g_s^l‖)(‖f_{s'}^{l'}‖+‖g_{s'}^{l'}‖)`
pub fn density_constant(model: &YukawaModel) -> f64 {
    let n = model.norms();
    (0..4).map(|l| BETA_DIAG[l].abs() * n.psi_bound(l) * n.psi_bound(l)).sum()
}

/// Tensor-space columns whose boson factor lies below the occupancy cutoff.
pub fn sub_cutoff_columns(model: &YukawaModel) -> Vec<usize> {
    let sub = model.boson_basis().sub_cutoff_states();
    let bdim = model.boson_basis().dim();
    (0..model.fermion_basis().dim())
        .flat_map(|f| sub.iter().map(move |&b| f * bdim + b))
        .collect()
}

/// `‖ψ_l(x)‖ <= Σ_s(‖f_s^l‖+‖g_s^l‖)` and `‖ψ̄ψ(x)‖ <= C_ψ`, as operator norms at
/// every spatial point plus `samples` random fermion states per point.
pub fn psi_bound_report(model: &YukawaModel, samples: usize, seed: u64) -> Result<BoundReport> {
    let mut report = BoundReport::new("psi field and density norms");
    let c_psi = density_constant(model);
    let norms = model.norms();
    let dim = model.fermion_basis().dim();
    let all: Vec<usize> = (0..dim).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for x in &model.spatial().points {
        let psi = model.psi_fields(x)?;
        for (l, op) in psi.iter().enumerate() {
            report.push(op_norm(op, 1e-12)?, norms.psi_bound(l), None);
        }
        let dens = super::fields::density_from(&psi)?;
        report.push(op_norm(&dens, 1e-12)?, c_psi, None);
        for _ in 0..samples {
            let v = random_state_on(&mut rng, dim, &all);
            report.push(dens.apply(&v).norm(), c_psi, None);
        }
    }
    Ok(report)
}

/// `‖φ(x)Ψ‖ <= √2 ‖h/√ω_m‖ ‖H_KG^{1/2}Ψ‖ + ‖h‖‖Ψ‖/√2` on random sub-cutoff states,
/// `samples` per spatial point.
pub fn phi_bound_report(model: &YukawaModel, samples: usize, seed: u64) -> Result<BoundReport> {
    let mut report = BoundReport::new("phi field");
    let hkg = model.h_kg()?;
    let norms = model.norms();
    let sub = model.boson_basis().sub_cutoff_states();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for x in &model.spatial().points {
        let phi = model.phi_field(x)?;
        for _ in 0..samples {
            let v = random_state_on(&mut rng, model.boson_basis().dim(), &sub);
            let lhs = phi.apply(&v).norm();
            let rhs = 2f64.sqrt() * norms.h_over_sqrt_omega * half_power_norm(&hkg, &v)
                + norms.h * v.norm() / 2f64.sqrt();
            report.push(lhs, rhs, None);
        }
    }
    Ok(report)
}

/// Annihilation and creation bounds with `Y = ω_m` and `f = h_x` at every
/// spatial point.
pub fn ladder_bound_reports(model: &YukawaModel, samples: usize, seed: u64) -> Result<(BoundReport, BoundReport)> {
    let s = model.s_operator();
    let mut ann = BoundReport::new("annihilation with h_x");
    let mut cre = BoundReport::new("creation with h_x");
    for (i, x) in model.spatial().points.iter().enumerate() {
        let h = model.h_mode(x);
        let a = check_annihilation_bound(model.boson_basis(), &s, &h, samples, seed + i as u64)?;
        let c = check_creation_bound(model.boson_basis(), &s, &h, samples, seed + 1000 + i as u64)?;
        ann.samples.extend(a.samples);
        cre.samples.extend(c.samples);
    }
    Ok((ann, cre))
}

/// Constants of the relative bound at one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeBoundRow {
    pub eps: f64,
    /// `a(ε) = ε√2 C_ψ ‖χ_I‖₁ ‖h/√ω_m‖`
    pub a: f64,
    /// `b(ε) = C_ψ ‖χ_I‖₁ (‖h/√ω_m‖/(√2ε) + ‖h‖/√2)`
    pub b: f64,
    /// `ε√2 ‖χ_I‖₁ ‖h/ω_m‖`, the printed coefficient
    pub a_literal: f64,
    /// `‖χ_I‖₁ (‖h/ω_m‖/(√2ε) + ‖h‖/√2 + C_ψ)`, the printed constant
    pub b_literal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeBoundReport {
    pub chi_l1: f64,
    pub c_psi: f64,
    pub rows: Vec<RelativeBoundRow>,
    /// `‖H_I (Ω_f ⊗ Ω_b)‖`
    pub vacuum_lhs: f64,
    /// Asserted form.
    pub derived: BoundReport,
    /// Printed constants, reported only.
    pub literal: BoundReport,
}

impl RelativeBoundReport {
    pub fn passed(&self) -> bool {
        self.derived.passed()
    }
}

pub fn relative_bound_constants(model: &YukawaModel, eps: f64) -> RelativeBoundRow {
    let n = model.norms();
    let l1 = model.spatial().chi_l1();
    let c = density_constant(model);
    let r2 = 2f64.sqrt();
    RelativeBoundRow {
        eps,
        a: eps * r2 * c * l1 * n.h_over_sqrt_omega,
        b: c * l1 * (n.h_over_sqrt_omega / (r2 * eps) + n.h / r2),
        a_literal: eps * r2 * l1 * n.h_over_omega,
        b_literal: l1 * (n.h_over_omega / (r2 * eps) + n.h / r2 + c),
    }
}

/// `‖H_IΨ‖ <= a(ε)‖H_0Ψ‖ + b(ε)‖Ψ‖` on `samples` random sub-cutoff states for
/// every `ε`, with `H_I` at unit coupling. The vacuum is always included.
pub fn relative_bound_report(
    model: &YukawaModel,
    eps_list: &[f64],
    samples: usize,
    seed: u64,
) -> Result<RelativeBoundReport> {
    if eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(FockError::InvalidArgument("relative bound needs eps > 0".into()));
    }
    let hi = build_interaction(model)?;
    let h0 = build_h0(model.fermion_basis(), &model.k_operator(), &model.h_kg()?)?;
    let cols = sub_cutoff_columns(model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = vec![crate::linalg::ComplexVector::basis(model.dim(), 0)];
    for _ in 0..samples {
        states.push(random_state_on(&mut rng, model.dim(), &cols));
    }
    let measured: Vec<(f64, f64, f64)> = states
        .iter()
        .map(|v| (hi.apply(v).norm(), h0.apply(v).norm(), v.norm()))
        .collect();
    let rows: Vec<RelativeBoundRow> = eps_list.iter().map(|&e| relative_bound_constants(model, e)).collect();
    let mut derived = BoundReport::new("relative bound");
    let mut literal = BoundReport::new("relative bound, printed constants");
    for row in &rows {
        for &(lhs, h0n, n) in &measured {
            derived.push(lhs, row.a * h0n + row.b * n, Some(row.eps));
            literal.push(lhs, row.a_literal * h0n + row.b_literal * n, Some(row.eps));
        }
    }
    Ok(RelativeBoundReport {
        chi_l1: model.spatial().chi_l1(),
        c_psi: density_constant(model),
        rows,
        vacuum_lhs: measured[0].0,
        derived,
        literal,
    })
}

/// Test vectors for the commutator formulas: `ξ`, `η` on one fermion
/// channel, `ζ` on the boson modes.
#[derive(Debug, Clone)]
pub struct CommutatorProbe {
    pub xi: Vec<C64>,
    pub eta: Vec<C64>,
    pub zeta: Vec<C64>,
}

/// Builds both sides of every commutator formula and records the max
/// entrywise defect. Fermion-side identities for `ψ_l*ψ_{l'}` are checked on
/// the fermion space; `[H_I, ·]` identities on the tensor space (the boson
/// one on sub-cutoff columns only).
pub fn commutator_formula_check(model: &YukawaModel, probe: &CommutatorProbe) -> Result<DefectReport> {
    let n_p = model.n_p();
    for (v, what) in [(&probe.xi, "xi"), (&probe.eta, "eta")] {
        if v.len() != n_p {
            return Err(FockError::DimensionMismatch {
                expected: n_p,
                got: v.len(),
                context: if what == "xi" { "xi channel vector" } else { "eta channel vector" },
            });
        }
    }
    if probe.zeta.len() != model.n_k() {
        return Err(FockError::DimensionMismatch {
            expected: model.n_k(),
            got: probe.zeta.len(),
            context: "zeta boson vector",
        });
    }
    let mut report = DefectReport::new(COMMUTATOR_TOL);
    let fdim = model.fermion_basis().dim();
    let bdim = model.boson_basis().dim();
    let id_b = SparseOperator::identity(bdim);
    let id_f = SparseOperator::identity(fdim);
    let (xi, eta, zeta) = (&probe.xi, &probe.eta, &probe.zeta);
    let ops: Vec<[SparseOperator; 4]> = (0..2)
        .map(|s| -> Result<[SparseOperator; 4]> {
            Ok([model.b_op(s, xi)?, model.d_op(s, xi)?, model.b_dag(s, eta)?, model.d_dag(s, eta)?])
        })
        .collect::<Result<_>>()?;
    let spatial = model.spatial();
    let mut hi_rhs: Vec<[SparseOperator; 4]> = (0..2)
        .map(|_| std::array::from_fn(|_| SparseOperator::zeros(fdim * bdim, fdim * bdim)))
        .collect();
    let mut hia_rhs = SparseOperator::zeros(fdim * bdim, fdim * bdim);
    for (ix, x) in spatial.points.iter().enumerate() {
        let psi = model.psi_fields(x)?;
        let psi_dag: Vec<SparseOperator> = psi.iter().map(|p| p.adjoint()).collect();
        let phi = model.phi_field(x)?;
        let wchi = spatial.weights[ix] * spatial.chi[ix];
        for s in 0..2 {
            let ov_f: Vec<C64> = (0..4).map(|l| model.f_mode(l, s, x)).map(|f| inner(xi, &f)).collect();
            let ov_g: Vec<C64> = (0..4).map(|l| model.g_mode(l, s, x)).map(|g| inner(xi, &g)).collect();
            let fo_eta: Vec<C64> = (0..4).map(|l| inner(&model.f_mode(l, s, x), eta)).collect();
            let go_eta: Vec<C64> = (0..4).map(|l| inner(&model.g_mode(l, s, x), eta)).collect();
            // fermion-space identities for every pair (l, l')
            for l in 0..4 {
                for lp in 0..4 {
                    let pll = psi_dag[l].matmul(&psi[lp])?;
                    let checks = [
                        ("[ψ*ψ, b(ξ)]", &ops[s][0], psi[lp].scale(-ov_f[l])),
                        ("[ψ*ψ, d(ξ)]", &ops[s][1], psi_dag[l].scale(ov_g[lp])),
                        ("[ψ*ψ, b*(η)]", &ops[s][2], psi_dag[l].scale(fo_eta[lp])),
                        ("[ψ*ψ, d*(η)]", &ops[s][3], psi[lp].scale(-go_eta[l])),
                    ];
                    for (name, op, rhs) in checks {
                        let lhs = pll.commutator(op)?;
                        report.record(name, lhs.max_abs_diff(&rhs)?);
                    }
                }
            }
            // only diagonal β contributes to H_I
            for (l, &beta) in BETA_DIAG.iter().enumerate() {
                let c = C64::new(wchi * beta, 0.0);
                let terms = [
                    psi[l].scale(-ov_f[l] * c),
                    psi_dag[l].scale(ov_g[l] * c),
                    psi_dag[l].scale(fo_eta[l] * c),
                    psi[l].scale(-go_eta[l] * c),
                ];
                for (k, t) in terms.iter().enumerate() {
                    hi_rhs[s][k] = hi_rhs[s][k].add(&kron(t, &phi)?)?;
                }
            }
        }
        let dens = super::fields::density_from(&psi)?;
        let w = inner(&model.h_mode(x), zeta) * (wchi * std::f64::consts::FRAC_1_SQRT_2);
        hia_rhs = hia_rhs.add(&kron(&dens, &id_b)?.scale(w))?;
    }
    let hi = build_interaction_direct(model)?;
    let names = ["[H_I, b(ξ)]", "[H_I, d(ξ)]", "[H_I, b*(η)]", "[H_I, d*(η)]"];
    for s in 0..2 {
        for k in 0..4 {
            let lhs = hi.commutator(&kron(&ops[s][k], &id_b)?)?;
            report.record(names[k], lhs.max_abs_diff(&hi_rhs[s][k])?);
        }
    }
    let a_dag = boson::a_dag(model.boson_basis(), zeta)?;
    let lhs = hi.commutator(&kron(&id_f, &a_dag)?)?;
    report.record("[H_I, a*(ζ)]", lhs.max_abs_diff_on_columns(&hia_rhs, &sub_cutoff_columns(model))?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_vector;
    use crate::yukawa::config::YukawaConfig;
    use crate::yukawa::fields::tests::{tiny, TINY};

    fn small() -> YukawaModel {
        let mut c = YukawaConfig::from_toml_str(TINY).unwrap();
        c.n_max = 1;
        YukawaModel::new(&c).unwrap()
    }

    #[test]
    fn field_bounds_hold() {
        let m = tiny();
        assert!(psi_bound_report(&m, 20, 1).unwrap().passed());
        assert!(phi_bound_report(&m, 30, 2).unwrap().passed());
        let (a, c) = ladder_bound_reports(&m, 30, 3).unwrap();
        assert!(a.passed() && c.passed());
    }

    #[test]
    fn relative_bound_and_vacuum() {
        let m = small();
        let r = relative_bound_report(&m, &[1.0, 0.3, 0.1], 20, 5).unwrap();
        assert!(r.passed(), "min margin {}", r.derived.min_margin());
        assert!(r.vacuum_lhs > 0.0);
        for row in &r.rows {
            assert!(r.vacuum_lhs <= row.b + 1e-12);
        }
        for w in r.rows.windows(2) {
            assert!(w[1].a < w[0].a && w[1].b > w[0].b);
        }
    }

    #[test]
    fn commutator_formulas_small() {
        let m = small();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let probe = CommutatorProbe {
            xi: random_vector(&mut rng, m.n_p()).into_inner(),
            eta: random_vector(&mut rng, m.n_p()).into_inner(),
            zeta: random_vector(&mut rng, m.n_k()).into_inner(),
        };
        let r = commutator_formula_check(&m, &probe).unwrap();
        assert_eq!(r.entries.len(), 9);
        assert!(r.passed(), "{:?}", r.entries);
    }

    #[test]
    fn orthogonal_xi_commutes() {
        // χ_D vanishes on the grid, so every ξ is orthogonal to all f columns
        let mut c = YukawaConfig::from_toml_str(TINY).unwrap();
        c.n_max = 1;
        c.cutoff.dirac = crate::yukawa::Profile::Sharp { lambda: 0.1 };
        let m = YukawaModel::new(&c).unwrap();
        let hi = build_interaction_direct(&m).unwrap();
        let b = m.b_op(0, &[C64::new(1.0, 0.0), C64::new(0.0, 2.0)]).unwrap();
        let comm = hi.commutator(&kron(&b, &SparseOperator::identity(m.boson_basis().dim())).unwrap()).unwrap();
        assert_eq!(comm.max_abs(), 0.0);
    }

    #[test]
    fn channel_mismatch_rejected() {
        let m = small();
        let probe = CommutatorProbe {
            xi: vec![C64::new(1.0, 0.0); 3],
            eta: vec![C64::new(1.0, 0.0); 2],
            zeta: vec![C64::new(1.0, 0.0); 2],
        };
        assert!(matches!(
            commutator_formula_check(&m, &probe),
            Err(FockError::DimensionMismatch { .. })
        ));
    }
}
