//! Gap above the ground state and Weyl probes at the bottom of the
//! essential spectrum across nested refinements, plus coupling sweeps.

use rayon::prelude::*;
use serde::Serialize;

use super::config::YukawaConfig;
use super::fields::{density_from, YukawaModel};
use super::interaction::{boson_factor, build_hamiltonian};
use crate::error::{FockError, Result};
use crate::linalg::{op_norm, LinearMap, SolverMethod};
use crate::weyl_probe::{
    refine_and_probe, ConvergenceTable, ProbeBranch, ProbeReport, RefinementLevel, WindowSelection,
};

/// Levels are merged below this eigenvalue distance when reading off the gap.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Allowed growth of the minimal residual from one level to the next.
pub const MONOTONE_TOL: f64 = 1e-6;
/// Tolerance on `gap = ν` for the free model.
pub const GAP_TOL: f64 = 1e-9;

/// A refinement level: the model and its probed system.
#[derive(Debug, Clone)]
pub struct HvzLevel {
    pub model: YukawaModel,
    pub level: RefinementLevel,
}

/// Rejects level sequences that are not refinements of one model.
pub fn check_nested_configs(configs: &[(String, YukawaConfig)]) -> Result<()> {
    let Some((_, first)) = configs.first() else {
        return Err(FockError::NotNested("no refinement levels".into()));
    };
    for (label, c) in configs {
        let same_model = c.fermion_mass == first.fermion_mass
            && c.boson_mass == first.boson_mass
            && c.kappa == first.kappa
            && c.cutoff == first.cutoff
            && c.spatial == first.spatial;
        if !same_model {
            return Err(FockError::NotNested(format!(
                "level {label} changes masses, coupling, cutoffs or spatial grid"
            )));
        }
    }
    for w in configs.windows(2) {
        let (la, a) = &w[0];
        let (lb, b) = &w[1];
        let fa = a.fermion_grid.build(&a.cutoff.dirac)?;
        let fb = b.fermion_grid.build(&b.cutoff.dirac)?;
        let ba = a.boson_grid.build(&a.cutoff.kg)?;
        let bb = b.boson_grid.build(&b.cutoff.kg)?;
        if !fa.is_subset_of(&fb) || !ba.is_subset_of(&bb) || b.n_max < a.n_max {
            return Err(FockError::NotNested(format!(
                "level {lb} does not contain the grids and occupancy cutoff of level {la}"
            )));
        }
    }
    Ok(())
}

/// Builds and solves every level (in parallel over levels).
pub fn build_levels(configs: &[(String, YukawaConfig)]) -> Result<Vec<HvzLevel>> {
    check_nested_configs(configs)?;
    configs
        .par_iter()
        .map(|(label, c)| {
            let model = YukawaModel::new(c)?;
            let system = build_hamiltonian(&model)?;
            let level = RefinementLevel::new(
                label.clone(),
                system,
                Some(boson_factor(&model)),
                c.probe.widths.clone(),
                c.probe.eps.clone(),
                c.solver.eigs,
                c.solver.tol,
            )?;
            Ok(HvzLevel { model, level })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapLevel {
    pub label: String,
    pub dim: usize,
    pub e0: f64,
    pub gap: Option<f64>,
    pub nu: f64,
    pub gap_over_nu: Option<f64>,
    pub method: SolverMethod,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub kappa: f64,
    pub nu: f64,
    pub levels: Vec<GapLevel>,
    pub tables: Vec<ConvergenceTable>,
    /// Every table non-increasing within [`MONOTONE_TOL`].
    pub monotone: bool,
    /// At `κ = 0`: the gap equals `ν` on every level within [`GAP_TOL`].
    pub free_gap_matches_nu: Option<bool>,
}

impl GapReport {
    pub fn passed(&self) -> bool {
        self.monotone && self.free_gap_matches_nu.unwrap_or(true)
    }
}

#[derive(Debug, Clone)]
pub struct HvzOutcome {
    pub report: GapReport,
    /// Probe reports per table, one per level.
    pub probes: Vec<Vec<ProbeReport>>,
}

/// Branches probing `λ`: fermionic when `λ` is a fermion dispersion value on
/// the grid, bosonic when it is a boson one (both when it is both).
pub fn branches_for(model: &YukawaModel, lambda: f64) -> Vec<ProbeBranch> {
    let hit = |v: f64| (v - lambda).abs() <= 1e-12 * lambda.abs().max(1.0);
    let mut out = Vec::new();
    if (0..model.n_p()).any(|p| hit(model.omega_fermion(p))) {
        out.push(ProbeBranch::Fermion);
    }
    if (0..model.n_k()).any(|k| hit(model.omega_boson(k))) {
        out.push(ProbeBranch::Boson);
    }
    out
}

/// Per level: ground energy, gap and the Weyl probes at every `λ`.
pub fn hvz_gap_probe(
    configs: &[(String, YukawaConfig)],
    lambdas: &[f64],
    selection: WindowSelection,
) -> Result<HvzOutcome> {
    let levels = build_levels(configs)?;
    hvz_on_levels(&levels, lambdas, selection)
}

pub fn hvz_on_levels(levels: &[HvzLevel], lambdas: &[f64], selection: WindowSelection) -> Result<HvzOutcome> {
    let first = &levels
        .first()
        .ok_or_else(|| FockError::NotNested("no refinement levels".into()))?
        .model;
    let nu = first.config().nu();
    let kappa = first.config().kappa;
    let mut jobs = Vec::new();
    for &lambda in lambdas {
        if lambda < nu - GAP_TOL {
            return Err(FockError::InvalidArgument(format!(
                "probe energy {lambda} lies below ν = {nu}"
            )));
        }
        let branches = branches_for(first, lambda);
        if branches.is_empty() {
            return Err(FockError::InvalidArgument(format!(
                "probe energy {lambda} is not a one-particle energy of the coarsest grid"
            )));
        }
        jobs.extend(branches.into_iter().map(|b| (lambda, b)));
    }
    let refinement: Vec<RefinementLevel> = levels.iter().map(|l| l.level.clone()).collect();
    let results: Vec<(ConvergenceTable, Vec<ProbeReport>)> = jobs
        .par_iter()
        .map(|&(lambda, branch)| refine_and_probe(&refinement, lambda, branch, selection))
        .collect::<Result<_>>()?;
    let gap_levels: Vec<GapLevel> = levels
        .iter()
        .map(|l| {
            let s = &l.level.spectrum;
            let gap = s.gap(DEGENERACY_TOL);
            GapLevel {
                label: l.level.label.clone(),
                dim: l.level.system.dim(),
                e0: s.ground_energy(),
                gap,
                nu,
                gap_over_nu: gap.map(|g| g / nu),
                method: s.method,
                max_residual: s.max_residual,
            }
        })
        .collect();
    let monotone = results.iter().all(|(t, _)| t.non_increasing(MONOTONE_TOL));
    let free_gap_matches_nu = (kappa == 0.0).then(|| {
        gap_levels
            .iter()
            .all(|g| g.gap.is_some_and(|v| (v - nu).abs() <= GAP_TOL))
    });
    let (tables, probes) = results.into_iter().unzip();
    Ok(HvzOutcome {
        report: GapReport {
            kappa,
            nu,
            levels: gap_levels,
            tables,
            monotone,
            free_gap_matches_nu,
        },
        probes,
    })
}

/// `Σ_x w_x |χ_I(x)| ‖ψ̄ψ(x)‖ ‖φ(x)‖ >= ‖H_I‖` on the truncated space.
pub fn interaction_norm_bound(model: &YukawaModel) -> Result<f64> {
    let sp = model.spatial();
    let mut total = 0.0;
    for (i, x) in sp.points.iter().enumerate() {
        let dens = density_from(&model.psi_fields(x)?)?;
        let phi = model.phi_field(x)?;
        total += sp.weights[i] * sp.chi[i].abs() * op_norm(&dens, 1e-12)? * op_norm(&phi, 1e-12)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub e0: f64,
    pub gap: Option<f64>,
    pub method: SolverMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub nu: f64,
    pub interaction_norm_bound: f64,
    pub rows: Vec<SweepRow>,
    /// `|E₀(κ') - E₀(κ)| <= ‖H_I‖ |κ' - κ|` between consecutive rows.
    pub continuous: bool,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        use crate::weyl_probe::fmt_f64;
        let mut s = String::from("kappa,e0,gap\n");
        for r in &self.rows {
            let gap = r.gap.map(fmt_f64).unwrap_or_default();
            s.push_str(&format!("{},{},{}\n", fmt_f64(r.kappa), fmt_f64(r.e0), gap));
        }
        s
    }
}

/// Ground energy and gap of `H_κ` over a list of couplings.
pub fn kappa_sweep(config: &YukawaConfig, kappas: &[f64]) -> Result<SweepReport> {
    if kappas.is_empty() {
        return Err(FockError::InvalidArgument("empty coupling list".into()));
    }
    let base = YukawaModel::new(&config.with_kappa(0.0))?;
    let bound = interaction_norm_bound(&base)?;
    let rows: Vec<SweepRow> = kappas
        .par_iter()
        .map(|&k| {
            let model = YukawaModel::new(&config.with_kappa(k))?;
            let sys = build_hamiltonian(&model)?;
            let count = config.solver.eigs.max(2).min(model.dim());
            let s = sys.low_spectrum(count, config.solver.tol)?;
            Ok(SweepRow {
                kappa: k,
                e0: s.ground_energy(),
                gap: s.gap(DEGENERACY_TOL),
                method: s.method,
            })
        })
        .collect::<Result<_>>()?;
    let continuous = rows.windows(2).all(|w| {
        let slack = 1e-9 * (1.0 + w[0].e0.abs());
        (w[1].e0 - w[0].e0).abs() <= bound * (w[1].kappa - w[0].kappa).abs() + slack
    });
    Ok(SweepReport {
        nu: config.nu(),
        interaction_norm_bound: bound,
        rows,
        continuous,
    })
}
