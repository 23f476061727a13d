//! Named verification suites over the operator identities and bounds.

use std::ops::RangeInclusive;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abstract_model::weak_commutator;
use crate::boson::{self, BosonBasis};
use crate::error::{FockError, Result};
use crate::fermion::{self, FermionBasis, OneParticleOperator};
use crate::linalg::{inner, norm, op_norm, random_vector, SparseOperator, C64};
use crate::report::{BoundReport, DefectReport};
use crate::yukawa::bounds::{
    commutator_formula_check, ladder_bound_reports, phi_bound_report, psi_bound_report,
    relative_bound_report, CommutatorProbe,
};
use crate::yukawa::dirac::{alpha, anticommutator_defect, beta, dirac_hamiltonian, mat_vec, Spinor};
use crate::yukawa::{YukawaConfig, YukawaModel};

pub const SUITES: [&str; 9] = [
    "car",
    "ccr",
    "norms",
    "dgamma-commutators",
    "dirac",
    "fields",
    "hi-commutators",
    "bounds",
    "weak-commutator",
];

/// Built-in model used when a suite needs one and none is given.
pub const DEFAULT_MODEL: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst defect (or worst bound violation, clamped at zero).
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Fermion mode counts; boson suites clamp to `1..=3` modes.
    pub dims: RangeInclusive<usize>,
    pub seed: u64,
    /// Replaces every per-check tolerance when set.
    pub tol: Option<f64>,
    pub model: YukawaConfig,
    /// Random pairs per relation.
    pub pairs: usize,
    /// Random states per sampled bound.
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            dims: 2..=6,
            seed: 42,
            tol: None,
            model: YukawaConfig::from_toml_str(DEFAULT_MODEL).expect("built-in model parses"),
            pairs: 50,
            samples: 100,
        }
    }
}

struct Collector<'a> {
    opts: &'a VerifyOptions,
    checks: Vec<Check>,
}

impl Collector<'_> {
    fn push(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        let tol = self.opts.tol.unwrap_or(tol);
        self.checks.push(Check {
            name: name.into(),
            value,
            tol,
            passed: value <= tol,
        });
    }

    fn bound(&mut self, r: &BoundReport) {
        self.push(r.bound.clone(), r.max_violation().max(0.0), r.tol);
    }

    fn defects(&mut self, r: &DefectReport) {
        for e in &r.entries {
            self.push(e.name.clone(), e.defect, r.tol);
        }
    }
}

pub fn parse_dims(text: &str) -> Result<RangeInclusive<usize>> {
    let bad = || FockError::InvalidArgument(format!("dims must look like a..b, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: usize = a.trim().parse().map_err(|_| bad())?;
    let hi: usize = b.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

pub fn is_known_suite(name: &str) -> bool {
    SUITES.contains(&name)
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut c = Collector {
        opts,
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match name {
        "car" => car(&mut c, &mut rng)?,
        "ccr" => ccr(&mut c, &mut rng)?,
        "norms" => norms(&mut c, &mut rng)?,
        "dgamma-commutators" => dgamma(&mut c, &mut rng)?,
        "dirac" => dirac(&mut c)?,
        "fields" => fields(&mut c, &mut rng)?,
        "hi-commutators" => hi_commutators(&mut c, &mut rng)?,
        "bounds" => bounds(&mut c)?,
        "weak-commutator" => weak(&mut c, &mut rng)?,
        other => return Err(FockError::InvalidArgument(format!("unknown suite {other:?}"))),
    }
    let passed = c.checks.iter().all(|x| x.passed);
    Ok(SuiteReport {
        suite: name.to_string(),
        passed,
        checks: c.checks,
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> OneParticleOperator {
    let a = random_vector(rng, d * d);
    let m: Vec<C64> = (0..d * d)
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            (a[i * d + j] + a[j * d + i].conj()) * 0.5
        })
        .collect();
    OneParticleOperator::new(d, m).expect("symmetrized matrix is Hermitian")
}

fn car(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    for d in c.opts.dims.clone() {
        let basis = FermionBasis::new(d)?;
        let id = SparseOperator::identity(basis.dim());
        let (mut mixed, mut same) = (0.0f64, 0.0f64);
        for _ in 0..c.opts.pairs {
            let f = random_vector(rng, d);
            let g = random_vector(rng, d);
            let bf = fermion::annihilation(&basis, &f)?;
            let bg = fermion::annihilation(&basis, &g)?;
            let bsg = fermion::creation(&basis, &g)?;
            let bsf = fermion::creation(&basis, &f)?;
            mixed = mixed.max(bf.anticommutator(&bsg)?.max_abs_diff(&id.scale(inner(&f, &g)))?);
            same = same.max(bf.anticommutator(&bg)?.max_abs());
            same = same.max(bsf.anticommutator(&bsg)?.max_abs());
        }
        c.push(format!("{{B(f),B*(g)}}=(f,g) d={d}"), mixed, 1e-12);
        c.push(format!("{{B,B}}={{B*,B*}}=0 d={d}"), same, 1e-12);
    }
    Ok(())
}

fn boson_dims(opts: &VerifyOptions) -> Vec<usize> {
    (1..=3).filter(|d| opts.dims.contains(d) || *opts.dims.start() > 3).collect()
}

fn ccr(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    for d in boson_dims(c.opts) {
        for n_max in 1..=3 {
            let basis = BosonBasis::new(d, n_max)?;
            let sub = basis.sub_cutoff_states();
            let id = SparseOperator::identity(basis.dim());
            let (mut mixed, mut same) = (0.0f64, 0.0f64);
            for _ in 0..c.opts.pairs {
                let f = random_vector(rng, d);
                let g = random_vector(rng, d);
                let af = boson::a_op(&basis, &f)?;
                let asg = boson::a_dag(&basis, &g)?;
                let ag = boson::a_op(&basis, &g)?;
                let asf = boson::a_dag(&basis, &f)?;
                let lhs = af.commutator(&asg)?;
                mixed = mixed.max(lhs.max_abs_diff_on_columns(&id.scale(inner(&f, &g)), &sub)?);
                same = same.max(af.commutator(&ag)?.max_abs());
                same = same.max(asf.commutator(&asg)?.max_abs());
            }
            c.push(format!("[A(f),A*(g)]=(f,g) sub-cutoff d={d} n_max={n_max}"), mixed, 1e-12);
            c.push(format!("[A,A]=[A*,A*]=0 d={d} n_max={n_max}"), same, 1e-12);
        }
    }
    Ok(())
}

fn norms(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    for d in c.opts.dims.clone().filter(|d| *d <= 6) {
        let basis = FermionBasis::new(d)?;
        let (mut ann, mut cre) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let f = random_vector(rng, d);
            let nf = norm(&f);
            ann = ann.max((op_norm(&fermion::annihilation(&basis, &f)?, 1e-12)? - nf).abs());
            cre = cre.max((op_norm(&fermion::creation(&basis, &f)?, 1e-12)? - nf).abs());
        }
        c.push(format!("‖B(f)‖=‖f‖ d={d}"), ann, 1e-8);
        c.push(format!("‖B*(f)‖=‖f‖ d={d}"), cre, 1e-8);
    }
    Ok(())
}

fn dgamma(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    for d in c.opts.dims.clone() {
        let basis = FermionBasis::new(d)?;
        let (mut down, mut up) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let x = random_hermitian(rng, d);
            let f = random_vector(rng, d);
            let dg = fermion::second_quantization_fermi(&basis, &x)?;
            let xf = x.apply(&f);
            let lhs = dg.commutator(&fermion::annihilation(&basis, &f)?)?;
            down = down.max(lhs.max_abs_diff(&fermion::annihilation(&basis, &xf)?.scale(C64::new(-1.0, 0.0)))?);
            let lhs = dg.commutator(&fermion::creation(&basis, &f)?)?;
            up = up.max(lhs.max_abs_diff(&fermion::creation(&basis, &xf)?)?);
        }
        c.push(format!("[dΓ_f(X),B(f)]=-B(Xf) d={d}"), down, 1e-12);
        c.push(format!("[dΓ_f(X),B*(f)]=B*(Xf) d={d}"), up, 1e-12);
    }
    for d in boson_dims(c.opts) {
        let basis = BosonBasis::new(d, 3)?;
        let (mut down, mut up) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let y = random_hermitian(rng, d);
            let f = random_vector(rng, d);
            let dg = boson::second_quantization_bose(&basis, &y)?;
            let yf = y.apply(&f);
            let lhs = dg.commutator(&boson::a_op(&basis, &f)?)?;
            down = down.max(lhs.max_abs_diff(&boson::a_op(&basis, &yf)?.scale(C64::new(-1.0, 0.0)))?);
            let lhs = dg.commutator(&boson::a_dag(&basis, &f)?)?;
            up = up.max(lhs.max_abs_diff(&boson::a_dag(&basis, &yf)?)?);
        }
        c.push(format!("[dΓ_b(Y),A(f)]=-A(Yf) d={d}"), down, 1e-12);
        c.push(format!("[dΓ_b(Y),A*(f)]=A*(Yf) d={d}"), up, 1e-12);
    }
    Ok(())
}

/// Max defects of the Dirac-matrix algebra and of the spinor relations at every grid point.
pub fn dirac_defects(model: &YukawaModel) -> (f64, f64) {
    let b = beta();
    let mut clifford = anticommutator_defect(&b, &b, 2.0);
    for j in 0..3 {
        clifford = clifford.max(anticommutator_defect(&alpha(j), &b, 0.0));
        for l in 0..3 {
            let t = if j == l { 2.0 } else { 0.0 };
            clifford = clifford.max(anticommutator_defect(&alpha(j), &alpha(l), t));
        }
    }
    let dot = |a: &Spinor, b: &Spinor| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let mut spinor = 0.0f64;
    let mass = model.config().fermion_mass;
    for (p, s) in model.fermion_grid().points().iter().zip(model.spinors()) {
        let h = dirac_hamiltonian(*p, mass);
        let w = (p.iter().map(|x| x * x).sum::<f64>() + mass * mass).sqrt();
        spinor = spinor.max((s.omega - w).abs());
        let all = [s.u[0], s.u[1], s.v[0], s.v[1]];
        for (k, v) in all.iter().enumerate() {
            let e = if k < 2 { w } else { -w };
            let hv = mat_vec(&h, v);
            for i in 0..4 {
                spinor = spinor.max((hv[i] - v[i] * e).norm());
            }
            for (m, u) in all.iter().enumerate() {
                let want = if k == m { 1.0 } else { 0.0 };
                spinor = spinor.max((dot(v, u) - C64::new(want, 0.0)).norm());
            }
        }
        for r in 0..4 {
            for col in 0..4 {
                let sum: C64 = all.iter().map(|x| x[r] * x[col].conj()).sum();
                let want = if r == col { 1.0 } else { 0.0 };
                spinor = spinor.max((sum - C64::new(want, 0.0)).norm());
            }
        }
    }
    (clifford, spinor)
}

fn dirac(c: &mut Collector) -> Result<()> {
    let model = YukawaModel::new(&c.opts.model)?;
    let (clifford, spinor) = dirac_defects(&model);
    c.push("Dirac-matrix anticommutators", clifford, 1e-12);
    c.push("spinor eigen/orthonormality/completeness", spinor, 1e-12);
    Ok(())
}

fn fields(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    let model = YukawaModel::new(&c.opts.model)?;
    let dim = model.fermion_basis().dim();
    let id = SparseOperator::identity(dim);
    let zero = SparseOperator::zeros(dim, dim);
    let (mut car, mut mixed) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let f = random_vector(rng, model.n_p()).into_inner();
        let g = random_vector(rng, model.n_p()).into_inner();
        for s in 0..2 {
            for t in 0..2 {
                let want = if s == t { id.scale(inner(&f, &g)) } else { zero.clone() };
                car = car.max(model.b_op(s, &f)?.anticommutator(&model.b_dag(t, &g)?)?.max_abs_diff(&want)?);
                car = car.max(model.d_op(s, &f)?.anticommutator(&model.d_dag(t, &g)?)?.max_abs_diff(&want)?);
                mixed = mixed.max(model.b_op(s, &f)?.anticommutator(&model.d_op(t, &g)?)?.max_abs());
                mixed = mixed.max(model.b_op(s, &f)?.anticommutator(&model.d_dag(t, &g)?)?.max_abs());
            }
        }
    }
    c.push("channel CAR", car, 1e-12);
    c.push("mixed channel anticommutators", mixed, 1e-12);
    let mut excess = 0.0f64;
    for x in &model.spatial().points {
        for l in 0..4 {
            let n = op_norm(&model.psi_field(l, x)?, 1e-12)?;
            excess = excess.max(n - model.norms().psi_bound(l));
        }
    }
    c.push("‖ψ_l(x)‖ above Σ_s(‖f‖+‖g‖)", excess.max(0.0), 1e-10);
    let omega = boson::vacuum(model.boson_basis());
    let mut vac = 0.0f64;
    for x in &model.spatial().points {
        let amp = model.phi_field(x)?.apply(&omega).norm();
        vac = vac.max((amp - model.norms().h / 2f64.sqrt()).abs());
    }
    c.push("‖φ(x)Ω‖ = ‖h‖/√2", vac, 1e-12);
    Ok(())
}

fn hi_commutators(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    let model = YukawaModel::new(&c.opts.model)?;
    let probe = CommutatorProbe {
        xi: random_vector(rng, model.n_p()).into_inner(),
        eta: random_vector(rng, model.n_p()).into_inner(),
        zeta: random_vector(rng, model.n_k()).into_inner(),
    };
    let r = commutator_formula_check(&model, &probe)?;
    c.defects(&r);
    Ok(())
}

fn bounds(c: &mut Collector) -> Result<()> {
    let model = YukawaModel::new(&c.opts.model)?;
    let n = c.opts.samples;
    let seed = c.opts.seed;
    c.bound(&psi_bound_report(&model, n, seed)?);
    c.bound(&phi_bound_report(&model, n, seed + 1)?);
    let (a, ad) = ladder_bound_reports(&model, n, seed + 2)?;
    c.bound(&a);
    c.bound(&ad);
    let rel = relative_bound_report(&model, &[1.0, 0.3, 0.1], n, seed + 3)?;
    c.bound(&rel.derived);
    Ok(())
}

fn weak(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    for d in c.opts.dims.clone() {
        let basis = FermionBasis::new(d)?;
        let (mut form, mut formula) = (0.0f64, 0.0f64);
        for i in 0..5 {
            let x = random_hermitian(rng, d);
            let f = random_vector(rng, d);
            let dg = fermion::second_quantization_fermi(&basis, &x)?;
            let r = weak_commutator(&dg, &fermion::creation(&basis, &f)?, 10, c.opts.seed + i)?;
            form = form.max(r.max_defect);
            formula = formula.max(r.z.max_abs_diff(&fermion::creation(&basis, &x.apply(&f))?)?);
        }
        c.push(format!("weak commutator form d={d}"), form, 1e-12);
        c.push(format!("[dΓ_f(X),B*(f)]⁰ = B*(Xf) d={d}"), formula, 1e-12);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parsing() {
        assert_eq!(parse_dims("2..6").unwrap(), 2..=6);
        assert_eq!(parse_dims("3..=4").unwrap(), 3..=4);
        assert!(parse_dims("6..2").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn unknown_suite() {
        assert!(!is_known_suite("bogus"));
        assert!(run_suite("bogus", &VerifyOptions::default()).is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        let opts = VerifyOptions {
            dims: 2..=3,
            pairs: 5,
            samples: 5,
            ..VerifyOptions::default()
        };
        for s in ["car", "ccr", "norms", "dgamma-commutators", "dirac", "weak-commutator"] {
            let r = run_suite(s, &opts).unwrap();
            assert!(r.passed, "{s}: {:?}", r.checks);
        }
    }
}
