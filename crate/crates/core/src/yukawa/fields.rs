//! Discretized Dirac and Klein-Gordon fields on finite Fock spaces.
//!
//! A function `f` on the momentum grid enters the Fock operators through its
//! mode coefficients `√w_p f(p)`, so `Σ_p w_p |f(p)|²` is the ℓ² norm of the
//! coefficient vector. Fermion mode `c·N_p + p` carries channel `c` in the
//! order `b_{+1/2}, b_{-1/2}, d_{+1/2}, d_{-1/2}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::config::YukawaConfig;
use super::dirac::{dirac_spinors, dispersion, DiracSpinors};
use super::grid::{dot3, MomentumGrid, Profile, SpatialGrid, Vec3};
use crate::boson::{self, BosonBasis};
use crate::error::{FockError, Result};
use crate::fermion::{self, FermionBasis, OneParticleOperator};
use crate::linalg::{SparseOperator, C64};

/// Diagonal of `β` in the Dirac representation.
pub const BETA_DIAG: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

pub const CHANNELS: usize = 4;

/// Channel index of `b_s` (`s = 0` is spin up).
pub fn b_channel(s: usize) -> usize {
    s
}

/// Channel index of `d_s`.
pub fn d_channel(s: usize) -> usize {
    2 + s
}

/// Coefficient norms entering the ultraviolet condition and the field bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientNorms {
    /// `‖f_s^l‖`, indexed `[l][s]`.
    pub f: [[f64; 2]; 4],
    /// `‖g_s^l‖`, indexed `[l][s]`.
    pub g: [[f64; 2]; 4],
    /// `‖h‖`
    pub h: f64,
    /// `‖h/√ω_m‖`
    pub h_over_sqrt_omega: f64,
    /// `‖h/ω_m‖`
    pub h_over_omega: f64,
}

impl CoefficientNorms {
    /// `Σ_s (‖f_s^l‖ + ‖g_s^l‖)`, the bound on `sup_x ‖ψ_l(x)‖`.
    pub fn psi_bound(&self, l: usize) -> f64 {
        (0..2).map(|s| self.f[l][s] + self.g[l][s]).sum()
    }
}

#[derive(Debug, Clone)]
pub struct YukawaModel {
    config: YukawaConfig,
    fermion_grid: MomentumGrid,
    boson_grid: MomentumGrid,
    spatial: SpatialGrid,
    fermion_basis: FermionBasis,
    boson_basis: BosonBasis,
    spinors: Vec<DiracSpinors>,
    /// `f_s^l(p)` at `[(l*2 + s)*N_p + p]`
    f: Vec<C64>,
    g: Vec<C64>,
    /// `h(k)`
    h: Vec<f64>,
    norms: CoefficientNorms,
}

fn coefficient_index(n_p: usize, l: usize, s: usize, p: usize) -> usize {
    (l * 2 + s) * n_p + p
}

fn plane_wave(p: &Vec3, x: &Vec3, sign: f64) -> C64 {
    C64::from_polar(1.0, sign * dot3(p, x))
}

impl YukawaModel {
    pub fn new(config: &YukawaConfig) -> Result<Self> {
        config.validate()?;
        let fermion_grid = config.fermion_grid.build(&config.cutoff.dirac)?;
        let boson_grid = config.boson_grid.build(&config.cutoff.kg)?;
        let spatial = config.spatial.build()?;
        let n_p = fermion_grid.len();
        let fermion_basis = FermionBasis::new(CHANNELS * n_p)?;
        let boson_basis = BosonBasis::new(boson_grid.len(), config.n_max)?;
        let mass = config.fermion_mass;
        let spinors: Vec<DiracSpinors> = fermion_grid
            .points()
            .iter()
            .map(|p| dirac_spinors(*p, mass))
            .collect();
        let chi_d = config.cutoff.dirac;
        let mut f = vec![C64::new(0.0, 0.0); 8 * n_p];
        let mut g = vec![C64::new(0.0, 0.0); 8 * n_p];
        for p in 0..n_p {
            let pt = fermion_grid.point(p);
            let scale = chi_d.eval(&pt) / ((2.0 * PI).powi(3) * spinors[p].omega).sqrt();
            let minus = &spinors[fermion_grid.negated(p)];
            for l in 0..4 {
                for s in 0..2 {
                    f[coefficient_index(n_p, l, s, p)] = spinors[p].u[s][l] * scale;
                    g[coefficient_index(n_p, l, s, p)] = minus.v[s][l] * scale;
                }
            }
        }
        let h = boson_coefficients(&boson_grid, config.boson_mass, &config.cutoff.kg);
        let norms = coefficient_norms(&fermion_grid, &boson_grid, config.boson_mass, &f, &g, &h)?;
        Ok(Self {
            config: config.clone(),
            fermion_grid,
            boson_grid,
            spatial,
            fermion_basis,
            boson_basis,
            spinors,
            f,
            g,
            h,
            norms,
        })
    }

    pub fn config(&self) -> &YukawaConfig {
        &self.config
    }

    pub fn fermion_grid(&self) -> &MomentumGrid {
        &self.fermion_grid
    }

    pub fn boson_grid(&self) -> &MomentumGrid {
        &self.boson_grid
    }

    pub fn spatial(&self) -> &SpatialGrid {
        &self.spatial
    }

    pub fn fermion_basis(&self) -> &FermionBasis {
        &self.fermion_basis
    }

    pub fn boson_basis(&self) -> &BosonBasis {
        &self.boson_basis
    }

    pub fn spinors(&self) -> &[DiracSpinors] {
        &self.spinors
    }

    pub fn norms(&self) -> &CoefficientNorms {
        &self.norms
    }

    pub fn dim(&self) -> usize {
        self.fermion_basis.dim() * self.boson_basis.dim()
    }

    pub fn n_p(&self) -> usize {
        self.fermion_grid.len()
    }

    pub fn n_k(&self) -> usize {
        self.boson_grid.len()
    }

    pub fn mode(&self, channel: usize, p: usize) -> usize {
        channel * self.n_p() + p
    }

    /// `f_s^l(p)` without the plane wave.
    pub fn f_coeff(&self, l: usize, s: usize, p: usize) -> C64 {
        self.f[coefficient_index(self.n_p(), l, s, p)]
    }

    /// `g_s^l(p)`, built from `v_s^l(-p)`.
    pub fn g_coeff(&self, l: usize, s: usize, p: usize) -> C64 {
        self.g[coefficient_index(self.n_p(), l, s, p)]
    }

    pub fn h_coeff(&self, k: usize) -> f64 {
        self.h[k]
    }

    pub fn omega_fermion(&self, p: usize) -> f64 {
        self.spinors[p].omega
    }

    pub fn omega_boson(&self, k: usize) -> f64 {
        dispersion(self.boson_grid.point(k), self.config.boson_mass)
    }

    /// Mode vector of `f_{s,x}^l(p) = f_s^l(p) e^{-ip·x}` on one channel.
    pub fn f_mode(&self, l: usize, s: usize, x: &Vec3) -> Vec<C64> {
        (0..self.n_p())
            .map(|p| {
                let pt = self.fermion_grid.point(p);
                self.f_coeff(l, s, p) * self.fermion_grid.weight(p).sqrt() * plane_wave(&pt, x, -1.0)
            })
            .collect()
    }

    /// Mode vector of `g_{s,x}^l(p) = g_s^l(p) e^{-ip·x}` on one channel.
    pub fn g_mode(&self, l: usize, s: usize, x: &Vec3) -> Vec<C64> {
        (0..self.n_p())
            .map(|p| {
                let pt = self.fermion_grid.point(p);
                self.g_coeff(l, s, p) * self.fermion_grid.weight(p).sqrt() * plane_wave(&pt, x, -1.0)
            })
            .collect()
    }

    /// Mode vector of `h_x(k) = h(k) e^{ik·x}`.
    pub fn h_mode(&self, x: &Vec3) -> Vec<C64> {
        (0..self.n_k())
            .map(|k| {
                let pt = self.boson_grid.point(k);
                plane_wave(&pt, x, 1.0) * (self.h[k] * self.boson_grid.weight(k).sqrt())
            })
            .collect()
    }

    /// Places a channel vector into the full fermion mode space.
    pub fn embed(&self, channel: usize, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.n_p() {
            return Err(FockError::DimensionMismatch {
                expected: self.n_p(),
                got: v.len(),
                context: "channel vector",
            });
        }
        if channel >= CHANNELS {
            return Err(FockError::InvalidArgument(format!("channel {channel} out of range")));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.fermion_basis.modes()];
        out[channel * self.n_p()..(channel + 1) * self.n_p()].copy_from_slice(v);
        Ok(out)
    }

    /// `b_s(ξ)`
    pub fn b_op(&self, s: usize, xi: &[C64]) -> Result<SparseOperator> {
        fermion::annihilation(&self.fermion_basis, &self.embed(b_channel(s), xi)?)
    }

    /// `d_s(ξ)`
    pub fn d_op(&self, s: usize, xi: &[C64]) -> Result<SparseOperator> {
        fermion::annihilation(&self.fermion_basis, &self.embed(d_channel(s), xi)?)
    }

    /// `b*_s(η)`
    pub fn b_dag(&self, s: usize, eta: &[C64]) -> Result<SparseOperator> {
        fermion::creation(&self.fermion_basis, &self.embed(b_channel(s), eta)?)
    }

    /// `d*_s(η)`
    pub fn d_dag(&self, s: usize, eta: &[C64]) -> Result<SparseOperator> {
        fermion::creation(&self.fermion_basis, &self.embed(d_channel(s), eta)?)
    }

    /// `ψ_l(x) = Σ_s b_s(f_{s,x}^l) + d*_s(g_{s,x}^l)`
    pub fn psi_field(&self, l: usize, x: &Vec3) -> Result<SparseOperator> {
        let mut annihilate = vec![C64::new(0.0, 0.0); self.fermion_basis.modes()];
        let mut create = annihilate.clone();
        for s in 0..2 {
            let fm = self.f_mode(l, s, x);
            let gm = self.g_mode(l, s, x);
            for p in 0..self.n_p() {
                annihilate[self.mode(b_channel(s), p)] = fm[p];
                create[self.mode(d_channel(s), p)] = gm[p];
            }
        }
        fermion::annihilation(&self.fermion_basis, &annihilate)?
            .add(&fermion::creation(&self.fermion_basis, &create)?)
    }

    pub fn psi_fields(&self, x: &Vec3) -> Result<Vec<SparseOperator>> {
        (0..4).map(|l| self.psi_field(l, x)).collect()
    }

    /// `ψ̄(x)ψ(x) = Σ_{l,l'} β_{ll'} ψ_l*(x) ψ_{l'}(x)`
    pub fn density(&self, x: &Vec3) -> Result<SparseOperator> {
        let psi = self.psi_fields(x)?;
        density_from(&psi)
    }

    /// `φ(x) = (a(h_x) + a*(h_x)) / √2`
    pub fn phi_field(&self, x: &Vec3) -> Result<SparseOperator> {
        let hm = self.h_mode(x);
        let a = boson::a_op(&self.boson_basis, &hm)?;
        let ad = boson::a_dag(&self.boson_basis, &hm)?;
        Ok(a.add(&ad)?.scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).with_hermitian(true))
    }

    /// Densities at every spatial point, assembled in parallel.
    pub fn densities(&self) -> Result<Vec<SparseOperator>> {
        self.spatial.points.par_iter().map(|x| self.density(x)).collect()
    }

    /// `K = diag(ω_M(p))` on the four-channel mode space.
    pub fn k_operator(&self) -> OneParticleOperator {
        let diag: Vec<f64> = (0..CHANNELS)
            .flat_map(|_| (0..self.n_p()).map(|p| self.omega_fermion(p)))
            .collect();
        OneParticleOperator::diagonal(&diag)
    }

    /// One-boson operator `diag(ω_m(k))`.
    pub fn s_operator(&self) -> OneParticleOperator {
        let diag: Vec<f64> = (0..self.n_k()).map(|k| self.omega_boson(k)).collect();
        OneParticleOperator::diagonal(&diag)
    }

    /// `H_KG = dΓ_b(ω_m)`
    pub fn h_kg(&self) -> Result<SparseOperator> {
        boson::second_quantization_bose(&self.boson_basis, &self.s_operator())
    }
}

/// `Σ_{l,l'} β_{ll'} ψ_l* ψ_{l'}` for diagonal `β`.
pub fn density_from(psi: &[SparseOperator]) -> Result<SparseOperator> {
    let dim = psi[0].rows();
    let mut acc = SparseOperator::zeros(dim, dim);
    for (l, op) in psi.iter().enumerate() {
        let term = op.adjoint().matmul(op)?;
        acc = acc.add_scaled(&term, C64::new(BETA_DIAG[l], 0.0))?;
    }
    Ok(acc.with_hermitian(true))
}

/// `h(k) = χ_KG(k) / √((2π)³ ω_m(k))`
pub fn boson_coefficients(grid: &MomentumGrid, mass: f64, chi: &Profile) -> Vec<f64> {
    grid.points()
        .iter()
        .map(|k| chi.eval(k) / ((2.0 * PI).powi(3) * dispersion(*k, mass)).sqrt())
        .collect()
}

/// Weighted coefficient norms; any non-finite value violates the ultraviolet condition.
fn coefficient_norms(
    fermion_grid: &MomentumGrid,
    boson_grid: &MomentumGrid,
    boson_mass: f64,
    f: &[C64],
    g: &[C64],
    h: &[f64],
) -> Result<CoefficientNorms> {
    let n_p = fermion_grid.len();
    let weighted = |table: &[C64], l: usize, s: usize| -> f64 {
        (0..n_p)
            .map(|p| fermion_grid.weight(p) * table[coefficient_index(n_p, l, s, p)].norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let mut fnorm = [[0.0; 2]; 4];
    let mut gnorm = [[0.0; 2]; 4];
    for l in 0..4 {
        for s in 0..2 {
            fnorm[l][s] = weighted(f, l, s);
            gnorm[l][s] = weighted(g, l, s);
        }
    }
    let omega: Vec<f64> = boson_grid
        .points()
        .iter()
        .map(|k| dispersion(*k, boson_mass))
        .collect();
    let hsum = |pow: i32| -> f64 {
        (0..boson_grid.len())
            .map(|k| boson_grid.weight(k) * h[k] * h[k] / omega[k].powi(pow))
            .sum::<f64>()
            .sqrt()
    };
    let norms = CoefficientNorms {
        f: fnorm,
        g: gnorm,
        h: hsum(0),
        h_over_sqrt_omega: hsum(1),
        h_over_omega: hsum(2),
    };
    let all_finite = norms.f.iter().chain(&norms.g).flatten().all(|v| v.is_finite())
        && [norms.h, norms.h_over_sqrt_omega, norms.h_over_omega]
            .iter()
            .all(|v| v.is_finite());
    if !all_finite {
        return Err(FockError::Config(
            "ultraviolet cutoff leaves a coefficient norm infinite".into(),
        ));
    }
    Ok(norms)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::{inner, op_norm, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) const TINY: &str = r#"
fermion_mass = 1.0
boson_mass = 0.6
kappa = 0.1
n_max = 3

[fermion_grid]
shells = [0.5]
origin = false

[boson_grid]
shells = [0.5]
origin = false

[cutoff]
dirac = { profile = "sharp", lambda = 2.0 }
kg = { profile = "sharp", lambda = 2.0 }

[spatial]
points = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.5], [0.0, 0.0, -0.5]]
weights = [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]
"#;

    pub(crate) fn tiny() -> YukawaModel {
        YukawaModel::new(&YukawaConfig::from_toml_str(TINY).unwrap()).unwrap()
    }

    #[test]
    fn g_uses_spinor_at_minus_p() {
        let m = tiny();
        for p in 0..m.n_p() {
            let minus = m.fermion_grid().point(m.fermion_grid().negated(p));
            let direct = dirac_spinors(minus, 1.0);
            let scale = 1.0 / ((2.0 * PI).powi(3) * dispersion(m.fermion_grid().point(p), 1.0)).sqrt();
            for l in 0..4 {
                for s in 0..2 {
                    assert!((m.g_coeff(l, s, p) - direct.v[s][l] * scale).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn norms_match_weighted_sums() {
        let m = tiny();
        let w = m.fermion_grid().weight(0);
        for l in 0..4 {
            for s in 0..2 {
                let direct: f64 = (0..m.n_p())
                    .map(|p| {
                        let u = m.spinors()[p].u[s][l];
                        w * u.norm_sqr() / ((2.0 * PI).powi(3) * m.omega_fermion(p))
                    })
                    .sum();
                assert!((m.norms().f[l][s] - direct.sqrt()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_cutoff_kills_fields() {
        let mut c = YukawaConfig::from_toml_str(TINY).unwrap();
        c.cutoff.dirac = Profile::Constant { value: 0.0 };
        c.fermion_grid = crate::yukawa::config::GridSpec::Shells {
            shells: vec![0.5],
            axes: vec![2],
            origin: false,
            volume: Some(1.0),
        };
        let m = YukawaModel::new(&c).unwrap();
        assert_eq!(m.density(&[0.0; 3]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn channel_car() {
        let m = tiny();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_vector(&mut rng, m.n_p());
        let g = random_vector(&mut rng, m.n_p());
        let dim = m.fermion_basis().dim();
        let id = SparseOperator::identity(dim);
        for s in 0..2 {
            for t in 0..2 {
                let bb = m.b_op(s, &f).unwrap().anticommutator(&m.b_dag(t, &g).unwrap()).unwrap();
                let dd = m.d_op(s, &f).unwrap().anticommutator(&m.d_dag(t, &g).unwrap()).unwrap();
                let want = if s == t { id.scale(inner(&f, &g)) } else { SparseOperator::zeros(dim, dim) };
                assert!(bb.max_abs_diff(&want).unwrap() < 1e-12);
                assert!(dd.max_abs_diff(&want).unwrap() < 1e-12);
                let mixed = m.b_op(s, &f).unwrap().anticommutator(&m.d_op(t, &g).unwrap()).unwrap();
                let mixed2 = m.b_op(s, &f).unwrap().anticommutator(&m.d_dag(t, &g).unwrap()).unwrap();
                assert!(mixed.max_abs() < 1e-12 && mixed2.max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psi_norm_bound() {
        let m = tiny();
        for x in &m.spatial().points {
            for l in 0..4 {
                let n = op_norm(&m.psi_field(l, x).unwrap(), 1e-10).unwrap();
                assert!(n <= m.norms().psi_bound(l) + 1e-10);
            }
        }
    }

    #[test]
    fn phi_vacuum_amplitude_is_x_independent() {
        let m = tiny();
        let omega = boson::vacuum(m.boson_basis());
        for x in [[0.0; 3], [0.3, -1.0, 2.0]] {
            let phi = m.phi_field(&x).unwrap();
            assert!(phi.hermiticity_defect() < 1e-15);
            let v = phi.apply(&omega);
            assert!((v.norm() - m.norms().h / 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn k_and_s_are_dispersions() {
        let m = tiny();
        let k = m.k_operator();
        assert_eq!(k.dim(), 8);
        assert!((k.entry(5, 5).re - (1.25f64).sqrt()).abs() < 1e-15);
        let s = m.s_operator();
        assert!((s.entry(0, 0).re - (0.61f64).sqrt()).abs() < 1e-15);
    }
}
