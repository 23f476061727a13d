//! TOML model description.
//!
//! ```toml
//! fermion_mass = 1.0
//! boson_mass = 0.6
//! kappa = 0.1
//! n_max = 3
//!
//! [fermion_grid]
//! shells = [0.5]
//! origin = false
//!
//! [boson_grid]
//! shells = [0.5]
//! origin = false
//!
//! [cutoff]
//! dirac = { profile = "sharp", lambda = 2.0 }
//! kg = { profile = "sharp", lambda = 2.0 }
//!
//! [spatial]
//! points = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.5], [0.0, 0.0, -0.5]]
//! weights = [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]
//! ```
//!
//! Grids are either explicit `points` (with `weights` or a `volume`) or
//! `shells` of radii placed at `±r` along `axes` (default the z axis).
//! Without an explicit volume the weights are `V / N` with `V` the ball
//! volume of the matching cutoff radius. Optional `[[level]]` tables list
//! nested refinements that override the grids and `n_max`.

use serde::{Deserialize, Serialize};

use super::grid::{ball_volume, MomentumGrid, Profile, SpatialGrid, Vec3};
use crate::error::{FockError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Points {
        points: Vec<Vec3>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        volume: Option<f64>,
    },
    Shells {
        shells: Vec<f64>,
        #[serde(default = "default_axes")]
        axes: Vec<usize>,
        #[serde(default = "default_true")]
        origin: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        volume: Option<f64>,
    },
}

fn default_axes() -> Vec<usize> {
    vec![2]
}

fn default_true() -> bool {
    true
}

impl GridSpec {
    pub fn build(&self, cutoff: &Profile) -> Result<MomentumGrid> {
        let volume = |v: &Option<f64>| -> Result<f64> {
            match (v, cutoff.radius()) {
                (Some(v), _) => Ok(*v),
                (None, Some(r)) => Ok(ball_volume(r)),
                (None, None) => Err(FockError::Config(
                    "grid needs an explicit volume with a constant cutoff profile".into(),
                )),
            }
        };
        match self {
            GridSpec::Points {
                points,
                weights: Some(w),
                ..
            } => MomentumGrid::new(points.clone(), w.clone()),
            GridSpec::Points {
                points,
                weights: None,
                volume: v,
            } => MomentumGrid::with_volume(points.clone(), volume(v)?),
            GridSpec::Shells {
                shells,
                axes,
                origin,
                volume: v,
            } => MomentumGrid::shells(shells, axes, *origin, volume(v)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub dirac: Profile,
    pub kg: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialSpec {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// `χ_I` at each point; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<Vec<f64>>,
}

impl SpatialSpec {
    pub fn build(&self) -> Result<SpatialGrid> {
        let chi = self
            .chi
            .clone()
            .unwrap_or_else(|| vec![1.0; self.points.len()]);
        SpatialGrid::new(self.points.clone(), self.weights.clone(), chi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Number of low eigenpairs computed for spectra and windows.
    #[serde(default = "default_eigs")]
    pub eigs: usize,
}

fn default_tol() -> f64 {
    1e-9
}

fn default_eigs() -> usize {
    8
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            eigs: default_eigs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    /// Defaults to `[M, m]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_widths")]
    pub widths: Vec<f64>,
}

fn default_eps() -> Vec<f64> {
    vec![0.5, 0.2, 0.05]
}

fn default_widths() -> Vec<f64> {
    vec![0.4, 0.2, 0.1, 0.05, 0.01]
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            lambdas: None,
            eps: default_eps(),
            widths: default_widths(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kappas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub fermion_grid: GridSpec,
    pub boson_grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YukawaConfig {
    pub fermion_mass: f64,
    pub boson_mass: f64,
    #[serde(default)]
    pub kappa: f64,
    pub n_max: u32,
    pub fermion_grid: GridSpec,
    pub boson_grid: GridSpec,
    pub cutoff: CutoffSpec,
    pub spatial: SpatialSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub probe: ProbeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, rename = "level", skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelSpec>,
}

impl YukawaConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: YukawaConfig =
            toml::from_str(text).map_err(|e| FockError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| FockError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fermion_mass > 0.0) || !(self.boson_mass > 0.0) {
            return Err(FockError::Config(format!(
                "masses must be positive (M = {}, m = {})",
                self.fermion_mass, self.boson_mass
            )));
        }
        if !self.kappa.is_finite() {
            return Err(FockError::Config("kappa must be finite".into()));
        }
        if self.probe.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(FockError::Config("probe eps values must be positive".into()));
        }
        if self.probe.widths.iter().any(|w| !(*w > 0.0)) {
            return Err(FockError::Config("probe widths must be positive".into()));
        }
        Ok(())
    }

    /// `ν = min{m, M}`
    pub fn nu(&self) -> f64 {
        self.fermion_mass.min(self.boson_mass)
    }

    /// Default probe energies `[M, m]` unless listed explicitly.
    pub fn lambdas(&self) -> Vec<f64> {
        self.probe
            .lambdas
            .clone()
            .unwrap_or_else(|| vec![self.fermion_mass, self.boson_mass])
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        let mut c = self.clone();
        c.kappa = kappa;
        c
    }

    /// The configuration of every `[[level]]` table (or just `self` when there
    /// are none), with the level tables themselves stripped.
    pub fn level_configs(&self) -> Vec<(String, YukawaConfig)> {
        let mut base = self.clone();
        base.levels.clear();
        if self.levels.is_empty() {
            return vec![("base".to_string(), base)];
        }
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let mut c = base.clone();
                c.fermion_grid = l.fermion_grid.clone();
                c.boson_grid = l.boson_grid.clone();
                if let Some(n) = l.n_max {
                    c.n_max = n;
                }
                (l.label.clone().unwrap_or_else(|| format!("L{}", i + 1)), c)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
fermion_mass = 1.0
boson_mass = 0.6
kappa = 0.1
n_max = 3

[fermion_grid]
shells = [0.5]
origin = false

[boson_grid]
points = [[0.0, 0.0, 0.5], [0.0, 0.0, -0.5]]
weights = [2.0, 2.0]

[cutoff]
dirac = { profile = "sharp", lambda = 2.0 }
kg = { profile = "gaussian", lambda = 1.5 }

[spatial]
points = [[0.0, 0.0, 0.0]]
weights = [1.0]

[[level]]
fermion_grid = { shells = [], origin = true }
boson_grid = { shells = [], origin = true }
n_max = 2
"#;

    #[test]
    fn parse_and_build_grids() {
        let c = YukawaConfig::from_toml_str(TEXT).unwrap();
        assert_eq!(c.nu(), 0.6);
        let fg = c.fermion_grid.build(&c.cutoff.dirac).unwrap();
        assert_eq!(fg.len(), 2);
        assert!((fg.weight(0) - ball_volume(2.0) / 2.0).abs() < 1e-12);
        let bg = c.boson_grid.build(&c.cutoff.kg).unwrap();
        assert_eq!(bg.weights(), &[2.0, 2.0]);
        assert_eq!(c.spatial.build().unwrap().chi, vec![1.0]);
        let levels = c.level_configs();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].1.n_max, 2);
        assert!(levels[0].1.levels.is_empty());
        assert_eq!(c.lambdas(), vec![1.0, 0.6]);
    }

    #[test]
    fn roundtrip_toml() {
        let c = YukawaConfig::from_toml_str(TEXT).unwrap();
        let again = YukawaConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn bad_mass_and_unknown_key_rejected() {
        let bad = TEXT.replace("boson_mass = 0.6", "boson_mass = -0.6");
        assert!(matches!(YukawaConfig::from_toml_str(&bad), Err(FockError::Config(_))));
        let unknown = TEXT.replace("kappa = 0.1", "kappa = 0.1\ncoupling = 3");
        assert!(YukawaConfig::from_toml_str(&unknown).is_err());
    }
}
