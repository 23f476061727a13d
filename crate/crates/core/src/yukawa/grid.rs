//! Quadrature grids standing in for momentum and position integrals.

use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};

pub type Vec3 = [f64; 3];

/// Points closer than this are considered equal.
const POINT_TOL: f64 = 1e-12;

fn close(a: &Vec3, b: &Vec3) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= POINT_TOL)
}

pub fn norm3(p: &Vec3) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weighted momentum points closed under `p -> -p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumGrid {
    points: Vec<Vec3>,
    weights: Vec<f64>,
    #[serde(skip)]
    negation: Vec<usize>,
}

impl MomentumGrid {
    pub fn new(points: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(FockError::Config("momentum grid has no points".into()));
        }
        if points.len() != weights.len() {
            return Err(FockError::DimensionMismatch {
                expected: points.len(),
                got: weights.len(),
                context: "momentum grid weights",
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(FockError::Config(format!("grid weight {w} is not positive")));
        }
        for (i, a) in points.iter().enumerate() {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(FockError::Config(format!("grid point {a:?} is not finite")));
            }
            if points[..i].iter().any(|b| close(a, b)) {
                return Err(FockError::Config(format!("duplicate grid point {a:?}")));
            }
        }
        let negation = points
            .iter()
            .map(|p| {
                let neg = [-p[0], -p[1], -p[2]];
                points
                    .iter()
                    .position(|q| close(q, &neg))
                    .ok_or_else(|| FockError::Config(format!("grid point {p:?} has no -p partner")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            weights,
            negation,
        })
    }

    /// Equal weights `volume / N`.
    pub fn with_volume(points: Vec<Vec3>, volume: f64) -> Result<Self> {
        let n = points.len().max(1) as f64;
        let w = vec![volume / n; points.len()];
        Self::new(points, w)
    }

    /// Origin (optional) plus `±r` along the chosen axes for every radius.
    pub fn shells(radii: &[f64], axes: &[usize], include_origin: bool, volume: f64) -> Result<Self> {
        let mut points = Vec::new();
        if include_origin {
            points.push([0.0; 3]);
        }
        for &r in radii {
            for &ax in axes {
                if ax > 2 {
                    return Err(FockError::Config(format!("axis {ax} out of range")));
                }
                for sign in [1.0, -1.0] {
                    let mut p = [0.0; 3];
                    p[ax] = sign * r;
                    points.push(p);
                }
            }
        }
        Self::with_volume(points, volume)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> Vec3 {
        self.points[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Index of `-p_i`.
    pub fn negated(&self, i: usize) -> usize {
        self.negation[i]
    }

    pub fn contains_point(&self, p: &Vec3) -> bool {
        self.points.iter().any(|q| close(p, q))
    }

    /// Every point of `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &MomentumGrid) -> bool {
        self.points.iter().all(|p| other.contains_point(p))
    }
}

/// Radial cutoff profile `χ(|p|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "lowercase")]
pub enum Profile {
    /// `1` for `|p| <= lambda`, else `0`.
    Sharp { lambda: f64 },
    /// `exp(-p² / 2 lambda²)`
    Gaussian { lambda: f64 },
    Constant { value: f64 },
}

impl Profile {
    pub fn eval(&self, p: &Vec3) -> f64 {
        let r = norm3(p);
        match *self {
            Profile::Sharp { lambda } => {
                if r <= lambda {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian { lambda } => (-(r * r) / (2.0 * lambda * lambda)).exp(),
            Profile::Constant { value } => value,
        }
    }

    /// Radius scale of the profile, used for default grid volumes.
    pub fn radius(&self) -> Option<f64> {
        match *self {
            Profile::Sharp { lambda } | Profile::Gaussian { lambda } => Some(lambda),
            Profile::Constant { .. } => None,
        }
    }
}

/// Ball volume `4/3 π r³`.
pub fn ball_volume(r: f64) -> f64 {
    4.0 / 3.0 * std::f64::consts::PI * r.powi(3)
}

/// Spatial quadrature with the interaction cutoff `χ_I` sampled on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub chi: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(points: Vec<Vec3>, weights: Vec<f64>, chi: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(FockError::Config("spatial grid has no points".into()));
        }
        if weights.len() != points.len() || chi.len() != points.len() {
            return Err(FockError::Config(format!(
                "spatial grid: {} points, {} weights, {} cutoff values",
                points.len(),
                weights.len(),
                chi.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0)) || chi.iter().any(|c| !c.is_finite()) {
            return Err(FockError::Config("spatial weights must be positive and χ_I finite".into()));
        }
        Ok(Self {
            points,
            weights,
            chi,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ_x w_x |χ_I(x)|`, the discrete L¹ norm.
    pub fn chi_l1(&self) -> f64 {
        self.weights.iter().zip(&self.chi).map(|(w, c)| w * c.abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_table() {
        let g = MomentumGrid::shells(&[0.5, 1.0], &[2], true, 5.0).unwrap();
        assert_eq!(g.len(), 5);
        for i in 0..g.len() {
            let p = g.point(i);
            let q = g.point(g.negated(i));
            assert_eq!([-p[0], -p[1], -p[2]], q);
        }
        assert!((g.weights().iter().sum::<f64>() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn missing_partner_rejected() {
        let r = MomentumGrid::new(vec![[0.0, 0.0, 1.0]], vec![1.0]);
        assert!(matches!(r, Err(FockError::Config(_))));
    }

    #[test]
    fn duplicates_and_bad_weights_rejected() {
        assert!(MomentumGrid::new(vec![[0.0; 3], [0.0; 3]], vec![1.0, 1.0]).is_err());
        assert!(MomentumGrid::new(vec![[0.0; 3]], vec![0.0]).is_err());
    }

    #[test]
    fn subset_relation() {
        let a = MomentumGrid::shells(&[], &[2], true, 1.0).unwrap();
        let b = MomentumGrid::shells(&[0.5], &[2], true, 1.0).unwrap();
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
    }

    #[test]
    fn profiles() {
        let s = Profile::Sharp { lambda: 1.0 };
        assert_eq!(s.eval(&[0.0, 0.0, 1.0]), 1.0);
        assert_eq!(s.eval(&[0.0, 1.0, 1.0]), 0.0);
        let g = Profile::Gaussian { lambda: 2.0 };
        assert!((g.eval(&[2.0, 0.0, 0.0]) - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn spatial_l1() {
        let s = SpatialGrid::new(vec![[0.0; 3], [1.0, 0.0, 0.0]], vec![0.5, 0.25], vec![1.0, -2.0])
            .unwrap();
        assert_eq!(s.chi_l1(), 1.0);
    }
}
