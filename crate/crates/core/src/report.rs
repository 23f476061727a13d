//! Sampled inequality reports shared by the bound checks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{random_vector, ComplexVector};

/// Default slack accepted on any sampled inequality.
pub const BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub lhs: f64,
    pub rhs: f64,
    /// Free parameter of the bound (for instance ε of a relative bound).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
}

impl BoundSample {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// `lhs <= rhs` evaluated on a set of sample states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: String,
    pub tol: f64,
    pub samples: Vec<BoundSample>,
}

impl BoundReport {
    pub fn new(bound: impl Into<String>) -> Self {
        Self {
            bound: bound.into(),
            tol: BOUND_TOL,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, lhs: f64, rhs: f64, parameter: Option<f64>) {
        self.samples.push(BoundSample { lhs, rhs, parameter });
    }

    /// Smallest `rhs - lhs`; `+inf` for an empty report.
    pub fn min_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(BoundSample::margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `lhs - rhs`, the quantity that must stay below the tolerance.
    pub fn max_violation(&self) -> f64 {
        -self.min_margin()
    }

    pub fn passed(&self) -> bool {
        self.min_margin() >= -self.tol
    }
}

/// Random unit vector of dimension `dim` supported on the given indices.
pub fn random_state_on<R: Rng + ?Sized>(rng: &mut R, dim: usize, support: &[usize]) -> ComplexVector {
    let amps = random_vector(rng, support.len());
    let mut v = ComplexVector::zeros(dim);
    for (&i, &a) in support.iter().zip(amps.iter()) {
        v[i] = a;
    }
    v.normalized()
}

/// One identity checked entrywise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectEntry {
    pub name: String,
    pub defect: f64,
}

/// Max entrywise defects of a family of matrix identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub tol: f64,
    pub entries: Vec<DefectEntry>,
}

impl DefectReport {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            entries: Vec::new(),
        }
    }

    /// Records `defect` under `name`, keeping the worst value per name.
    pub fn record(&mut self, name: &str, defect: f64) {
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => e.defect = e.defect.max(defect),
            None => self.entries.push(DefectEntry {
                name: name.to_string(),
                defect,
            }),
        }
    }

    pub fn max_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.defect).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.defect <= self.tol)
    }
}
