use serde::Serialize;

use super::linalg::dot;
use super::SATISFY_TOL;
use crate::domain::{Label, LabeledSample, Point};
use crate::error::{usage, Result};

/// Homogeneous linear constraint `<normal, z> >= 0` on parameter space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub normal: Vec<f64>,
}

impl Constraint {
    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        dot(&self.normal, z)
    }

    pub fn satisfied(&self, z: &[f64]) -> bool {
        self.value(z) >= -SATISFY_TOL
    }
}

/// Maps a labelled point to the constraint on halfspace weights
/// `(a, w)` that classifies it correctly: `lab * <(x, -1), (a, w)> >= 0`.
pub fn to_constraint(x: &Point, lab: Label) -> Constraint {
    let s = lab.as_f64();
    let mut normal: Vec<f64> = x.coords().iter().map(|c| s * c).collect();
    normal.push(-s);
    Constraint { normal }
}

/// The constraint multiset one block of data induces on parameter space.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthProfile {
    constraints: Vec<Constraint>,
    dim: usize,
}

impl DepthProfile {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.dim() != dim) {
            return Err(usage(format!(
                "constraint of dimension {} in a profile over R^{dim}",
                c.dim()
            )));
        }
        Ok(DepthProfile { constraints, dim })
    }

    pub fn from_sample(sample: &LabeledSample) -> Result<Self> {
        let dim = sample.dim().map(|d| d + 1).unwrap_or(1);
        let constraints = sample.iter().map(|(x, l)| to_constraint(x, *l)).collect();
        DepthProfile::new(dim, constraints)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Ambient dimension of parameter space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of constraints satisfied at `z`.
    pub fn depth(&self, z: &[f64]) -> usize {
        self.constraints.iter().filter(|c| c.satisfied(z)).count()
    }
}
