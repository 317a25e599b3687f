use serde::Serialize;

use super::linalg::{axpy, dot, norm, orthonormalize, scaled};
use crate::error::{usage, Result};

/// Normalized projections at or below this size mark a constraint as redundant.
pub const REDUNDANCY_TOL: f64 = 1e-9;

/// A linear subspace of `R^ambient` given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibleSubspace {
    ambient: usize,
    basis: Vec<Vec<f64>>,
}

/// Whether an intersection reduced the dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectOutcome {
    Reduced,
    Redundant,
}

impl FeasibleSubspace {
    /// All of `R^ambient`.
    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut e = vec![0.0; ambient];
                e[i] = 1.0;
                e
            })
            .collect();
        FeasibleSubspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Coordinates of `v` in the basis (orthogonal projection).
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, v)).collect()
    }

    /// The ambient vector with the given basis coordinates.
    pub fn embed(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            axpy(&mut out, *c, b);
        }
        out
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }

    /// Intersects with the hyperplane `<normal, z> = 0`.
    pub fn intersect(&self, normal: &[f64]) -> Result<(FeasibleSubspace, IntersectOutcome)> {
        if normal.len() != self.ambient {
            return Err(usage(format!(
                "normal of dimension {} for a subspace of R^{}",
                normal.len(),
                self.ambient
            )));
        }
        if normal.iter().any(|c| !c.is_finite()) {
            return Err(usage("hyperplane normal must be finite"));
        }
        let n = norm(normal);
        if n == 0.0 {
            return Err(usage("hyperplane normal must be nonzero"));
        }
        let unit = scaled(normal, 1.0 / n);
        let c = self.coordinates(&unit);
        if norm(&c) <= REDUNDANCY_TOL {
            return Ok((self.clone(), IntersectOutcome::Redundant));
        }
        // Orthonormal basis of the complement of `c` inside the coordinate
        // space, then mapped back through the current basis.
        let r = self.dim();
        let mut seeds = vec![c.clone()];
        for i in 0..r {
            let mut e = vec![0.0; r];
            e[i] = 1.0;
            seeds.push(e);
        }
        let q = orthonormalize(&seeds, 1e-10);
        let mapped: Vec<Vec<f64>> = q[1..].iter().map(|v| self.embed(v)).collect();
        let mut basis = orthonormalize(&mapped, 1e-10);
        basis.truncate(r - 1);
        Ok((FeasibleSubspace { ambient: self.ambient, basis }, IntersectOutcome::Reduced))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_hyperplane() {
        let (s, o) = FeasibleSubspace::full(3).intersect(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(o, IntersectOutcome::Reduced);
        assert_eq!(s.dim(), 2);
        for b in s.basis() {
            assert!(b[2].abs() < 1e-15);
        }
        assert!(s.orthonormality_error() < 1e-12);
    }

    #[test]
    fn repeated_normal_is_redundant() {
        let (s, _) = FeasibleSubspace::full(3).intersect(&[1.0, 2.0, 3.0]).unwrap();
        let (t, o) = s.intersect(&[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(o, IntersectOutcome::Redundant);
        assert_eq!(t, s);
    }

    #[test]
    fn three_normals_collapse_r3() {
        let mut s = FeasibleSubspace::full(3);
        for n in [[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]] {
            let (t, o) = s.intersect(&n).unwrap();
            assert_eq!(o, IntersectOutcome::Reduced);
            s = t;
        }
        assert_eq!(s.dim(), 0);
        let (t, o) = s.intersect(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!((t.dim(), o), (0, IntersectOutcome::Redundant));
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(FeasibleSubspace::full(2).intersect(&[0.0, 0.0]).is_err());
    }
}
