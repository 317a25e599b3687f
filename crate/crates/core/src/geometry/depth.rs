use super::constraint::DepthProfile;
use super::lp::cone_membership;
use crate::error::{usage, Result};

/// Candidate points with their depths cached against one profile.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    points: Vec<Vec<f64>>,
    depths: Vec<usize>,
}

impl CandidateSet {
    pub fn new(profile: &DepthProfile, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(usage("cdepth needs a nonempty candidate set"));
        }
        if let Some(p) = points.iter().find(|p| p.len() != profile.dim()) {
            return Err(usage(format!(
                "candidate of dimension {} for a profile over R^{}",
                p.len(),
                profile.dim()
            )));
        }
        let depths = points.iter().map(|p| profile.depth(p)).collect();
        Ok(CandidateSet { points, depths })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn max_depth(&self) -> usize {
        self.depths.iter().copied().max().unwrap_or(0)
    }

    fn superlevel(&self, y: usize) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .zip(&self.depths)
            .filter(|(_, d)| **d >= y)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Largest level `y` (among `depth(z)` and the candidate depths) such that
    /// `z` lies in the hull of the candidates of depth at least `y`.
    pub fn cdepth(&self, profile: &DepthProfile, z: &[f64]) -> usize {
        let own = profile.depth(z);
        let mut levels: Vec<usize> = self.depths.iter().copied().filter(|d| *d > own).collect();
        levels.sort_unstable();
        levels.dedup();
        let member = |y: usize| cone_membership(&self.superlevel(y), z).is_member();
        // Hulls of superlevel sets are nested, so membership is monotone in y.
        // Most probes fail at the lowest level, so try it before bisecting.
        match levels.first() {
            None => return own,
            Some(&y) if !member(y) => return own,
            _ => {}
        }
        let (mut lo, mut hi) = (0, levels.len() - 1);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if member(levels[mid]) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        levels[lo]
    }
}

/// Convexified depth of `z` relative to `candidates`; a lower bound on the
/// exact value, tight when the candidates include every arrangement vertex.
pub fn cdepth(profile: &DepthProfile, z: &[f64], candidates: &[Vec<f64>]) -> Result<usize> {
    if z.len() != profile.dim() {
        return Err(usage("probe dimension does not match the profile"));
    }
    Ok(CandidateSet::new(profile, candidates.to_vec())?.cdepth(profile, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Constraint;

    /// `z >= 1`, `z <= 2`, `z <= 3` lifted to homogeneous form on `(z, s)`.
    fn line_profile() -> DepthProfile {
        let cs = [[1.0, -1.0], [-1.0, 2.0], [-1.0, 3.0]]
            .iter()
            .map(|n| Constraint { normal: n.to_vec() })
            .collect();
        DepthProfile::new(2, cs).unwrap()
    }

    fn lifted_grid() -> Vec<Vec<f64>> {
        (0..=28).map(|i| vec![-2.0 + 0.25 * i as f64, 1.0]).collect()
    }

    /// Brute-force convexification on the line: the largest level whose
    /// superlevel interval (min..max of grid points at that level) holds z.
    fn line_oracle(profile: &DepthProfile, z: f64) -> usize {
        let grid = lifted_grid();
        let own = profile.depth(&[z, 1.0]);
        (0..=profile.len())
            .filter(|&y| {
                let xs: Vec<f64> = grid.iter().filter(|p| profile.depth(p) >= y).map(|p| p[0]).collect();
                !xs.is_empty()
                    && xs.iter().cloned().fold(f64::INFINITY, f64::min) <= z
                    && z <= xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            })
            .max()
            .unwrap_or(0)
            .max(own)
    }

    #[test]
    fn one_dimensional_profile_matches_grid_oracle() {
        let p = line_profile();
        let grid = lifted_grid();
        for i in 0..=56 {
            let z = -2.0 + 0.125 * i as f64;
            assert_eq!(cdepth(&p, &[z, 1.0], &grid).unwrap(), line_oracle(&p, z), "z = {z}");
        }
        assert_eq!(cdepth(&p, &[1.5, 1.0], &grid).unwrap(), 3);
        assert_eq!(cdepth(&p, &[2.5, 1.0], &grid).unwrap(), 2);
    }

    #[test]
    fn cdepth_at_least_depth() {
        let p = line_profile();
        let far = vec![vec![0.0, 1.0]];
        for z in [-1.0, 0.5, 1.5, 2.5, 4.0] {
            assert!(cdepth(&p, &[z, 1.0], &far).unwrap() >= p.depth(&[z, 1.0]));
        }
    }

    #[test]
    fn empty_candidates_rejected() {
        assert!(cdepth(&line_profile(), &[0.0, 1.0], &[]).is_err());
    }
}
