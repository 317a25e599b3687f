use serde::Serialize;

use super::candidates::{arrangement_candidates, CandidateConfig};
use super::constraint::DepthProfile;
use super::depth::CandidateSet;
use super::linalg::normalized;
use super::subspace::FeasibleSubspace;
use crate::error::Result;

/// A cdepth maximizer found over a candidate set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdepthMax {
    /// Unit vector in the subspace, or the zero vector when `degenerate`.
    pub point: Vec<f64>,
    pub cdepth: usize,
    pub depth: usize,
    /// The subspace had dimension 0, so only the zero vector was available.
    pub degenerate: bool,
}

/// Maximizes cdepth over the arrangement candidates of `subspace`.
pub fn argmax_cdepth(
    profile: &DepthProfile,
    subspace: &FeasibleSubspace,
    cfg: &CandidateConfig,
) -> Result<CdepthMax> {
    if subspace.dim() == 0 {
        return Ok(CdepthMax {
            point: vec![0.0; subspace.ambient()],
            cdepth: profile.len(),
            depth: profile.len(),
            degenerate: true,
        });
    }
    let set = CandidateSet::new(profile, arrangement_candidates(profile, subspace, cfg)?)?;
    Ok(argmax_over(profile, &set))
}

/// Maximizes cdepth over a fixed candidate set.
///
/// No candidate can have cdepth above the largest candidate depth, and every
/// candidate at that depth attains it. The mean of those top candidates lies
/// in their hull as well, so it attains the same value and is preferred when
/// its own depth is no worse, as it sits away from constraint boundaries.
pub fn argmax_over(profile: &DepthProfile, set: &CandidateSet) -> CdepthMax {
    let top = set.max_depth();
    let top_points: Vec<&Vec<f64>> = set
        .points()
        .iter()
        .zip(set.depths())
        .filter(|(_, d)| **d == top)
        .map(|(p, _)| p)
        .collect();
    let first = top_points[0].clone();
    let mut best = CdepthMax { point: first, cdepth: top, depth: top, degenerate: false };
    let dim = profile.dim();
    let mut mean = vec![0.0; dim];
    for p in &top_points {
        for (m, v) in mean.iter_mut().zip(p.iter()) {
            *m += v;
        }
    }
    if let Some(probe) = normalized(&mean) {
        let depth = profile.depth(&probe);
        let cdepth = set.cdepth(profile, &probe);
        if (cdepth, depth) >= (best.cdepth, best.depth) {
            best = CdepthMax { point: probe, cdepth, depth, degenerate: false };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Label, Point};
    use crate::geometry::to_constraint;

    #[test]
    fn feasible_profile_reaches_full_cdepth() {
        let pts = [(0.5, 0.2, Label::Positive), (-0.5, 0.1, Label::Negative), (0.9, -0.3, Label::Positive)];
        let cs = pts
            .iter()
            .map(|(a, b, l)| to_constraint(&Point::new(vec![*a, *b]).unwrap(), *l))
            .collect();
        let p = DepthProfile::new(3, cs).unwrap();
        let best = argmax_cdepth(&p, &FeasibleSubspace::full(3), &CandidateConfig::default()).unwrap();
        assert_eq!(best.cdepth, 3);
        assert_eq!(p.depth(&best.point), 3);
        assert!(!best.degenerate);
    }

    #[test]
    fn collapsed_subspace_is_degenerate() {
        let p = DepthProfile::new(2, vec![]).unwrap();
        let mut s = FeasibleSubspace::full(2);
        s = s.intersect(&[1.0, 0.0]).unwrap().0;
        s = s.intersect(&[0.0, 1.0]).unwrap().0;
        let best = argmax_cdepth(&p, &s, &CandidateConfig::default()).unwrap();
        assert!(best.degenerate);
        assert_eq!(best.point, vec![0.0, 0.0]);
    }
}
