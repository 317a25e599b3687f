use std::collections::HashSet;

use super::{ConceptClass, EnumeratedClass, Hypothesis};
use crate::domain::{empirical_error, Label, LabeledSample, Point};
use crate::error::{usage, Error, Result};
use crate::geometry::{
    arrangement_candidates, linalg::null_vector, to_constraint, CandidateConfig, Constraint, DepthProfile,
    FeasibleSubspace,
};

/// A concept class restricted by `(point, label)` constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct VersionSpace {
    class: ConceptClass,
    constraints: Vec<(Point, Label)>,
}

impl VersionSpace {
    pub fn new(class: ConceptClass) -> Self {
        VersionSpace { class, constraints: Vec::new() }
    }

    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    pub fn constraints(&self) -> &[(Point, Label)] {
        &self.constraints
    }

    /// Keeps only hypotheses labelling `x` as `lab`.
    pub fn restrict(&self, x: &Point, lab: Label) -> VersionSpace {
        let mut next = self.clone();
        next.constraints.push((x.clone(), lab));
        next
    }

    /// Drops the most recently added constraint.
    pub fn without_newest(&self) -> VersionSpace {
        let mut next = self.clone();
        next.constraints.pop();
        next
    }

    /// Membership test: `h` satisfies every constraint.
    pub fn contains(&self, h: &Hypothesis) -> Result<bool> {
        for (x, lab) in &self.constraints {
            if h.evaluate(x)? != *lab {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Surviving thresholds as the inclusive range `[lo, hi]` (`lo > hi` when empty).
    pub fn threshold_interval(&self) -> Result<(i64, i64)> {
        let ConceptClass::Thresholds { domain } = self.class else {
            return Err(usage("threshold interval requested for a non-threshold class"));
        };
        let (mut lo, mut hi) = ConceptClass::threshold_range(domain);
        for (x, lab) in &self.constraints {
            let v = grid_floor(x)?;
            match lab {
                Label::Positive => hi = hi.min(v),
                Label::Negative => lo = lo.max(v.saturating_add(1)),
            }
        }
        Ok((lo, hi))
    }

    /// Indices of the enumerated rows that survive.
    pub fn enumerated_members(&self) -> Result<Vec<usize>> {
        let ConceptClass::Enumerated(class) = &self.class else {
            return Err(usage("member rows requested for a non-enumerated class"));
        };
        let cols = self
            .constraints
            .iter()
            .map(|(x, lab)| Ok((column(class, x)?, *lab)))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..class.len())
            .filter(|&r| cols.iter().all(|(c, lab)| class.patterns[r][*c] == *lab))
            .collect())
    }

    pub fn is_empty(&self) -> Result<bool> {
        match &self.class {
            ConceptClass::Thresholds { .. } => {
                let (lo, hi) = self.threshold_interval()?;
                Ok(lo > hi)
            }
            ConceptClass::Enumerated(_) => Ok(self.enumerated_members()?.is_empty()),
            ConceptClass::Halfspaces { dim } => Ok(halfspace_witness(&self.hard_constraints(*dim)?, dim + 1).is_none()),
        }
    }

    fn hard_constraints(&self, dim: usize) -> Result<Vec<Constraint>> {
        self.constraints
            .iter()
            .map(|(x, lab)| {
                if x.dim() != dim {
                    return Err(usage(format!("{}-d constraint point for halfspaces over R^{dim}", x.dim())));
                }
                Ok(to_constraint(x, *lab))
            })
            .collect()
    }

    /// A hypothesis in the version space minimizing empirical error on `sample`;
    /// ties go to the smallest threshold or the lowest row index.
    pub fn erm(&self, sample: &LabeledSample) -> Result<Hypothesis> {
        match &self.class {
            ConceptClass::Thresholds { .. } => {
                let (lo, hi) = self.threshold_interval()?;
                if lo > hi {
                    return Err(Error::VersionSpaceEmpty);
                }
                Ok(Hypothesis::Threshold(ThresholdErm::new(sample)?.best_in(lo, hi)))
            }
            ConceptClass::Enumerated(class) => {
                let members = self.enumerated_members()?;
                let cols = sample
                    .iter()
                    .map(|(x, lab)| Ok((column(class, x)?, *lab)))
                    .collect::<Result<Vec<_>>>()?;
                let best = members
                    .into_iter()
                    .min_by_key(|&r| {
                        let errors = cols.iter().filter(|(c, lab)| class.patterns[r][*c] != *lab).count();
                        (errors, r)
                    })
                    .ok_or(Error::VersionSpaceEmpty)?;
                Ok(Hypothesis::Enumerated { class: class.clone(), row: best })
            }
            ConceptClass::Halfspaces { dim } => self.halfspace_erm(*dim, sample),
        }
    }

    fn halfspace_erm(&self, dim: usize, sample: &LabeledSample) -> Result<Hypothesis> {
        let hard = self.hard_constraints(dim)?;
        let ambient = dim + 1;
        if halfspace_witness(&hard, ambient).is_none() {
            return Err(Error::VersionSpaceEmpty);
        }
        let mut all: Vec<Constraint> = sample.iter().map(|(x, l)| to_constraint(x, *l)).collect();
        all.extend(hard.iter().cloned());
        let profile = DepthProfile::new(ambient, all)?;
        let hard_profile = DepthProfile::new(ambient, hard)?;
        let mut candidates =
            arrangement_candidates(&profile, &FeasibleSubspace::full(ambient), &CandidateConfig::default())?;
        candidates.extend(halfspace_witness(hard_profile.constraints(), ambient));
        let mut best: Option<(f64, Hypothesis)> = None;
        for z in candidates {
            if hard_profile.depth(&z) != hard_profile.len() {
                continue;
            }
            let h = Hypothesis::Halfspace(z);
            let err = empirical_error(&h, sample)?;
            if best.as_ref().map_or(true, |(e, _)| err < *e) {
                best = Some((err, h));
            }
        }
        best.map(|(_, h)| h).ok_or(Error::VersionSpaceEmpty)
    }

    /// Number of distinct label tuples the version space induces on `queries`.
    pub fn pattern_count(&self, queries: &[Point]) -> Result<u64> {
        match &self.class {
            ConceptClass::Thresholds { .. } => {
                let (lo, hi) = self.threshold_interval()?;
                if lo > hi {
                    return Ok(0);
                }
                // Moving t past floor(q) flips q; each distinct cut point inside
                // the surviving range adds one pattern.
                let mut cuts = HashSet::new();
                for q in queries {
                    let v = grid_floor(q)?;
                    if lo <= v && v < hi {
                        cuts.insert(v);
                    }
                }
                Ok(1 + cuts.len() as u64)
            }
            ConceptClass::Enumerated(class) => {
                let cols = queries.iter().map(|q| column(class, q)).collect::<Result<Vec<_>>>()?;
                let rows: HashSet<Vec<Label>> = self
                    .enumerated_members()?
                    .into_iter()
                    .map(|r| cols.iter().map(|&c| class.patterns[r][c]).collect())
                    .collect();
                Ok(rows.len() as u64)
            }
            ConceptClass::Halfspaces { .. } => Err(Error::Capability(
                "pattern counting is not supported for halfspaces over a continuous domain".into(),
            )),
        }
    }
}

fn grid_floor(x: &Point) -> Result<i64> {
    if x.dim() != 1 {
        return Err(usage(format!("threshold constraint at {}-d point", x.dim())));
    }
    Ok(x.x0().floor() as i64)
}

fn column(class: &EnumeratedClass, x: &Point) -> Result<usize> {
    class
        .index_of(x)
        .ok_or_else(|| usage(format!("point {x} is outside the enumerated domain")))
}

/// A nonzero `z` with `<a, z> >= 0` for every constraint, if one exists.
///
/// A rank-deficient system has a null vector. Otherwise the feasible cone is
/// pointed, and it is nonzero iff one of its extreme rays exists; every
/// extreme ray lies on `dim - 1` independent boundary hyperplanes.
fn halfspace_witness(hard: &[Constraint], dim: usize) -> Option<Vec<f64>> {
    let normals: Vec<Vec<f64>> = hard.iter().map(|c| c.normal.clone()).collect();
    let basis = crate::geometry::linalg::orthonormalize(&normals, 1e-10);
    if basis.len() < dim {
        let mut s = FeasibleSubspace::full(dim);
        for b in &basis {
            s = s.intersect(b).ok()?.0;
        }
        return s.basis().first().cloned();
    }
    let n = hard.len();
    let k = dim - 1;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let rows: Vec<&[f64]> = idx.iter().map(|&i| hard[i].normal.as_slice()).collect();
        if let Some(v) = null_vector(&rows, dim) {
            for sign in [1.0, -1.0] {
                let z: Vec<f64> = v.iter().map(|c| c * sign).collect();
                if hard.iter().all(|c| c.satisfied(&z)) {
                    return Some(z);
                }
            }
        }
        let i = (0..k).rev().find(|&i| idx[i] != i + n - k)?;
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sorted label positions for fast threshold error evaluation.
#[derive(Clone, Debug)]
pub(crate) struct ThresholdErm {
    positives: Vec<i64>,
    negatives: Vec<i64>,
}

impl ThresholdErm {
    pub(crate) fn new(sample: &LabeledSample) -> Result<Self> {
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for (x, lab) in sample.iter() {
            let v = grid_floor(x)?;
            match lab {
                Label::Positive => positives.push(v),
                Label::Negative => negatives.push(v),
            }
        }
        positives.sort_unstable();
        negatives.sort_unstable();
        Ok(ThresholdErm { positives, negatives })
    }

    /// Mistakes of threshold `t`: positives below `t` plus negatives at or above it.
    pub(crate) fn errors(&self, t: i64) -> usize {
        let pos_below = self.positives.partition_point(|&v| v < t);
        let neg_above = self.negatives.len() - self.negatives.partition_point(|&v| v < t);
        pos_below + neg_above
    }

    /// Smallest error-minimizing threshold in `[lo, hi]`. Errors only change
    /// at `floor(x) + 1`, so those points and `lo` cover every value.
    pub(crate) fn best_in(&self, lo: i64, hi: i64) -> i64 {
        let mut best = (self.errors(lo), lo);
        for v in self.positives.iter().chain(&self.negatives) {
            let t = v.saturating_add(1);
            if t > lo && t <= hi {
                best = best.min((self.errors(t), t));
            }
        }
        best.1
    }
}
