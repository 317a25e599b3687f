use serde::Serialize;

use crate::concepts::{ConceptClass, Hypothesis, ThresholdErm, VersionSpace};
use crate::domain::{empirical_error, Label, LabeledSample, Point};
use crate::error::{Error, Result};
use crate::geometry::{argmax_cdepth, CandidateConfig, DepthProfile, FeasibleSubspace, IntersectOutcome};

/// Which hypothesis generator the predictor runs.
#[derive(Clone, Debug)]
pub enum GeneratorKind {
    /// ERM over the class restricted by the hard queries.
    Oblivious(ConceptClass),
    /// cdepth maximization over the subspace cut out by hard-query hyperplanes.
    Halfspace { d: usize, candidates: CandidateConfig },
}

/// One hypothesis per block, plus diagnostics of how they were produced.
#[derive(Clone, Debug, Serialize)]
pub struct Ensemble {
    pub hard_count: usize,
    pub hypotheses: Vec<Hypothesis>,
    /// Number of newest hard constraints dropped to make the version space
    /// nonempty (0 when no fallback was needed).
    pub dropped_constraints: usize,
    pub degenerate: bool,
    /// Smallest per-block `cdepth / m` (halfspace generator only).
    pub min_cdepth_fraction: Option<f64>,
    /// Largest per-block empirical error.
    pub max_block_error: f64,
}

/// Generator state: a pure function of the blocks and the hard queries.
#[derive(Clone, Debug)]
pub(crate) enum Generator {
    Oblivious {
        blocks: Vec<LabeledSample>,
        version: VersionSpace,
        threshold_erm: Option<Vec<ThresholdErm>>,
    },
    Halfspace {
        blocks: Vec<LabeledSample>,
        profiles: Vec<DepthProfile>,
        subspace: FeasibleSubspace,
        candidates: CandidateConfig,
    },
}

impl Generator {
    pub(crate) fn new(kind: &GeneratorKind, blocks: Vec<LabeledSample>) -> Result<Self> {
        match kind {
            GeneratorKind::Oblivious(class) => {
                let threshold_erm = match class {
                    ConceptClass::Thresholds { .. } => {
                        Some(blocks.iter().map(ThresholdErm::new).collect::<Result<Vec<_>>>()?)
                    }
                    _ => None,
                };
                Ok(Generator::Oblivious { blocks, version: VersionSpace::new(class.clone()), threshold_erm })
            }
            GeneratorKind::Halfspace { d, candidates } => {
                let profiles = blocks.iter().map(DepthProfile::from_sample).collect::<Result<Vec<_>>>()?;
                if profiles.iter().any(|p| p.dim() != d + 1) {
                    return Err(crate::error::config(format!("halfspace generator expects {d}-d points")));
                }
                Ok(Generator::Halfspace {
                    blocks,
                    profiles,
                    subspace: FeasibleSubspace::full(d + 1),
                    candidates: candidates.clone(),
                })
            }
        }
    }

    pub(crate) fn subspace(&self) -> Option<&FeasibleSubspace> {
        match self {
            Generator::Halfspace { subspace, .. } => Some(subspace),
            _ => None,
        }
    }

    /// Records a hard query. Returns the intersection outcome for halfspaces.
    pub(crate) fn add_hard(&mut self, x: &Point, label: Label) -> Result<Option<IntersectOutcome>> {
        match self {
            Generator::Oblivious { version, .. } => {
                *version = version.restrict(x, label);
                Ok(None)
            }
            Generator::Halfspace { subspace, .. } => {
                let mut normal = x.coords().to_vec();
                normal.push(-1.0);
                let (next, outcome) = subspace.intersect(&normal)?;
                *subspace = next;
                Ok(Some(outcome))
            }
        }
    }

    pub(crate) fn generate(&self, hard_count: usize) -> Result<Ensemble> {
        match self {
            Generator::Oblivious { blocks, version, threshold_erm } => {
                let mut v = version.clone();
                let mut dropped = 0;
                while v.is_empty()? {
                    if v.constraints().is_empty() {
                        return Err(Error::VersionSpaceEmpty);
                    }
                    v = v.without_newest();
                    dropped += 1;
                }
                let hypotheses = match threshold_erm {
                    Some(erms) => {
                        let (lo, hi) = v.threshold_interval()?;
                        erms.iter().map(|e| Hypothesis::Threshold(e.best_in(lo, hi))).collect()
                    }
                    None => blocks.iter().map(|b| v.erm(b)).collect::<Result<Vec<_>>>()?,
                };
                let max_block_error = max_error(&hypotheses, blocks)?;
                Ok(Ensemble {
                    hard_count,
                    hypotheses,
                    dropped_constraints: dropped,
                    degenerate: false,
                    min_cdepth_fraction: None,
                    max_block_error,
                })
            }
            Generator::Halfspace { blocks, profiles, subspace, candidates } => {
                let mut hypotheses = Vec::with_capacity(profiles.len());
                let mut min_frac = f64::INFINITY;
                let mut degenerate = false;
                for p in profiles {
                    let best = argmax_cdepth(p, subspace, candidates)?;
                    degenerate |= best.degenerate;
                    if !p.is_empty() {
                        min_frac = min_frac.min(best.cdepth as f64 / p.len() as f64);
                    }
                    hypotheses.push(Hypothesis::Halfspace(best.point));
                }
                let max_block_error = max_error(&hypotheses, blocks)?;
                Ok(Ensemble {
                    hard_count,
                    hypotheses,
                    dropped_constraints: 0,
                    degenerate,
                    min_cdepth_fraction: min_frac.is_finite().then_some(min_frac),
                    max_block_error,
                })
            }
        }
    }
}

fn max_error(hypotheses: &[Hypothesis], blocks: &[LabeledSample]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (h, b) in hypotheses.iter().zip(blocks) {
        worst = worst.max(empirical_error(h, b)?);
    }
    Ok(worst)
}

/// Fraction of the ensemble voting `+1` at `x`: `(1 + mean label) / 2`.
pub fn vote_fraction(hypotheses: &[Hypothesis], x: &Point) -> Result<f64> {
    if hypotheses.is_empty() {
        return Err(crate::error::usage("vote needs at least one hypothesis"));
    }
    let mut positive = 0usize;
    for h in hypotheses {
        if h.evaluate(x)? == Label::Positive {
            positive += 1;
        }
    }
    Ok(positive as f64 / hypotheses.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_arithmetic() {
        let x = Point::scalar(5.0);
        let pos = vec![Hypothesis::Threshold(1); 3];
        let neg = vec![Hypothesis::Threshold(9); 3];
        assert_eq!(vote_fraction(&pos, &x).unwrap(), 1.0);
        assert_eq!(vote_fraction(&neg, &x).unwrap(), 0.0);
        let split = vec![
            Hypothesis::Threshold(1),
            Hypothesis::Threshold(9),
            Hypothesis::Threshold(2),
            Hypothesis::Threshold(8),
        ];
        assert_eq!(vote_fraction(&split, &x).unwrap(), 0.5);
        assert!(vote_fraction(&[], &x).is_err());
    }
}
