use serde::Serialize;

use crate::concepts::{ConceptClass, VersionSpace};
use crate::domain::Point;
use crate::error::Result;
use crate::geometry::{FeasibleSubspace, IntersectOutcome};
use crate::predictor::RunReport;

/// Version-space shrinkage at one hard query, measured on a query list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalvingEvent {
    pub round: usize,
    pub before: u64,
    pub after: u64,
    /// The ensemble answering this round was built with dropped constraints.
    pub fallback: bool,
    /// `after <= before / 2`, and no fallback was involved.
    pub halved: bool,
}

/// Replays the hard queries of `report` against `class` and counts the label
/// patterns the version space induces on `queries` before and after each one.
pub fn halving_events(class: &ConceptClass, report: &RunReport, queries: &[Point]) -> Result<Vec<HalvingEvent>> {
    let mut version = VersionSpace::new(class.clone());
    let mut out = Vec::with_capacity(report.top_rounds.len());
    for (i, top) in report.top_rounds.iter().enumerate() {
        let before = version.pattern_count(queries)?;
        version = version.restrict(&top.x, top.label);
        let after = version.pattern_count(queries)?;
        let fallback = report.fallback_flags.iter().any(|f| f.hard_count == i);
        let halved = !fallback && before > 0 && 2 * after <= before;
        out.push(HalvingEvent { round: top.round, before, after, fallback, halved });
    }
    Ok(out)
}

/// Recomputes the feasible-subspace chain of a halfspace run from its hard
/// queries; entry `i` is the dimension and outcome after hard query `i`.
pub fn replay_subspace(d: usize, report: &RunReport) -> Result<Vec<(usize, IntersectOutcome)>> {
    let mut space = FeasibleSubspace::full(d + 1);
    let mut out = Vec::with_capacity(report.top_rounds.len());
    for top in &report.top_rounds {
        let mut normal = top.x.coords().to_vec();
        normal.push(-1.0);
        let (next, outcome) = space.intersect(&normal)?;
        space = next;
        out.push((space.dim(), outcome));
    }
    Ok(out)
}
