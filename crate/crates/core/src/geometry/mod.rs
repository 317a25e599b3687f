//! Linear-feasibility geometry for halfspaces: homogeneous constraints,
//! depth and convexified depth, hull membership by Phase-I simplex, and
//! subspace intersection.

mod candidates;
mod constraint;
mod depth;
pub mod linalg;
mod lp;
mod search;
mod subsample;
mod subspace;

pub use candidates::{arrangement_candidates, dedup, sphere_sample, CandidateConfig, DEDUP_TOL};
pub use constraint::{to_constraint, Constraint, DepthProfile};
pub use depth::{cdepth, CandidateSet};
pub use lp::{
    cone_membership, cone_membership_exact, hull_membership, hull_membership_exact, Membership, LP_TOL,
};
pub use search::{argmax_cdepth, argmax_over, CdepthMax};
pub use subsample::{cdepth_subsample_check, SubsampleCheck, SubsampleReport};
pub use subspace::{FeasibleSubspace, IntersectOutcome, REDUNDANCY_TOL};

/// A constraint counts as satisfied when `<a, z> >= -SATISFY_TOL`.
pub const SATISFY_TOL: f64 = 1e-12;
