//! Experiment configuration, sample-size planners, seeded trial
//! orchestration, and CSV/JSON output.

mod audit;
mod config;
mod experiment;
mod plan;
mod replay;

pub use audit::{audit_events, run_audit, AuditConfig, AuditOutcome, AuditTranscript};
pub use config::{AdversaryConfig, BtOverride, Constants, ExperimentConfig, Gate, Mode, SEED_ENV};
pub use experiment::{
    gate_fraction, majority, planning_dimension, read_csv, resolve_plan, run_experiment, run_trial, run_trials,
    setup_trial, trial_seed, write_csv, AggregateRow, ExperimentSummary, TrialOutcome, TrialSetup, CSV_HEADER,
};
pub use plan::{approximation_size, plan_direct, plan_halfspace, plan_oblivious, PlanResult};
pub use replay::{halving_events, replay_subspace, HalvingEvent};
