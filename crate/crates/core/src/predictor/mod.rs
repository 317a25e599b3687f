//! The subsample-and-aggregate prediction loop and its hypothesis generators.

mod engine;
mod generator;

pub use engine::{
    default_v_max_halfspace, default_v_max_oblivious, required_blocks, run, run_with_blocks, FallbackFlag,
    GenerationRecord, Predictor, PredictorConfig, RoundRecord, RunReport, TopRecord, T_LOWER, T_UPPER,
};
pub use generator::{vote_fraction, Ensemble, GeneratorKind};
