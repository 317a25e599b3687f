//! Differentially private prediction over adversarial query streams.
//!
//! A sample is split into blocks, each block trains a hypothesis, and the
//! ensemble's vote on every query passes through a BetweenThresholds
//! instance. Only queries the ensemble is unsure about ("hard" queries) cost
//! privacy; the hypothesis generators shrink their search space on each one
//! so that few hard queries occur.

pub mod adversary;
pub mod concepts;
pub mod domain;
pub mod dp;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod predictor;

pub use error::{Error, Result};
