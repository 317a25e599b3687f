//! Domain types, seeded randomness and data distributions.

mod distribution;
mod noise;
mod types;

pub use distribution::{draw_sample, empirical_error, partition, Atom, DataDistribution, Sampler};
pub use noise::{derive_seed, NoiseSource};
pub use types::{Label, LabeledSample, Point};
