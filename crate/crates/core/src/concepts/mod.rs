//! Concept classes, hypotheses, and version spaces.

mod class;
mod hypothesis;
mod version_space;

pub use class::{vc_dimension, ConceptClass, EnumeratedClass};
pub use hypothesis::{halfspace_margin, Hypothesis};
pub(crate) use version_space::ThresholdErm;
pub use version_space::VersionSpace;
