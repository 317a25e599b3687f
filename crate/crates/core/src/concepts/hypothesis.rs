use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::EnumeratedClass;
use crate::domain::{Label, Point};
use crate::error::{usage, Result};
use crate::geometry::SATISFY_TOL;

/// A concrete hypothesis `X -> {-1,+1}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Hypothesis {
    /// `x >= t` on a one-dimensional integer domain.
    Threshold(i64),
    /// Row `row` of an enumerated class's pattern matrix.
    Enumerated { class: Arc<EnumeratedClass>, row: usize },
    /// Weights `(a_1, .., a_d, w)`: positive iff `<a, x> >= w`.
    Halfspace(Vec<f64>),
}

impl Hypothesis {
    pub fn evaluate(&self, x: &Point) -> Result<Label> {
        match self {
            Hypothesis::Threshold(t) => {
                if x.dim() != 1 {
                    return Err(usage(format!("threshold evaluated at {}-d point", x.dim())));
                }
                Ok(Label::from_bool(x.x0() >= *t as f64))
            }
            Hypothesis::Enumerated { class, row } => {
                let idx = class
                    .index_of(x)
                    .ok_or_else(|| usage(format!("point {x} is outside the enumerated domain")))?;
                Ok(class.patterns[*row][idx])
            }
            Hypothesis::Halfspace(z) => Ok(Label::from_bool(halfspace_margin(z, x)? >= -SATISFY_TOL)),
        }
    }

    /// Input dimension this hypothesis accepts, when fixed.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            Hypothesis::Threshold(_) => Some(1),
            Hypothesis::Enumerated { class, .. } => class.points.first().map(Point::dim),
            Hypothesis::Halfspace(z) => Some(z.len().saturating_sub(1)),
        }
    }

    /// The all-zero halfspace; it labels every point +1.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Hypothesis::Halfspace(z) if z.iter().all(|c| *c == 0.0))
    }
}

/// `<a, x> - w` for weights `z = (a, w)`.
pub fn halfspace_margin(z: &[f64], x: &Point) -> Result<f64> {
    if z.len() != x.dim() + 1 {
        return Err(usage(format!(
            "halfspace over R^{} evaluated at {}-d point",
            z.len().saturating_sub(1),
            x.dim()
        )));
    }
    let d = x.dim();
    Ok(z[..d].iter().zip(x.coords()).map(|(a, c)| a * c).sum::<f64>() - z[d])
}

impl Serialize for Hypothesis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            Hypothesis::Threshold(t) => map.serialize_entry("threshold", t)?,
            Hypothesis::Enumerated { row, .. } => map.serialize_entry("enumerated", row)?,
            Hypothesis::Halfspace(z) => map.serialize_entry("halfspace", z)?,
        }
        map.end()
    }
}
