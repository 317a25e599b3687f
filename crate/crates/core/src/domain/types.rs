use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};

/// A point of the query/sample domain. Coordinates are always finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(config("point must have dimension >= 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(config(format!("point has non-finite coordinate: {coords:?}")));
        }
        Ok(Point(coords))
    }

    /// One-dimensional point, used by the threshold experiments.
    pub fn scalar(x: f64) -> Self {
        Point::new(vec![x]).expect("finite scalar point")
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// First coordinate; the whole point for 1-d domains.
    pub fn x0(&self) -> f64 {
        self.0[0]
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

/// A binary label in {-1, +1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.sign())
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(config(format!("label must be +1 or -1, got {other}"))),
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        l.sign()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.sign())
    }
}

/// Ordered multiset of labeled points sharing one dimension.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LabeledSample {
    records: Vec<(Point, Label)>,
}

impl LabeledSample {
    pub fn new(records: Vec<(Point, Label)>) -> Result<Self> {
        if let Some((first, _)) = records.first() {
            let d = first.dim();
            if records.iter().any(|(p, _)| p.dim() != d) {
                return Err(config("all points of a sample must share one dimension"));
            }
        }
        Ok(LabeledSample { records })
    }

    pub fn records(&self) -> &[(Point, Label)] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.records.first().map(|(p, _)| p.dim())
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Point, Label)> {
        self.records.iter()
    }

    /// Copy of the sample with record `index` replaced; used to build neighbors.
    pub fn with_record(&self, index: usize, record: (Point, Label)) -> Result<Self> {
        if index >= self.records.len() {
            return Err(config(format!("record index {index} out of range")));
        }
        let mut records = self.records.clone();
        records[index] = record;
        LabeledSample::new(records)
    }

    /// Number of positions at which two equal-length samples differ.
    pub fn hamming_distance(&self, other: &LabeledSample) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        Some(
            self.records
                .iter()
                .zip(&other.records)
                .filter(|(a, b)| a != b)
                .count(),
        )
    }
}

impl FromIterator<(Point, Label)> for LabeledSample {
    fn from_iter<I: IntoIterator<Item = (Point, Label)>>(iter: I) -> Self {
        LabeledSample::new(iter.into_iter().collect()).expect("points of one dimension")
    }
}
