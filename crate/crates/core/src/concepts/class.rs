use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::domain::{Label, Point};
use crate::error::{config, Result};

/// A finite class given by its label patterns on a finite point set.
#[derive(Clone, Debug, PartialEq)]
pub struct EnumeratedClass {
    pub points: Vec<Point>,
    /// `patterns[h][i]` is hypothesis `h`'s label on `points[i]`.
    pub patterns: Vec<Vec<Label>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Deserialize)]
struct EnumeratedFile {
    points: Vec<PointSpec>,
    patterns: Vec<Vec<i8>>,
}

impl EnumeratedClass {
    pub fn new(points: Vec<Point>, patterns: Vec<Vec<Label>>) -> Result<Self> {
        if points.is_empty() {
            return Err(config("enumerated class needs at least one point"));
        }
        let d = points[0].dim();
        if points.iter().any(|p| p.dim() != d) {
            return Err(config("enumerated class points must share one dimension"));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(config(format!("duplicate point {p} in enumerated class")));
            }
        }
        if patterns.iter().any(|row| row.len() != points.len()) {
            return Err(config("every pattern must label every point"));
        }
        Ok(EnumeratedClass { points, patterns })
    }

    /// Parses `{"points": [...], "patterns": [[±1, ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnumeratedFile = serde_json::from_str(text)?;
        let points = file
            .points
            .into_iter()
            .map(|p| match p {
                PointSpec::Scalar(x) => Point::new(vec![x]),
                PointSpec::Vector(v) => Point::new(v),
            })
            .collect::<Result<Vec<_>>>()?;
        let patterns = file
            .patterns
            .into_iter()
            .map(|row| row.into_iter().map(Label::try_from).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        EnumeratedClass::new(points, patterns)
    }

    pub fn load(path: &Path) -> Result<Self> {
        EnumeratedClass::from_json(&std::fs::read_to_string(path)?)
    }

    /// Every function on `n` distinct scalar points `1..=n`, in binary order.
    pub fn all_functions(n: usize) -> Self {
        let points = (1..=n).map(|i| Point::scalar(i as f64)).collect();
        let patterns = (0..1usize << n)
            .map(|mask| (0..n).map(|i| Label::from_bool(mask >> i & 1 == 1)).collect())
            .collect();
        EnumeratedClass::new(points, patterns).expect("well-formed full class")
    }

    pub fn index_of(&self, x: &Point) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// The hypothesis families the generators support.
#[derive(Clone, Debug, PartialEq)]
pub enum ConceptClass {
    /// Thresholds `x >= t` with `t` in `1..=domain+1` over the grid `1..=domain`.
    Thresholds { domain: u64 },
    Enumerated(Arc<EnumeratedClass>),
    /// Halfspaces over `R^dim`.
    Halfspaces { dim: usize },
}

impl ConceptClass {
    /// Smallest and largest threshold value in the class.
    pub fn threshold_range(domain: u64) -> (i64, i64) {
        (1, domain as i64 + 1)
    }
}

/// Exact VC dimension. Halfspaces over `R^d` have VC dimension `d + 1`.
pub fn vc_dimension(class: &ConceptClass) -> usize {
    match class {
        ConceptClass::Thresholds { .. } => 1,
        ConceptClass::Halfspaces { dim } => dim + 1,
        ConceptClass::Enumerated(c) => enumerated_vc(c),
    }
}

fn enumerated_vc(class: &EnumeratedClass) -> usize {
    if class.is_empty() {
        return 0;
    }
    // A shattered set of size s needs 2^s distinct hypotheses.
    let max_size = (usize::BITS - 1 - class.len().leading_zeros()) as usize;
    let max_size = max_size.min(class.points.len());
    let mut best = 0;
    for size in 1..=max_size {
        if shatters_some_subset(class, size) {
            best = size;
        } else {
            // Subsets of a shattered set are shattered, so sizes are downward closed.
            break;
        }
    }
    best
}

fn shatters_some_subset(class: &EnumeratedClass, size: usize) -> bool {
    let n = class.points.len();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mut seen = std::collections::HashSet::new();
        for row in &class.patterns {
            let key: u64 = idx
                .iter()
                .enumerate()
                .fold(0, |acc, (b, &i)| acc | (u64::from(row[i] == Label::Positive) << b));
            seen.insert(key);
        }
        if seen.len() == 1usize << size {
            return true;
        }
        // Next combination in lexicographic order.
        let mut i = size;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] != i + n - size {
                break;
            }
            if i == 0 {
                return false;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_have_vc_one() {
        assert_eq!(vc_dimension(&ConceptClass::Thresholds { domain: 1 << 20 }), 1);
    }

    #[test]
    fn full_class_on_three_points() {
        let c = ConceptClass::Enumerated(Arc::new(EnumeratedClass::all_functions(3)));
        assert_eq!(vc_dimension(&c), 3);
    }

    #[test]
    fn halfspaces_analytic() {
        assert_eq!(vc_dimension(&ConceptClass::Halfspaces { dim: 2 }), 3);
    }

    #[test]
    fn parses_json() {
        let c = EnumeratedClass::from_json(
            r#"{"points": [1, 2], "patterns": [[1, -1], [-1, -1]]}"#,
        )
        .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.patterns[0][0], Label::Positive);
        let v = EnumeratedClass::from_json(r#"{"points": [[0.5, 1.0]], "patterns": [[1]]}"#).unwrap();
        assert_eq!(v.points[0].dim(), 2);
        assert!(EnumeratedClass::from_json(r#"{"points": [1], "patterns": [[0]]}"#).is_err());
        assert!(EnumeratedClass::from_json(r#"{"points": [1, 2], "patterns": [[1]]}"#).is_err());
    }
}
