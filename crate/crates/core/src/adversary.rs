//! Query-stream generators: offline, oblivious, stochastic, and adaptive.

use std::path::Path;

use serde::Serialize;

use crate::domain::{DataDistribution, Label, NoiseSource, Point};
use crate::error::{config, Error, Result};
use crate::geometry::linalg::{dot, norm};

/// Adaptive attack strategies. They observe only the public `(x, Label)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum AdaptiveStrategy {
    /// Queries the midpoint of an integer interval, moving the upper end down
    /// on `+1` and the lower end up on `-1`.
    ThresholdBisection { lo: i64, hi: i64 },
    /// Tracks a perceptron estimate `(a, b)` of the boundary `<a, x> = b` and
    /// queries random box points moved to distance `tau` from it, alternating
    /// sides.
    BoundaryProbe { lo: Vec<f64>, hi: Vec<f64>, tau: f64, weights: Vec<f64>, positive_side: bool },
}

#[derive(Clone, Debug, Serialize)]
pub enum AdversaryKind {
    /// A fixed list that may be disclosed to analysis tooling before the run.
    Offline(Vec<Point>),
    /// A fixed list revealed one query at a time.
    Oblivious(Vec<Point>),
    Stochastic(#[serde(skip)] Box<DataDistribution>),
    Adaptive(AdaptiveStrategy),
}

/// A query stream with its own randomness, independent of the predictor's.
#[derive(Clone, Debug)]
pub struct Adversary {
    kind: AdversaryKind,
    issued: usize,
    consumed: usize,
    last_query: Option<Point>,
    noise: NoiseSource,
}

impl Adversary {
    pub fn new(kind: AdversaryKind, noise: NoiseSource) -> Self {
        Adversary { kind, issued: 0, consumed: 0, last_query: None, noise }
    }

    pub fn oblivious(list: Vec<Point>) -> Self {
        Adversary::new(AdversaryKind::Oblivious(list), NoiseSource::zero())
    }

    pub fn offline(list: Vec<Point>) -> Self {
        Adversary::new(AdversaryKind::Offline(list), NoiseSource::zero())
    }

    pub fn stochastic(dist: DataDistribution, seed: u64) -> Self {
        Adversary::new(AdversaryKind::Stochastic(Box::new(dist)), NoiseSource::seeded(seed))
    }

    pub fn bisection(lo: i64, hi: i64) -> Self {
        Adversary::new(AdversaryKind::Adaptive(AdaptiveStrategy::ThresholdBisection { lo, hi }), NoiseSource::zero())
    }

    /// Boundary probe over the box `[lo, hi]` at distance `tau`.
    pub fn boundary_probe(lo: Vec<f64>, hi: Vec<f64>, tau: f64, seed: u64) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(config("boundary probe needs a nonempty box with lo < hi"));
        }
        let weights = vec![0.0; lo.len() + 1];
        let strategy = AdaptiveStrategy::BoundaryProbe { lo, hi, tau, weights, positive_side: true };
        Ok(Adversary::new(AdversaryKind::Adaptive(strategy), NoiseSource::seeded(seed)))
    }

    /// Default probe distance: `2 alpha` times the box diameter.
    pub fn default_probe_distance(alpha: f64, lo: &[f64], hi: &[f64]) -> f64 {
        let diam: f64 = lo.iter().zip(hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
        2.0 * alpha * diam
    }

    pub fn kind(&self) -> &AdversaryKind {
        &self.kind
    }

    /// The full list of an offline adversary, for analysis before the run.
    pub fn disclose(&self) -> Option<&[Point]> {
        match &self.kind {
            AdversaryKind::Offline(list) => Some(list),
            _ => None,
        }
    }

    /// Next query given the public transcript of `(x, Label)` pairs so far.
    pub fn next_query(&mut self, public: &[(Point, Label)]) -> Result<Point> {
        for (x, lab) in &public[self.consumed.min(public.len())..] {
            observe(&mut self.kind, x, *lab);
        }
        self.consumed = public.len();
        let q = match &mut self.kind {
            AdversaryKind::Offline(list) | AdversaryKind::Oblivious(list) => {
                list.get(self.issued).cloned().ok_or(Error::StreamEnd)?
            }
            AdversaryKind::Stochastic(dist) => dist.draw_point(&mut self.noise),
            AdversaryKind::Adaptive(AdaptiveStrategy::ThresholdBisection { lo, hi }) => {
                Point::scalar(lo.saturating_add(*hi).div_euclid(2) as f64)
            }
            AdversaryKind::Adaptive(AdaptiveStrategy::BoundaryProbe { lo, hi, tau, weights, positive_side }) => {
                let q = probe(lo, hi, *tau, weights, *positive_side, &mut self.noise);
                *positive_side = !*positive_side;
                q
            }
        };
        self.issued += 1;
        self.last_query = Some(q.clone());
        Ok(q)
    }
}

fn observe(kind: &mut AdversaryKind, x: &Point, lab: Label) {
    match kind {
        AdversaryKind::Adaptive(AdaptiveStrategy::ThresholdBisection { lo, hi }) => {
            let v = x.x0().floor() as i64;
            match lab {
                Label::Positive => *hi = v.max(*lo),
                Label::Negative => *lo = (v + 1).min(*hi),
            }
        }
        AdversaryKind::Adaptive(AdaptiveStrategy::BoundaryProbe { weights, .. }) => {
            let d = x.dim();
            if weights.len() != d + 1 {
                return;
            }
            let margin = dot(&weights[..d], x.coords()) - weights[d];
            if Label::from_bool(margin >= 0.0) != lab {
                let s = lab.as_f64();
                for (w, c) in weights[..d].iter_mut().zip(x.coords()) {
                    *w += s * c;
                }
                weights[d] -= s;
            }
        }
        _ => {}
    }
}

fn probe(lo: &[f64], hi: &[f64], tau: f64, weights: &[f64], positive: bool, noise: &mut NoiseSource) -> Point {
    let d = lo.len();
    let mut u: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a + (b - a) * noise.uniform()).collect();
    let a = &weights[..d];
    let an = norm(a);
    if an > 1e-12 {
        let off = (dot(a, &u) - weights[d]) / (an * an);
        let side = if positive { tau } else { -tau };
        for (ui, ai) in u.iter_mut().zip(a) {
            *ui += (side / an - off) * ai;
        }
        for ((ui, l), h) in u.iter_mut().zip(lo).zip(hi) {
            *ui = ui.clamp(*l, *h);
        }
    }
    Point::new(u).expect("box points are finite")
}

/// Reads a query list from CSV, one point per row (no header).
pub fn load_query_list(path: &Path) -> Result<Vec<Point>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let coords = row
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| config(format!("bad coordinate {f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(Point::new(coords)?);
    }
    if out.is_empty() {
        return Err(config("query list is empty"));
    }
    Ok(out)
}
