use serde::{Deserialize, Serialize};

use crate::concepts::Hypothesis;
use crate::domain::{Label, LabeledSample, NoiseSource, Point};
use crate::error::{config, Result};

/// Where sample points come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sampler {
    /// Uniform over the integer grid `1..=size` (one-dimensional).
    Grid { size: u64 },
    /// Uniform over the axis-aligned box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Point masses with the given weights; leftover mass goes to `base`.
    Mixture {
        #[serde(default)]
        base: Option<std::boxed::Box<Sampler>>,
        atoms: Vec<Atom>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Point,
    pub weight: f64,
}

impl Sampler {
    pub fn point_mass(point: Point) -> Self {
        Sampler::Mixture {
            base: None,
            atoms: vec![Atom { point, weight: 1.0 }],
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Sampler::Grid { .. } => Some(1),
            Sampler::Box { lo, .. } => Some(lo.len()),
            Sampler::Mixture { base, atoms } => atoms
                .first()
                .map(|a| a.point.dim())
                .or_else(|| base.as_ref().and_then(|b| b.dim())),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Sampler::Grid { size } => {
                if *size == 0 {
                    return Err(config("grid size must be >= 1"));
                }
            }
            Sampler::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(config("box bounds must be nonempty and of equal dimension"));
                }
                if lo.iter().zip(hi).any(|(l, h)| !l.is_finite() || !h.is_finite() || l > h) {
                    return Err(config("box bounds must be finite with lo <= hi"));
                }
            }
            Sampler::Mixture { base, atoms } => {
                if atoms.iter().any(|a| !(a.weight >= 0.0)) {
                    return Err(config("atom weights must be nonnegative"));
                }
                let total: f64 = atoms.iter().map(|a| a.weight).sum();
                if total > 1.0 + 1e-12 {
                    return Err(config("atom weights sum above 1"));
                }
                match base {
                    Some(b) => b.validate()?,
                    None if (total - 1.0).abs() > 1e-12 => {
                        return Err(config("atom weights must sum to 1 without a base sampler"))
                    }
                    None => {}
                }
                if let Some(d) = self.dim() {
                    if atoms.iter().any(|a| a.point.dim() != d)
                        || base.as_ref().and_then(|b| b.dim()).is_some_and(|bd| bd != d)
                    {
                        return Err(config("mixture components disagree on dimension"));
                    }
                }
            }
        }
        Ok(())
    }

    fn sample(&self, noise: &mut NoiseSource) -> Point {
        match self {
            Sampler::Grid { size } => Point::scalar((1 + noise.index(*size as usize)) as f64),
            Sampler::Box { lo, hi } => Point::new(
                lo.iter()
                    .zip(hi)
                    .map(|(l, h)| l + (h - l) * noise.uniform())
                    .collect(),
            )
            .expect("box sample is finite"),
            Sampler::Mixture { base, atoms } => {
                let u = noise.uniform();
                let mut acc = 0.0;
                for atom in atoms {
                    acc += atom.weight;
                    if u < acc {
                        return atom.point.clone();
                    }
                }
                match base {
                    Some(b) => b.sample(noise),
                    // Rounding left u just above the accumulated mass.
                    None => atoms.last().expect("validated nonempty").point.clone(),
                }
            }
        }
    }
}

/// A sampler together with the target concept that labels its draws.
#[derive(Clone, Debug, PartialEq)]
pub struct DataDistribution {
    pub sampler: Sampler,
    pub target: Hypothesis,
}

impl DataDistribution {
    pub fn new(sampler: Sampler, target: Hypothesis) -> Result<Self> {
        sampler.validate()?;
        let dist = DataDistribution { sampler, target };
        // Labels are computed by the target; a draw it cannot evaluate is a config error.
        if let Some(d) = dist.sampler.dim() {
            if let Some(td) = dist.target.input_dim() {
                if td != d {
                    return Err(config(format!(
                        "target expects dimension {td}, sampler produces {d}"
                    )));
                }
            }
        }
        Ok(dist)
    }

    pub fn draw_point(&self, noise: &mut NoiseSource) -> Point {
        self.sampler.sample(noise)
    }

    pub fn label(&self, x: &Point) -> Result<Label> {
        self.target.evaluate(x)
    }
}

/// Draws `n` i.i.d. labeled records, each labeled by the target concept.
pub fn draw_sample(dist: &DataDistribution, n: usize, noise: &mut NoiseSource) -> Result<LabeledSample> {
    if n == 0 {
        return Err(config("sample size must be >= 1"));
    }
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let x = dist.draw_point(noise);
        let y = dist.label(&x)?;
        records.push((x, y));
    }
    LabeledSample::new(records)
}

/// Uniformly random partition of `sample` into `k` disjoint equal blocks.
pub fn partition(sample: &LabeledSample, k: usize, noise: &mut NoiseSource) -> Result<Vec<LabeledSample>> {
    if k == 0 || sample.is_empty() || sample.len() % k != 0 {
        return Err(config(format!(
            "cannot split {} records into {k} equal nonempty blocks",
            sample.len()
        )));
    }
    let m = sample.len() / k;
    let mut order: Vec<usize> = (0..sample.len()).collect();
    noise.shuffle(&mut order);
    let records = sample.records();
    order
        .chunks(m)
        .map(|chunk| LabeledSample::new(chunk.iter().map(|&i| records[i].clone()).collect()))
        .collect()
}

/// Fraction of records whose label disagrees with `h`.
pub fn empirical_error(h: &Hypothesis, sample: &LabeledSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(config("empirical error of an empty sample is undefined"));
    }
    let mut wrong = 0usize;
    for (x, y) in sample.iter() {
        if h.evaluate(x)? != *y {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / sample.len() as f64)
}
