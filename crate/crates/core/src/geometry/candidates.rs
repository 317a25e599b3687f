use serde::{Deserialize, Serialize};

use super::constraint::DepthProfile;
use super::linalg::{norm, normalized, null_vector, scaled};
use super::subspace::FeasibleSubspace;
use crate::domain::NoiseSource;
use crate::error::{usage, Error, Result};

/// Candidates closer than this (max-coordinate) are merged.
pub const DEDUP_TOL: f64 = 1e-8;

const SPHERE_SEED: u64 = 0x5EED_CAFE;

/// Controls the size of the candidate set used for cdepth maximization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CandidateConfig {
    /// Quasi-uniform points added on the unit sphere of the subspace.
    pub sphere_samples: usize,
    /// Largest number of boundary subsets enumerated before giving up.
    pub max_subsets: u64,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        CandidateConfig { sphere_samples: 64, max_subsets: 200_000 }
    }
}

/// Intersections of `r - 1` constraint boundaries with the unit sphere of an
/// `r`-dimensional subspace, plus a quasi-uniform sphere sample, in ambient
/// coordinates and deduplicated.
pub fn arrangement_candidates(
    profile: &DepthProfile,
    subspace: &FeasibleSubspace,
    cfg: &CandidateConfig,
) -> Result<Vec<Vec<f64>>> {
    let r = subspace.dim();
    if r == 0 {
        return Err(usage("candidate generation needs a subspace of dimension >= 1"));
    }
    if subspace.ambient() != profile.dim() {
        return Err(usage("subspace and profile live in different dimensions"));
    }
    // Restrictions of the constraint normals to subspace coordinates. Normals
    // orthogonal to the subspace are constant there and cut nothing.
    let mut restricted: Vec<Vec<f64>> = Vec::new();
    for c in profile.constraints() {
        let coords = subspace.coordinates(&c.normal);
        if norm(&coords) <= 1e-12 * norm(&c.normal) {
            continue;
        }
        if let Some(u) = normalized(&coords) {
            restricted.push(canonical_sign(u));
        }
    }
    let restricted = dedup(restricted);
    let choose = r - 1;
    let subsets = binomial(restricted.len() as u64, choose as u64);
    if subsets > cfg.max_subsets {
        return Err(Error::Capability(format!(
            "{subsets} boundary subsets exceed the cap of {}; use fewer constraints or a lower dimension",
            cfg.max_subsets
        )));
    }
    let mut coords: Vec<Vec<f64>> = Vec::new();
    for_each_subset(restricted.len(), choose, |idx| {
        let rows: Vec<&[f64]> = idx.iter().map(|&i| restricted[i].as_slice()).collect();
        if let Some(v) = null_vector(&rows, r) {
            coords.push(scaled(&v, -1.0));
            coords.push(v);
        }
    });
    coords.extend(sphere_sample(r, cfg.sphere_samples));
    let points = coords
        .into_iter()
        .filter_map(|c| normalized(&subspace.embed(&c)))
        .collect();
    Ok(dedup(points))
}

/// Quasi-uniform points on the unit sphere of `R^r`.
pub fn sphere_sample(r: usize, count: usize) -> Vec<Vec<f64>> {
    if count == 0 {
        return Vec::new();
    }
    match r {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let a = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci lattice.
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let y = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let rad = (1.0 - y * y).max(0.0).sqrt();
                    let t = golden * i as f64;
                    vec![rad * t.cos(), y, rad * t.sin()]
                })
                .collect()
        }
        _ => {
            let mut noise = NoiseSource::seeded(SPHERE_SEED ^ r as u64);
            (0..count)
                .filter_map(|_| normalized(&(0..r).map(|_| noise.gaussian()).collect::<Vec<_>>()))
                .collect()
        }
    }
}

fn canonical_sign(v: Vec<f64>) -> Vec<f64> {
    match v.iter().find(|c| c.abs() > 1e-12) {
        Some(c) if *c < 0.0 => scaled(&v, -1.0),
        _ => v,
    }
}

/// Removes near-duplicates, keeping the first occurrence and input order.
pub fn dedup(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    let mut dropped = vec![false; points.len()];
    for (pos, &i) in order.iter().enumerate() {
        if dropped[i] {
            continue;
        }
        for &j in &order[pos + 1..] {
            if points[j][0] - points[i][0] > DEDUP_TOL {
                break;
            }
            if !dropped[j] && points[i].iter().zip(&points[j]).all(|(a, b)| (a - b).abs() <= DEDUP_TOL) {
                // Keep whichever came first in the input.
                if j > i {
                    dropped[j] = true;
                } else {
                    dropped[i] = true;
                    break;
                }
            }
        }
    }
    points.into_iter().zip(dropped).filter(|(_, d)| !d).map(|(p, _)| p).collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
