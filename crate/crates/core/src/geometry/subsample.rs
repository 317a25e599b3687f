use serde::Serialize;

use super::constraint::DepthProfile;
use super::depth::CandidateSet;
use super::search::argmax_over;
use crate::domain::NoiseSource;
use crate::error::{config, Result};

/// Parameters of a cdepth subsample-approximation check.
#[derive(Clone, Debug)]
pub struct SubsampleCheck {
    pub m: usize,
    pub trials: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Multiplier on the sample-size bound (the bound is stated up to a constant).
    pub bound_constant: f64,
}

impl SubsampleCheck {
    /// `bound_constant * (d ln(d/alpha) + ln(1/beta)) / alpha^2`, rounded up.
    pub fn required_m(&self, d: usize) -> usize {
        let d = d as f64;
        let raw = (d * (d / self.alpha).ln() + (1.0 / self.beta).ln()) / (self.alpha * self.alpha);
        (self.bound_constant * raw).max(0.0).ceil() as usize
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsampleReport {
    pub trials: usize,
    /// Trials in which some probe had `|gamma - gamma'| > alpha`.
    pub violating_trials: usize,
    pub violation_fraction: f64,
    /// Fraction of (trial, probe) pairs in violation.
    pub probe_violation_fraction: f64,
    pub max_gap: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Compares normalized cdepth on the full constraint set against random
/// size-`m` subsets, probing a fixed candidate set plus both maximizers.
/// `candidates` serves as the hull witness set for every cdepth evaluation.
pub fn cdepth_subsample_check(
    profile: &DepthProfile,
    candidates: &[Vec<f64>],
    check: &SubsampleCheck,
    noise: &mut NoiseSource,
) -> Result<SubsampleReport> {
    let n = profile.len();
    let d = profile.dim().saturating_sub(1);
    if !(check.alpha > 0.0) || !(check.beta > 0.0 && check.beta < 1.0) || check.trials == 0 {
        return Err(config("subsample check needs alpha > 0, beta in (0,1) and trials >= 1"));
    }
    if check.m == 0 || check.m > n {
        return Err(config(format!("subsample size {} must lie in 1..={n}", check.m)));
    }
    let need = check.required_m(d);
    if check.m < need {
        return Err(config(format!("subsample size {} is below the bound {need}", check.m)));
    }
    let full = CandidateSet::new(profile, candidates.to_vec())?;
    let mut probes: Vec<Vec<f64>> = candidates.to_vec();
    probes.push(argmax_over(profile, &full).point);
    let gamma: Vec<f64> = probes.iter().map(|p| full.cdepth(profile, p) as f64 / n as f64).collect();

    let mut violating = 0;
    let mut probe_violations = 0usize;
    let mut probe_total = 0usize;
    let mut max_gap: f64 = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..check.trials {
        noise.shuffle(&mut order);
        let sub = DepthProfile::new(
            profile.dim(),
            order[..check.m].iter().map(|&i| profile.constraints()[i].clone()).collect(),
        )?;
        let set = CandidateSet::new(&sub, candidates.to_vec())?;
        let own = argmax_over(&sub, &set).point;
        let mut bad = false;
        let extra_gamma = full.cdepth(profile, &own) as f64 / n as f64;
        for (p, g) in probes.iter().zip(&gamma).chain(std::iter::once((&own, &extra_gamma))) {
            let g_sub = set.cdepth(&sub, p) as f64 / check.m as f64;
            let gap = (g - g_sub).abs();
            max_gap = max_gap.max(gap);
            probe_total += 1;
            if gap > check.alpha {
                probe_violations += 1;
                bad = true;
            }
        }
        if bad {
            violating += 1;
        }
    }
    let fraction = violating as f64 / check.trials as f64;
    let slack = 2.0 * (check.beta * (1.0 - check.beta) / check.trials as f64).sqrt();
    Ok(SubsampleReport {
        trials: check.trials,
        violating_trials: violating,
        violation_fraction: fraction,
        probe_violation_fraction: probe_violations as f64 / probe_total as f64,
        max_gap,
        slack,
        pass: fraction <= check.beta + slack,
    })
}
