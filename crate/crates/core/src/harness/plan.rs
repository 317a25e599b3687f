//! Sample-size planners. Logarithms are natural; constants hidden by `O(.)`
//! default to 1 and are scaled by [`Constants`].

use serde::Serialize;

use super::config::{BtOverride, Constants};
use crate::dp::BTParams;
use crate::error::{Error, Result};
use crate::predictor::{required_blocks, T_LOWER, T_UPPER};

/// Ensemble shape and the BetweenThresholds parameters behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanResult {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub eps_bt: f64,
    pub delta_bt: f64,
    pub alpha_bt: f64,
    pub beta_bt: f64,
}

fn planning(msg: impl Into<String>) -> Error {
    Error::Planning(msg.into())
}

fn check_targets(d: usize, rounds: usize, alpha: f64, beta: f64, eps: f64, delta: f64) -> Result<()> {
    if d == 0 {
        return Err(planning("dimension must be at least 1"));
    }
    if rounds < 2 {
        return Err(planning("T must be at least 2 so that ln T > 0"));
    }
    for (name, v) in [("alpha", alpha), ("beta", beta), ("delta", delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(planning(format!("{name} must lie in (0,1), got {v}")));
        }
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(planning(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Subsample size for an `alpha`-approximation with VC dimension `d`:
/// `c (d ln(d/alpha) + ln(1/beta)) / alpha^2`, rounded up.
pub fn approximation_size(d: usize, alpha: f64, beta: f64, c: f64) -> usize {
    let d = d as f64;
    (c * (d * (d / alpha).ln() + (1.0 / beta).ln()) / (alpha * alpha)).ceil().max(1.0) as usize
}

/// Builds a plan from BetweenThresholds parameters and checks the gap.
fn finish(eps_bt: f64, delta_bt: f64, alpha_bt: f64, beta_bt: f64, k: usize, m: usize) -> Result<PlanResult> {
    for (name, v) in [("eps_BT", eps_bt), ("delta_BT", delta_bt), ("alpha_BT", alpha_bt), ("beta_BT", beta_bt)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(planning(format!("{name} = {v} is not positive")));
        }
    }
    if delta_bt >= 1.0 || beta_bt >= 1.0 {
        return Err(planning("delta_BT and beta_BT must be below 1"));
    }
    let need = BTParams::required_gap(eps_bt, delta_bt, k);
    if need > T_UPPER - T_LOWER {
        return Err(planning(format!(
            "BetweenThresholds gap: need {need:.4} > {} at eps_BT = {eps_bt}, delta_BT = {delta_bt}, k = {k}",
            T_UPPER - T_LOWER
        )));
    }
    Ok(PlanResult { k, m, n: k * m, eps_bt, delta_bt, alpha_bt, beta_bt })
}

/// Ensemble size for the planners: the accuracy requirement
/// `c (64 / eps) (ln(T + 1) + ln(1 / beta))`, raised if needed to the smallest
/// `k` whose BetweenThresholds gap fits between the vote thresholds.
fn blocks(c: f64, eps_bt: f64, delta_bt: f64, beta_bt: f64, rounds: usize) -> usize {
    let accuracy = (c * 64.0 / eps_bt * ((rounds as f64 + 1.0).ln() + (1.0 / beta_bt).ln())).ceil() as usize;
    let gap = 12.0 / (eps_bt * (T_UPPER - T_LOWER)) * ((10.0 / eps_bt).ln() + (1.0 / delta_bt).ln() + 1.0);
    let mut k = accuracy.max(gap.max(1.0).ceil() as usize);
    while BTParams::required_gap(eps_bt, delta_bt, k) > T_UPPER - T_LOWER {
        k += 1;
    }
    k
}

/// Parameters for the version-space predictor with VC dimension `d`.
///
/// With `V = d ln T + L` and `L = ln(d ln T / (alpha beta eps delta))`:
/// `beta_BT = beta eps / (V sqrt(V L) L)`, `eps_BT = eps / sqrt(V L)`,
/// `delta_BT = delta / V`, `alpha_BT = alpha / V`.
pub fn plan_oblivious(
    d: usize,
    rounds: usize,
    alpha: f64,
    beta: f64,
    eps: f64,
    delta: f64,
    c: &Constants,
) -> Result<PlanResult> {
    check_targets(d, rounds, alpha, beta, eps, delta)?;
    let df = d as f64;
    let ln_t = (rounds as f64).ln();
    let l = (df * ln_t / (alpha * beta * eps * delta)).ln();
    if !(l > 0.0) {
        return Err(planning(format!("ln(d ln T / (alpha beta eps delta)) = {l} is not positive")));
    }
    let v = df * ln_t + l;
    let beta_bt = beta * eps / (v * (v * l).sqrt() * l);
    let eps_bt = eps / (v * l).sqrt();
    let delta_bt = delta / v;
    let alpha_bt = alpha / v;
    let k = blocks(c.k, eps_bt, delta_bt, beta_bt, rounds);
    let m = approximation_size(d, alpha_bt, beta_bt, c.m);
    finish(eps_bt, delta_bt, alpha_bt, beta_bt, k, m)
}

/// Parameters for the halfspace predictor over `R^d`:
/// `beta_BT = beta eps / (d ln T sqrt(d ln(d ln T / delta)) (ln d + ln ln T + ln ln(1/delta) + ln(1/eps)))`,
/// `eps_BT = eps / sqrt(d ln(d/delta))`, `delta_BT = delta / d`, `alpha_BT = alpha / d^2`.
pub fn plan_halfspace(
    d: usize,
    rounds: usize,
    alpha: f64,
    beta: f64,
    eps: f64,
    delta: f64,
    c: &Constants,
) -> Result<PlanResult> {
    check_targets(d, rounds, alpha, beta, eps, delta)?;
    let df = d as f64;
    let ln_t = (rounds as f64).ln();
    let inner = df * (df * ln_t / delta).ln();
    let tail = df.ln() + ln_t.ln() + (1.0 / delta).ln().ln() + (1.0 / eps).ln();
    let eps_log = df * (df / delta).ln();
    for (name, v) in [
        ("d ln(d ln T / delta)", inner),
        ("ln d + ln ln T + ln ln(1/delta) + ln(1/eps)", tail),
        ("d ln(d/delta)", eps_log),
    ] {
        if !(v > 0.0) {
            return Err(planning(format!("{name} = {v} is not positive")));
        }
    }
    let beta_bt = beta * eps / (df * ln_t * inner.sqrt() * tail);
    let eps_bt = eps / eps_log.sqrt();
    let delta_bt = delta / df;
    let alpha_bt = alpha / (df * df);
    let k = blocks(c.k, eps_bt, delta_bt, beta_bt, rounds);
    let m = approximation_size(d, alpha_bt, beta_bt, c.m);
    finish(eps_bt, delta_bt, alpha_bt, beta_bt, k, m)
}

/// Desk-scale plan from explicit BetweenThresholds parameters. When `bt.k`
/// is given, `eps_BT` is the smallest value (up to rounding) for which the
/// ensemble-size formula yields exactly that `k`. The block size is
/// `block_size` or the approximation bound for VC dimension `vc` at the
/// target `alpha, beta`.
pub fn plan_direct(
    vc: usize,
    rounds: usize,
    alpha: f64,
    beta: f64,
    bt: &BtOverride,
    block_size: Option<usize>,
    c: &Constants,
) -> Result<PlanResult> {
    if !(bt.beta > 0.0 && bt.beta < 1.0) {
        return Err(planning("beta_BT must lie in (0,1)"));
    }
    let log_term = (rounds as f64 + 1.0).ln() + (1.0 / bt.beta).ln();
    let (eps_bt, k) = match (bt.k, bt.eps) {
        (Some(k), None) if k > 0 => {
            let eps = 64.0 * log_term / k as f64 * (1.0 + 1e-12);
            (eps, required_blocks(eps, bt.beta, rounds))
        }
        (None, Some(eps)) => (eps, required_blocks(eps, bt.beta, rounds)),
        _ => return Err(planning("set exactly one of bt.k (positive) or bt.eps")),
    };
    let m = match block_size {
        Some(m) if m > 0 => m,
        Some(_) => return Err(planning("block_size must be positive")),
        None => approximation_size(vc, alpha, beta, c.m),
    };
    finish(eps_bt, bt.delta, alpha, bt.beta, k, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfspace_alpha_bt_is_alpha_over_d_squared() {
        let p = plan_halfspace(3, 1024, 0.1, 0.1, 1.0, 1e-6, &Constants::default()).unwrap();
        assert_eq!(p.alpha_bt, 0.1 / 9.0);
        assert_eq!(p.n, p.k * p.m);
    }

    #[test]
    fn direct_plan_hits_requested_k() {
        let bt = BtOverride { k: Some(50), eps: None, delta: 1e-5, beta: 0.01 };
        let p = plan_direct(3, 1024, 0.1, 0.1, &bt, Some(12), &Constants::default()).unwrap();
        assert_eq!((p.k, p.m, p.n), (50, 12, 600));
        assert_eq!(required_blocks(p.eps_bt, 0.01, 1024), 50);
    }

    #[test]
    fn tiny_ensembles_violate_the_gap() {
        let bt = BtOverride { k: None, eps: Some(1.0), delta: 1e-5, beta: 0.5 };
        // T = 1 gives k = ceil(64 (ln 2 + ln 2)) = 89, gap need ~ 3.0.
        let err = plan_direct(1, 1, 0.1, 0.1, &bt, Some(4), &Constants::default()).unwrap_err();
        assert!(matches!(err, Error::Planning(msg) if msg.contains("gap")));
    }

    #[test]
    fn rejects_degenerate_targets() {
        let c = Constants::default();
        assert!(plan_oblivious(1, 1, 0.1, 0.1, 1.0, 1e-6, &c).is_err());
        assert!(plan_oblivious(0, 16, 0.1, 0.1, 1.0, 1e-6, &c).is_err());
        assert!(plan_halfspace(2, 16, 0.1, 1.5, 1.0, 1e-6, &c).is_err());
    }
}
