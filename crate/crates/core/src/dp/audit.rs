use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::domain::{derive_seed, LabeledSample, NoiseSource};
use crate::error::{config, usage, Result};

/// Smallest number of trials per side the auditor accepts.
pub const MIN_AUDIT_TRIALS: usize = 1000;

/// A named predicate on mechanism outputs.
pub struct Event<O> {
    pub name: String,
    pub predicate: Box<dyn Fn(&O) -> bool + Send + Sync>,
}

impl<O> Event<O> {
    pub fn new(name: impl Into<String>, predicate: impl Fn(&O) -> bool + Send + Sync + 'static) -> Self {
        Event { name: name.into(), predicate: Box::new(predicate) }
    }
}

/// Per-event counts and the resulting privacy-loss estimate.
#[derive(Clone, Debug, Serialize)]
pub struct EventEstimate {
    pub name: String,
    pub count: usize,
    pub count_neighbor: usize,
    /// Confidence-adjusted lower estimate over both directions.
    pub eps_hat: f64,
    /// Plain log ratio of the observed frequencies (larger direction).
    pub eps_point: f64,
    pub divergent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub trials: usize,
    pub delta: f64,
    /// Maximum over events; `+inf` when `divergent`.
    pub eps_hat: f64,
    /// Some event occurred on one side only, with the other side's frequency
    /// clearly above `delta`.
    pub divergent: bool,
    pub events: Vec<EventEstimate>,
}

/// 95% two-sided Clopper-Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: usize, n: usize) -> (f64, f64) {
    let a = 0.05;
    let lower = if k == 0 {
        0.0
    } else {
        Beta::new(k as f64, (n - k + 1) as f64).map_or(0.0, |b| b.inverse_cdf(a / 2.0))
    };
    let upper = if k == n {
        1.0
    } else {
        Beta::new((k + 1) as f64, (n - k) as f64).map_or(1.0, |b| b.inverse_cdf(1.0 - a / 2.0))
    };
    (lower, upper)
}

/// Empirical lower estimate of the privacy loss of `mechanism` on a pair of
/// neighbouring datasets: for each event `E` and each direction, the log of
/// `(lower bound of Pr[M(S) in E] - delta) / upper bound of Pr[M(S') in E]`.
///
/// Trials run in parallel; trial `i` on each side uses a noise stream derived
/// from the master seed, so results do not depend on scheduling.
pub fn audit_dp<O, M>(
    mechanism: M,
    sample: &LabeledSample,
    neighbor: &LabeledSample,
    events: &[Event<O>],
    trials: usize,
    delta: f64,
    seed: u64,
) -> Result<AuditReport>
where
    M: Fn(&LabeledSample, &mut NoiseSource) -> Result<O> + Sync,
    O: Send,
{
    if sample.hamming_distance(neighbor) != Some(1) {
        return Err(usage("audited datasets must differ in exactly one record"));
    }
    if trials < MIN_AUDIT_TRIALS {
        return Err(config(format!("audit needs at least {MIN_AUDIT_TRIALS} trials, got {trials}")));
    }
    if events.is_empty() {
        return Err(config("audit needs at least one event"));
    }
    let count = |data: &LabeledSample, side: u64| -> Result<Vec<usize>> {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut noise = NoiseSource::seeded(derive_seed(derive_seed(seed, side), i as u64));
                let out = mechanism(data, &mut noise)?;
                Ok(events.iter().map(|e| usize::from((e.predicate)(&out))).collect::<Vec<_>>())
            })
            .try_reduce(
                || vec![0; events.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )
    };
    let a = count(sample, 0)?;
    let b = count(neighbor, 1)?;
    let mut estimates = Vec::with_capacity(events.len());
    for (e, (&ca, &cb)) in events.iter().zip(a.iter().zip(&b)) {
        estimates.push(estimate(&e.name, ca, cb, trials, delta));
    }
    let divergent = estimates.iter().any(|e| e.divergent);
    let eps_hat = if divergent {
        f64::INFINITY
    } else {
        estimates.iter().map(|e| e.eps_hat).fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(AuditReport { trials, delta, eps_hat, divergent, events: estimates })
}

fn estimate(name: &str, ca: usize, cb: usize, n: usize, delta: f64) -> EventEstimate {
    let (lo_a, hi_a) = clopper_pearson(ca, n);
    let (lo_b, hi_b) = clopper_pearson(cb, n);
    let one_way = |lo_x: f64, hi_y: f64| {
        let num = lo_x - delta;
        if num <= 0.0 {
            f64::NEG_INFINITY
        } else {
            (num / hi_y).ln()
        }
    };
    let divergent = (cb == 0 && lo_a - delta > 0.0) || (ca == 0 && lo_b - delta > 0.0);
    let eps_hat = if divergent { f64::INFINITY } else { one_way(lo_a, hi_b).max(one_way(lo_b, hi_a)) };
    let eps_point = if ca > 0 && cb > 0 {
        (ca as f64 / cb as f64).ln().abs()
    } else if ca == cb {
        0.0
    } else {
        f64::INFINITY
    };
    EventEstimate { name: name.to_string(), count: ca, count_neighbor: cb, eps_hat, eps_point, divergent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Label, Point};

    fn pair() -> (LabeledSample, LabeledSample) {
        let a = LabeledSample::new(vec![(Point::scalar(1.0), Label::Positive), (Point::scalar(2.0), Label::Positive)]).unwrap();
        let b = a.with_record(1, (Point::scalar(2.0), Label::Negative)).unwrap();
        (a, b)
    }

    fn last_bit(s: &LabeledSample) -> bool {
        s.records()[1].1 == Label::Positive
    }

    #[test]
    fn clopper_pearson_brackets_the_rate() {
        let (lo, hi) = clopper_pearson(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && lo > 0.39 && hi < 0.61);
        assert_eq!(clopper_pearson(0, 10).0, 0.0);
        assert_eq!(clopper_pearson(10, 10).1, 1.0);
    }

    #[test]
    fn constant_mechanism_is_private() {
        let (a, b) = pair();
        let events = vec![Event::new("heads", |o: &bool| *o)];
        let r = audit_dp(|_, n| Ok(n.coin()), &a, &b, &events, 5000, 0.0, 1).unwrap();
        assert!(!r.divergent);
        assert!(r.eps_hat <= 0.0, "eps_hat {}", r.eps_hat);
    }

    #[test]
    fn verbatim_mechanism_diverges() {
        let (a, b) = pair();
        let events = vec![Event::new("positive", |o: &bool| *o)];
        let r = audit_dp(|s, _| Ok(last_bit(s)), &a, &b, &events, 1000, 1e-6, 1).unwrap();
        assert!(r.divergent);
        assert_eq!(r.eps_hat, f64::INFINITY);
    }

    #[test]
    fn randomized_response_recovers_ln3() {
        let (a, b) = pair();
        let events = vec![Event::new("one", |o: &bool| *o), Event::new("zero", |o: &bool| !*o)];
        let rr = |s: &LabeledSample, n: &mut NoiseSource| Ok(last_bit(s) ^ (n.uniform() < 0.25));
        let r = audit_dp(rr, &a, &b, &events, 100_000, 0.0, 7).unwrap();
        let ln3 = 3f64.ln();
        assert!(r.eps_hat <= ln3 + 1e-9 && r.eps_hat >= ln3 - 0.06, "eps_hat {}", r.eps_hat);
        assert!((r.events[0].eps_point - ln3).abs() < 0.03);
    }

    #[test]
    fn rejects_non_neighbours() {
        let (a, _) = pair();
        let events = vec![Event::new("x", |o: &bool| *o)];
        assert!(audit_dp(|_, n| Ok(n.coin()), &a, &a, &events, 1000, 0.0, 1).is_err());
        let (a, b) = pair();
        assert!(audit_dp(|_, n| Ok(n.coin()), &a, &b, &events, 10, 0.0, 1).is_err());
    }
}
