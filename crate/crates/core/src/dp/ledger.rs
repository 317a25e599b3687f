use serde::Serialize;

use crate::error::{config, Result};

/// Append-only record of completed BetweenThresholds instances.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrivacyLedger {
    entries: Vec<(f64, f64)>,
    delta_prime: f64,
}

impl PrivacyLedger {
    pub fn new(delta_prime: f64) -> Self {
        PrivacyLedger { entries: Vec::new(), delta_prime }
    }

    pub fn append(&mut self, eps: f64, delta: f64) {
        self.entries.push((eps, delta));
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn delta_prime(&self) -> f64 {
        self.delta_prime
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Advanced composition of `k` identical `(eps, delta)` mechanisms:
/// `eps' = sqrt(2k ln(1/delta')) eps + k eps (e^eps - 1)/(e^eps + 1)`,
/// total delta `k delta + delta'`.
pub fn advanced_composition(k: usize, eps: f64, delta: f64, delta_prime: f64) -> (f64, f64) {
    if k == 0 {
        return (0.0, delta_prime);
    }
    let kf = k as f64;
    let eps_total = (2.0 * kf * (1.0 / delta_prime).ln()).sqrt() * eps + kf * eps * eps.exp_m1() / (eps.exp() + 1.0);
    (eps_total, kf * delta + delta_prime)
}

/// Composes every ledger entry; they must share one `(eps, delta)`.
pub fn compose_advanced(ledger: &PrivacyLedger) -> Result<(f64, f64)> {
    let dp = ledger.delta_prime;
    if !(dp > 0.0 && dp < 1.0) {
        return Err(config(format!("delta' must lie in (0,1), got {dp}")));
    }
    let Some(&(eps, delta)) = ledger.entries.first() else {
        return Ok((0.0, dp));
    };
    if ledger.entries.iter().any(|e| *e != (eps, delta)) {
        return Err(config("ledger entries must share one (eps, delta)"));
    }
    Ok(advanced_composition(ledger.entries.len(), eps, delta, dp))
}
