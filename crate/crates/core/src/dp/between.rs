use serde::{Deserialize, Serialize};

use super::laplace::laplace;
use crate::domain::NoiseSource;
use crate::error::{config, usage, Error, Result};

/// Parameters of one BetweenThresholds instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BTParams {
    pub eps: f64,
    pub delta: f64,
    /// Dataset size the query sensitivity `1/n` refers to (the ensemble size).
    pub n: usize,
    pub t_lower: f64,
    pub t_upper: f64,
    pub max_queries: usize,
    /// Multiplies both noise scales. 1 is the mechanism; values below 1 give a
    /// deliberately under-noised variant for auditing.
    #[serde(default = "one")]
    pub noise_multiplier: f64,
}

fn one() -> f64 {
    1.0
}

impl BTParams {
    pub fn new(eps: f64, delta: f64, n: usize, t_lower: f64, t_upper: f64, max_queries: usize) -> Self {
        BTParams { eps, delta, n, t_lower, t_upper, max_queries, noise_multiplier: 1.0 }
    }

    /// Minimum admissible `t_upper - t_lower`:
    /// `(12 / (eps n)) (ln(10/eps) + ln(1/delta) + 1)`.
    pub fn required_gap(eps: f64, delta: f64, n: usize) -> f64 {
        12.0 / (eps * n as f64) * ((10.0 / eps).ln() + (1.0 / delta).ln() + 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(config(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(config(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if self.n == 0 {
            return Err(config("n must be at least 1"));
        }
        if !(0.0 < self.t_lower && self.t_lower < self.t_upper && self.t_upper < 1.0) {
            return Err(config(format!(
                "thresholds must satisfy 0 < t_lower < t_upper < 1, got ({}, {})",
                self.t_lower, self.t_upper
            )));
        }
        if !(self.noise_multiplier > 0.0) {
            return Err(config("noise multiplier must be positive"));
        }
        let need = Self::required_gap(self.eps, self.delta, self.n);
        let gap = self.t_upper - self.t_lower;
        if gap < need {
            return Err(Error::Precondition(format!(
                "threshold gap {gap} is below the required {need} for eps = {}, delta = {}, n = {}",
                self.eps, self.delta, self.n
            )));
        }
        Ok(())
    }

    fn threshold_scale(&self) -> f64 {
        self.noise_multiplier * 2.0 / (self.eps * self.n as f64)
    }

    fn query_scale(&self) -> f64 {
        self.noise_multiplier * 6.0 / (self.eps * self.n as f64)
    }
}

/// Answer of one BetweenThresholds query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BTOutcome {
    L,
    R,
    Top,
}

/// Live state of one BetweenThresholds instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BTState {
    pub params: BTParams,
    pub noisy_lower: f64,
    pub noisy_upper: f64,
    pub halted: bool,
    pub queries_answered: usize,
}

/// Validates the gap and draws the shared threshold noise `mu`.
pub fn bt_init(params: BTParams, noise: &mut NoiseSource) -> Result<BTState> {
    params.validate()?;
    let mu = laplace(params.threshold_scale(), noise)?;
    Ok(BTState {
        noisy_lower: params.t_lower + mu,
        noisy_upper: params.t_upper - mu,
        params,
        halted: false,
        queries_answered: 0,
    })
}

/// Compares `q_value` plus fresh noise against the noisy thresholds.
pub fn bt_query(state: &mut BTState, q_value: f64, noise: &mut NoiseSource) -> Result<BTOutcome> {
    if state.halted {
        return Err(usage("BetweenThresholds instance already halted"));
    }
    if state.queries_answered >= state.params.max_queries {
        return Err(usage(format!(
            "BetweenThresholds instance answered its {} queries",
            state.params.max_queries
        )));
    }
    let c = q_value + laplace(state.params.query_scale(), noise)?;
    state.queries_answered += 1;
    let outcome = if c < state.noisy_lower {
        BTOutcome::L
    } else if c > state.noisy_upper {
        BTOutcome::R
    } else {
        state.halted = true;
        BTOutcome::Top
    };
    Ok(outcome)
}
