use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adversary::Adversary;
use crate::concepts::{ConceptClass, Hypothesis};
use crate::domain::{Label, LabeledSample, Point};
use crate::dp::{advanced_composition, audit_dp, AuditReport, Event};
use crate::error::{config, Result};
use crate::predictor::{default_v_max_oblivious, run, GeneratorKind, PredictorConfig};

/// A toy threshold instance for empirical privacy auditing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(rename = "T", default = "default_rounds")]
    pub rounds: usize,
    /// Ensemble size `k`.
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    #[serde(default = "default_block_size")]
    pub block_size: usize,
    #[serde(default = "default_domain")]
    pub domain_size: u64,
    #[serde(default = "default_beta_bt")]
    pub beta_bt: f64,
    #[serde(default = "default_delta_bt")]
    pub delta_bt: f64,
    #[serde(default = "default_delta_prime")]
    pub delta_prime: f64,
    /// Hard-query budget; defaults to the oblivious bound for VC dimension 1.
    #[serde(default)]
    pub v_max: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Longest label prefix used as an event.
    #[serde(default = "default_max_prefix")]
    pub max_prefix: usize,
    /// Allowance added to the budget for sampling error.
    #[serde(default = "default_slack")]
    pub ci_slack: f64,
    /// Noise multiplier of the deliberately broken variant.
    #[serde(default = "default_broken")]
    pub broken_multiplier: f64,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_rounds() -> usize {
    32
}
fn default_blocks() -> usize {
    16
}
fn default_block_size() -> usize {
    4
}
fn default_domain() -> u64 {
    64
}
fn default_beta_bt() -> f64 {
    0.5
}
fn default_delta_bt() -> f64 {
    0.01
}
fn default_delta_prime() -> f64 {
    1e-5
}
fn default_trials() -> usize {
    200_000
}
fn default_max_prefix() -> usize {
    4
}
fn default_slack() -> f64 {
    0.3
}
fn default_broken() -> f64 {
    0.5
}
fn default_workers() -> usize {
    1
}

impl Default for AuditConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// The observable output of one audited run.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditTranscript {
    pub labels: Vec<Label>,
    pub first_top: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditOutcome {
    pub eps_bt: f64,
    pub v_max: usize,
    /// Composed `eps'` over `v_max` instances.
    pub budget: f64,
    pub honest: AuditReport,
    pub broken: AuditReport,
    /// The honest estimate stays within `budget + ci_slack`.
    pub honest_within_budget: bool,
    /// The broken variant is divergent or estimated above `budget`.
    pub broken_flagged: bool,
}

impl AuditConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AuditConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 || self.blocks == 0 || self.block_size == 0 {
            return Err(config("audit needs T, k and block size all positive"));
        }
        if self.domain_size < 2 {
            return Err(config("audit domain needs at least two points"));
        }
        if self.workers == 0 {
            return Err(config("workers must be positive"));
        }
        Ok(())
    }

    /// Smallest BetweenThresholds epsilon for which `blocks` suffices.
    pub fn eps_bt(&self) -> f64 {
        64.0 * ((self.rounds as f64 + 1.0).ln() + (1.0 / self.beta_bt).ln()) / self.blocks as f64 * (1.0 + 1e-12)
    }

    pub fn v_max(&self) -> usize {
        self.v_max.unwrap_or_else(|| default_v_max_oblivious(1, self.rounds, self.beta_bt))
    }

    /// Composed budget `eps'` of `v_max` BetweenThresholds instances.
    pub fn budget(&self) -> f64 {
        advanced_composition(self.v_max(), self.eps_bt(), self.delta_bt, self.delta_prime).0
    }

    /// Evenly spread sample labelled by a mid-domain threshold, its neighbour
    /// (the record nearest the threshold with its label flipped), and the
    /// fixed query list.
    pub fn instance(&self) -> Result<(LabeledSample, LabeledSample, Vec<Point>)> {
        let x = self.domain_size as f64;
        let target = Hypothesis::Threshold((self.domain_size / 2 + 1) as i64);
        let n = self.blocks * self.block_size;
        let mut records = Vec::with_capacity(n);
        for i in 0..n {
            let p = Point::scalar((1.0 + (i as f64 * x / n as f64)).floor());
            let l = target.evaluate(&p)?;
            records.push((p, l));
        }
        let sample = LabeledSample::new(records)?;
        let centre = x / 2.0 + 1.0;
        let (idx, (p, l)) = sample
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 .0.x0() - centre).abs().total_cmp(&(b.1 .0.x0() - centre).abs()))
            .expect("sample is nonempty");
        let neighbor = sample.with_record(idx, (p.clone(), l.flip()))?;
        let queries = (0..self.rounds).map(|j| Point::scalar((1.0 + (j as f64 * x / self.rounds as f64)).floor())).collect();
        Ok((sample, neighbor, queries))
    }

    fn predictor(&self, noise_multiplier: f64) -> PredictorConfig {
        PredictorConfig {
            rounds: self.rounds,
            eps_bt: self.eps_bt(),
            delta_bt: self.delta_bt,
            beta_bt: self.beta_bt,
            delta_prime: self.delta_prime,
            v_max: self.v_max(),
            noise_multiplier,
        }
    }
}

/// "First `Top` at round j" for every round (and never), plus every label
/// prefix of length `1..=max_prefix`.
pub fn audit_events(rounds: usize, max_prefix: usize) -> Vec<Event<AuditTranscript>> {
    let mut events = Vec::new();
    for j in 0..rounds {
        events.push(Event::new(format!("first_top={j}"), move |o: &AuditTranscript| o.first_top == Some(j)));
    }
    events.push(Event::new("first_top=none", |o: &AuditTranscript| o.first_top.is_none()));
    for len in 1..=max_prefix.min(rounds) {
        for bits in 0..(1u32 << len) {
            let word: Vec<Label> = (0..len).map(|i| Label::from_bool(bits >> i & 1 == 1)).collect();
            let name = format!(
                "prefix={}",
                word.iter().map(|l| if *l == Label::Positive { '+' } else { '-' }).collect::<String>()
            );
            events.push(Event::new(name, move |o: &AuditTranscript| o.labels.starts_with(&word)));
        }
    }
    events
}

fn audit_variant(
    cfg: &AuditConfig,
    noise_multiplier: f64,
    sample: &LabeledSample,
    neighbor: &LabeledSample,
    queries: &[Point],
    events: &[Event<AuditTranscript>],
    seed: u64,
) -> Result<AuditReport> {
    let predictor = cfg.predictor(noise_multiplier);
    let kind = GeneratorKind::Oblivious(ConceptClass::Thresholds { domain: cfg.domain_size });
    let mechanism = |s: &LabeledSample, noise: &mut crate::domain::NoiseSource| {
        let mut adversary = Adversary::oblivious(queries.to_vec());
        let report = run(&predictor, s, &kind, &mut adversary, noise, 0)?;
        let labels = report.rounds.iter().map(|r| r.label).collect();
        Ok(AuditTranscript { labels, first_top: report.top_rounds.first().map(|t| t.round) })
    };
    audit_dp(mechanism, sample, neighbor, events, cfg.trials, cfg.delta_bt, seed)
}

/// Audits the predictor and its broken variant on the toy instance.
pub fn run_audit(cfg: &AuditConfig) -> Result<AuditOutcome> {
    cfg.validate()?;
    let (sample, neighbor, queries) = cfg.instance()?;
    let events = audit_events(cfg.rounds, cfg.max_prefix);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| config(format!("cannot start worker pool: {e}")))?;
    let (honest, broken) = pool.install(|| -> Result<_> {
        let honest = audit_variant(cfg, 1.0, &sample, &neighbor, &queries, &events, cfg.seed)?;
        let broken = audit_variant(cfg, cfg.broken_multiplier, &sample, &neighbor, &queries, &events, cfg.seed)?;
        Ok((honest, broken))
    })?;
    let budget = cfg.budget();
    Ok(AuditOutcome {
        eps_bt: cfg.eps_bt(),
        v_max: cfg.v_max(),
        budget,
        honest_within_budget: !honest.divergent && honest.eps_hat <= budget + cfg.ci_slack,
        broken_flagged: broken.divergent || broken.eps_hat > budget,
        honest,
        broken,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_describe_the_toy_instance() {
        let cfg = AuditConfig::default();
        assert_eq!((cfg.rounds, cfg.blocks), (32, 16));
        let (s, n, q) = cfg.instance().unwrap();
        assert_eq!(s.len(), 64);
        assert_eq!(s.hamming_distance(&n), Some(1));
        assert_eq!(q.len(), 32);
        assert_eq!(crate::predictor::required_blocks(cfg.eps_bt(), cfg.beta_bt, cfg.rounds), 16);
    }

    #[test]
    fn event_families_have_expected_sizes() {
        assert_eq!(audit_events(32, 4).len(), 33 + 2 + 4 + 8 + 16);
    }

    #[test]
    fn small_audit_runs() {
        let cfg = AuditConfig { trials: 1000, ..AuditConfig::default() };
        let out = run_audit(&cfg).unwrap();
        assert!(out.budget > 0.0);
        assert_eq!(out.honest.trials, 1000);
    }
}
