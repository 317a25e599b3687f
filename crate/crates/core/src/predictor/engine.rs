use serde::{Deserialize, Serialize};

use super::generator::{vote_fraction, Ensemble, Generator, GeneratorKind};
use crate::adversary::Adversary;
use crate::concepts::Hypothesis;
use crate::domain::{partition, Label, LabeledSample, NoiseSource, Point};
use crate::dp::{bt_init, bt_query, compose_advanced, BTOutcome, BTParams, BTState, PrivacyLedger};
use crate::error::{self, Error, Result};
use crate::geometry::IntersectOutcome;

/// Lower and upper vote thresholds of the predictor's BetweenThresholds.
pub const T_LOWER: f64 = 0.375;
pub const T_UPPER: f64 = 0.625;

/// Parameters of one prediction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictorConfig {
    /// Number of queries `T`.
    pub rounds: usize,
    pub eps_bt: f64,
    pub delta_bt: f64,
    pub beta_bt: f64,
    /// Slack `delta'` of advanced composition.
    pub delta_prime: f64,
    /// Hard-query budget; the run stops before exceeding it.
    pub v_max: usize,
    /// Scales every Laplace noise draw; values below 1 break privacy (auditing only).
    #[serde(default = "unit")]
    pub noise_multiplier: f64,
}

fn unit() -> f64 {
    1.0
}

/// Ensemble size `ceil((64 / eps) (ln(T + 1) + ln(1 / beta)))`.
pub fn required_blocks(eps_bt: f64, beta_bt: f64, rounds: usize) -> usize {
    (64.0 / eps_bt * ((rounds as f64 + 1.0).ln() + (1.0 / beta_bt).ln())).ceil() as usize
}

/// `4 (vc log2 T + log2(1/beta))`, rounded up.
pub fn default_v_max_oblivious(vc: usize, rounds: usize, beta: f64) -> usize {
    let log_t = (rounds.max(1) as f64).log2();
    (4.0 * (vc as f64 * log_t + (1.0 / beta).log2())).ceil().max(1.0) as usize
}

/// `d + 2`: one more than the number of hard queries a halfspace run can absorb.
pub fn default_v_max_halfspace(d: usize) -> usize {
    d + 2
}

/// One answered query.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub j: usize,
    pub x: Point,
    pub outcome: BTOutcome,
    pub label: Label,
    pub vote: f64,
    /// The coin drawn on a `Top` round.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coin: Option<bool>,
    pub degenerate: bool,
}

/// A round on which BetweenThresholds answered `Top`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopRecord {
    pub round: usize,
    pub x: Point,
    pub label: Label,
    pub vote: f64,
    /// Dimension of the feasible subspace after this query (halfspace runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersect: Option<IntersectOutcome>,
}

/// Hypotheses had to be generated from a version space with its newest
/// constraints dropped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FallbackFlag {
    pub round: usize,
    pub hard_count: usize,
    pub dropped: usize,
}

/// Summary of one ensemble generation (one per hard-query count).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub hard_count: usize,
    pub first_round: usize,
    pub max_block_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_cdepth_fraction: Option<f64>,
    pub degenerate: bool,
    pub dropped_constraints: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub config_digest: String,
    pub rounds: Vec<RoundRecord>,
    pub top_rounds: Vec<TopRecord>,
    pub eps_total: f64,
    pub delta_total: f64,
    pub fallback_flags: Vec<FallbackFlag>,
    pub top_count: usize,
    /// BetweenThresholds instances created, including the live one.
    pub instances_opened: usize,
    /// One `(eps, delta)` per instance that answered at least one query.
    pub ledger: Vec<(f64, f64)>,
    /// The hard-query budget ran out before all rounds were answered.
    pub aborted: bool,
    pub generations: Vec<GenerationRecord>,
    pub final_hypotheses: Vec<Hypothesis>,
}

impl RunReport {
    /// The public transcript: queries and released labels.
    pub fn public_transcript(&self) -> Vec<(Point, Label)> {
        self.rounds.iter().map(|r| (r.x.clone(), r.label)).collect()
    }
}

/// The prediction loop over a fixed partition of the sample.
pub struct Predictor {
    config: PredictorConfig,
    bt_params: BTParams,
    bt: BTState,
    generator: Generator,
    cache: Option<Ensemble>,
    ledger: PrivacyLedger,
    rounds: Vec<RoundRecord>,
    public: Vec<(Point, Label)>,
    top_rounds: Vec<TopRecord>,
    fallback_flags: Vec<FallbackFlag>,
    generations: Vec<GenerationRecord>,
    instances_opened: usize,
}

impl Predictor {
    /// Starts a predictor over pre-partitioned blocks (no check of the block count).
    pub fn new(
        config: PredictorConfig,
        blocks: Vec<LabeledSample>,
        kind: &GeneratorKind,
        noise: &mut NoiseSource,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(error::config("predictor needs at least one block"));
        }
        if !(config.delta_prime > 0.0 && config.delta_prime < 1.0) {
            return Err(error::config("delta' must lie in (0,1)"));
        }
        let mut bt_params =
            BTParams::new(config.eps_bt, config.delta_bt, blocks.len(), T_LOWER, T_UPPER, config.rounds.max(1));
        bt_params.validate()?;
        bt_params.noise_multiplier = config.noise_multiplier;
        let bt = bt_init(bt_params.clone(), noise)?;
        let generator = Generator::new(kind, blocks)?;
        Ok(Predictor {
            ledger: PrivacyLedger::new(config.delta_prime),
            config,
            bt_params,
            bt,
            generator,
            cache: None,
            rounds: Vec::new(),
            public: Vec::new(),
            top_rounds: Vec::new(),
            fallback_flags: Vec::new(),
            generations: Vec::new(),
            instances_opened: 1,
        })
    }

    pub fn top_count(&self) -> usize {
        self.top_rounds.len()
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    /// Queries and released labels so far; all an adversary may observe.
    pub fn public_transcript(&self) -> &[(Point, Label)] {
        &self.public
    }

    /// Current ensemble, regenerated only when the hard-query set has grown.
    pub fn ensemble(&mut self) -> Result<&Ensemble> {
        let hard = self.top_count();
        if self.cache.as_ref().map_or(true, |c| c.hard_count != hard) {
            let e = self.generator.generate(hard)?;
            if e.dropped_constraints > 0 {
                self.fallback_flags.push(FallbackFlag {
                    round: self.rounds.len(),
                    hard_count: hard,
                    dropped: e.dropped_constraints,
                });
            }
            self.generations.push(GenerationRecord {
                hard_count: hard,
                first_round: self.rounds.len(),
                max_block_error: e.max_block_error,
                min_cdepth_fraction: e.min_cdepth_fraction,
                degenerate: e.degenerate,
                dropped_constraints: e.dropped_constraints,
            });
            self.cache = Some(e);
        }
        Ok(self.cache.as_ref().expect("ensemble cached above"))
    }

    /// Answers one query. Consumes noise in a fixed order: the query noise,
    /// then on `Top` the label coin and the next instance's threshold noise.
    pub fn predict_round(&mut self, x: &Point, noise: &mut NoiseSource) -> Result<(Label, BTOutcome)> {
        if self.rounds.len() >= self.config.rounds {
            return Err(crate::error::usage("all rounds already answered"));
        }
        if self.top_count() >= self.config.v_max {
            return Err(Error::BudgetExceeded(self.config.v_max));
        }
        let (vote, degenerate) = {
            let e = self.ensemble()?;
            (vote_fraction(&e.hypotheses, x)?, e.degenerate)
        };
        let outcome = bt_query(&mut self.bt, vote, noise)?;
        let j = self.rounds.len();
        let (label, coin) = match outcome {
            BTOutcome::L => (Label::Negative, None),
            BTOutcome::R => (Label::Positive, None),
            BTOutcome::Top => {
                let c = noise.coin();
                (Label::from_bool(c), Some(c))
            }
        };
        self.public.push((x.clone(), label));
        self.rounds.push(RoundRecord { j, x: x.clone(), outcome, label, vote, coin, degenerate });
        if outcome == BTOutcome::Top {
            self.ledger.append(self.bt_params.eps, self.bt_params.delta);
            self.bt = bt_init(self.bt_params.clone(), noise)?;
            self.instances_opened += 1;
            let intersect = self.generator.add_hard(x, label)?;
            self.top_rounds.push(TopRecord {
                round: j,
                x: x.clone(),
                label,
                vote,
                subspace_dim: self.generator.subspace().map(|s| s.dim()),
                intersect,
            });
        }
        Ok((label, outcome))
    }

    /// Closes the ledger and assembles the report.
    pub fn finish(mut self, seed: u64, aborted: bool) -> Result<RunReport> {
        if self.bt.queries_answered > 0 {
            self.ledger.append(self.bt_params.eps, self.bt_params.delta);
        }
        let (eps_total, delta_total) = compose_advanced(&self.ledger)?;
        let final_hypotheses = self.ensemble()?.hypotheses.clone();
        Ok(RunReport {
            seed,
            config_digest: String::new(),
            top_count: self.top_rounds.len(),
            rounds: self.rounds,
            top_rounds: self.top_rounds,
            eps_total,
            delta_total,
            fallback_flags: self.fallback_flags,
            instances_opened: self.instances_opened,
            ledger: self.ledger.entries().to_vec(),
            aborted,
            generations: self.generations,
            final_hypotheses,
        })
    }
}

/// Runs the full protocol: checks the ensemble size, partitions the sample,
/// and answers `config.rounds` queries from `adversary`, stopping early only
/// when the hard-query budget is exhausted.
pub fn run(
    config: &PredictorConfig,
    sample: &LabeledSample,
    kind: &GeneratorKind,
    adversary: &mut Adversary,
    noise: &mut NoiseSource,
    seed: u64,
) -> Result<RunReport> {
    let k = required_blocks(config.eps_bt, config.beta_bt, config.rounds);
    if sample.len() % k != 0 || sample.is_empty() {
        return Err(error::config(format!(
            "sample size {} is not a positive multiple of the ensemble size {k}",
            sample.len()
        )));
    }
    let blocks = partition(sample, k, noise)?;
    run_with_blocks(config, blocks, kind, adversary, noise, seed)
}

/// As [`run`], over a given partition.
pub fn run_with_blocks(
    config: &PredictorConfig,
    blocks: Vec<LabeledSample>,
    kind: &GeneratorKind,
    adversary: &mut Adversary,
    noise: &mut NoiseSource,
    seed: u64,
) -> Result<RunReport> {
    let mut predictor = Predictor::new(config.clone(), blocks, kind, noise)?;
    let mut aborted = false;
    for _ in 0..config.rounds {
        if predictor.top_count() >= config.v_max {
            aborted = true;
            break;
        }
        let x = adversary.next_query(predictor.public_transcript())?;
        predictor.predict_round(&x, noise)?;
    }
    predictor.finish(seed, aborted)
}
