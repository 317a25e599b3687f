use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AdversaryConfig, ExperimentConfig, Mode};
use super::plan::{plan_direct, plan_halfspace, plan_oblivious, PlanResult};
use crate::adversary::{load_query_list, Adversary};
use crate::concepts::{vc_dimension, ConceptClass, EnumeratedClass, Hypothesis};
use crate::domain::{derive_seed, draw_sample, partition, Atom, DataDistribution, Label, LabeledSample, NoiseSource, Point, Sampler};
use crate::dp::BTOutcome;
use crate::error::{config, Result};
use crate::predictor::{
    default_v_max_halfspace, default_v_max_oblivious, run_with_blocks, vote_fraction, GeneratorKind, PredictorConfig, RunReport,
};

/// Column order of `aggregate.csv`.
pub const CSV_HEADER: [&str; 8] = [
    "seed",
    "top_count",
    "max_block_error",
    "final_eps",
    "final_delta",
    "wrong_prediction_count",
    "fallback_count",
    "wall_ms",
];

/// One row of `aggregate.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub seed: u64,
    pub top_count: usize,
    pub max_block_error: f64,
    pub final_eps: f64,
    pub final_delta: f64,
    pub wrong_prediction_count: usize,
    pub fallback_count: usize,
    pub wall_ms: u64,
}

/// Everything needed to execute one seeded trial.
pub struct TrialSetup {
    pub seed: u64,
    pub target: Hypothesis,
    pub distribution: DataDistribution,
    pub sample: LabeledSample,
    pub generator: GeneratorKind,
    pub adversary: Adversary,
    pub predictor: PredictorConfig,
    /// The query list when the stream is fixed in advance.
    pub queries: Option<Vec<Point>>,
}

/// A finished trial with the metrics derived from it.
pub struct TrialOutcome {
    pub report: RunReport,
    pub row: AggregateRow,
    pub target: Hypothesis,
    pub queries: Option<Vec<Point>>,
    /// Error of the final ensemble's majority vote on fresh points.
    pub holdout_error: Option<f64>,
    /// Wrong `L`/`R` answers where fewer than a quarter of the ensemble erred.
    pub transfer_violations: usize,
}

pub struct ExperimentSummary {
    pub digest: String,
    pub dir: PathBuf,
    pub plan: PlanResult,
    pub rows: Vec<AggregateRow>,
    /// Fraction of runs meeting the gate, when one is configured.
    pub gate_fraction: Option<f64>,
    pub gate_passed: bool,
}

/// Seed of trial `index` under a master seed.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64)
}

fn concept_class(cfg: &ExperimentConfig) -> Result<ConceptClass> {
    match (&cfg.mode, &cfg.class_file) {
        (Mode::Halfspace, _) => Ok(ConceptClass::Halfspaces { dim: cfg.d.unwrap_or(0) }),
        (_, Some(path)) => Ok(ConceptClass::Enumerated(Arc::new(EnumeratedClass::load(path)?))),
        (_, None) => Ok(ConceptClass::Thresholds { domain: cfg.domain_size }),
    }
}

/// VC dimension used by planners and the hard-query budget.
pub fn planning_dimension(cfg: &ExperimentConfig) -> Result<usize> {
    Ok(match cfg.mode {
        Mode::Halfspace => cfg.d.unwrap_or(0),
        _ => match cfg.d {
            Some(d) => d,
            None => vc_dimension(&concept_class(cfg)?).max(1),
        },
    })
}

/// Desk overrides win; otherwise the closed-form planners apply.
pub fn resolve_plan(cfg: &ExperimentConfig) -> Result<PlanResult> {
    let d = planning_dimension(cfg)?;
    if let Some(bt) = &cfg.bt {
        return plan_direct(d, cfg.rounds, cfg.alpha, cfg.beta, bt, cfg.block_size, &cfg.constants);
    }
    let mut plan = match cfg.mode {
        Mode::Halfspace => plan_halfspace(d, cfg.rounds, cfg.alpha, cfg.beta, cfg.eps, cfg.delta, &cfg.constants)?,
        _ => plan_oblivious(d, cfg.rounds, cfg.alpha, cfg.beta, cfg.eps, cfg.delta, &cfg.constants)?,
    };
    if let Some(m) = cfg.block_size {
        plan.m = m;
        plan.n = plan.k * m;
    }
    Ok(plan)
}

fn v_max(cfg: &ExperimentConfig, d: usize) -> usize {
    cfg.v_max.unwrap_or(match cfg.mode {
        Mode::Halfspace => default_v_max_halfspace(d),
        _ => default_v_max_oblivious(d, cfg.rounds, cfg.beta),
    })
}

fn uniform_int(noise: &mut NoiseSource, lo: i64, hi: i64) -> i64 {
    lo + noise.index((hi - lo + 1) as usize) as i64
}

/// Builds the data, target, generator and query stream for one seed.
pub fn setup_trial(cfg: &ExperimentConfig, plan: &PlanResult, seed: u64) -> Result<TrialSetup> {
    let class = concept_class(cfg)?;
    let d = planning_dimension(cfg)?;
    let mut target_noise = NoiseSource::derive(seed, 0);
    let mut data_noise = NoiseSource::derive(seed, 1);
    let adversary_seed = derive_seed(seed, 3);
    let mut list_noise = NoiseSource::seeded(adversary_seed);

    let (target, sampler) = match &class {
        ConceptClass::Thresholds { domain } => {
            let t = uniform_int(&mut target_noise, 1, *domain as i64);
            (Hypothesis::Threshold(t), Sampler::Grid { size: *domain })
        }
        ConceptClass::Enumerated(c) => {
            let row = target_noise.index(c.len());
            let atoms = c.points.iter().map(|p| Atom { point: p.clone(), weight: 1.0 }).collect();
            (Hypothesis::Enumerated { class: c.clone(), row }, Sampler::Mixture { base: None, atoms })
        }
        ConceptClass::Halfspaces { dim } => {
            let a: Vec<f64> = (0..*dim).map(|_| target_noise.gaussian()).collect();
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            let mut z: Vec<f64> = a.iter().map(|x| x / norm).collect();
            z.push(0.6 * target_noise.uniform() - 0.3);
            (Hypothesis::Halfspace(z), Sampler::Box { lo: vec![-1.0; *dim], hi: vec![1.0; *dim] })
        }
    };
    let distribution = DataDistribution::new(sampler, target.clone())?;
    let sample = draw_sample(&distribution, plan.n, &mut data_noise)?;

    let default_adversary = match (&cfg.mode, &class) {
        (Mode::Halfspace, _) => AdversaryConfig::BoundaryProbe { tau: None },
        (_, ConceptClass::Thresholds { .. }) => AdversaryConfig::Window,
        _ => AdversaryConfig::Uniform,
    };
    let choice = cfg.adversary.clone().unwrap_or(default_adversary);
    let rounds = cfg.rounds;
    let (adversary, queries) = if cfg.mode == Mode::StochasticBaseline {
        (Adversary::stochastic(distribution.clone(), adversary_seed), None)
    } else {
        match choice {
            AdversaryConfig::Window => {
                let ConceptClass::Thresholds { domain } = class else {
                    return Err(config("window adversary needs the threshold class"));
                };
                let Hypothesis::Threshold(t) = target else { unreachable!("threshold target") };
                let x = domain as i64;
                let width = x / plan.m.max(1) as i64;
                let lo = (t - 3 * width).max(1);
                let hi = (t + width).min(x);
                let list: Vec<Point> =
                    (0..rounds).map(|_| Point::scalar(uniform_int(&mut list_noise, lo, hi) as f64)).collect();
                (Adversary::oblivious(list.clone()), Some(list))
            }
            AdversaryConfig::Uniform => {
                let list: Vec<Point> = (0..rounds).map(|_| distribution.draw_point(&mut list_noise)).collect();
                (Adversary::oblivious(list.clone()), Some(list))
            }
            AdversaryConfig::File { path, offline } => {
                let list = load_query_list(&path)?;
                let adv = if offline { Adversary::offline(list.clone()) } else { Adversary::oblivious(list.clone()) };
                (adv, Some(list))
            }
            AdversaryConfig::Bisection => {
                let ConceptClass::Thresholds { domain } = class else {
                    return Err(config("bisection adversary needs the threshold class"));
                };
                (Adversary::bisection(1, domain as i64), None)
            }
            AdversaryConfig::BoundaryProbe { tau } => {
                let ConceptClass::Halfspaces { dim } = class else {
                    return Err(config("boundary probe needs the halfspace class"));
                };
                let (lo, hi) = (vec![-1.0; dim], vec![1.0; dim]);
                let tau = tau.unwrap_or_else(|| Adversary::default_probe_distance(cfg.alpha, &lo, &hi));
                (Adversary::boundary_probe(lo, hi, tau, adversary_seed)?, None)
            }
        }
    };
    let generator = match &class {
        ConceptClass::Halfspaces { dim } => GeneratorKind::Halfspace { d: *dim, candidates: cfg.candidates.clone() },
        other => GeneratorKind::Oblivious(other.clone()),
    };
    let predictor = PredictorConfig {
        rounds,
        eps_bt: plan.eps_bt,
        delta_bt: plan.delta_bt,
        beta_bt: plan.beta_bt,
        delta_prime: cfg.delta,
        v_max: v_max(cfg, d),
        noise_multiplier: 1.0,
    };
    Ok(TrialSetup { seed, target, distribution, sample, generator, adversary, predictor, queries })
}

/// Majority vote of `hypotheses` (ties go to `+1`).
pub fn majority(hypotheses: &[Hypothesis], x: &Point) -> Result<Label> {
    Ok(Label::from_bool(vote_fraction(hypotheses, x)? >= 0.5))
}

/// Executes one seeded trial and derives its metrics.
pub fn run_trial(cfg: &ExperimentConfig, plan: &PlanResult, seed: u64) -> Result<TrialOutcome> {
    let start = Instant::now();
    let mut setup = setup_trial(cfg, plan, seed)?;
    let mut noise = NoiseSource::derive(seed, 2);
    // The plan may use more blocks than the accuracy formula asks for, so
    // partition by the planned ensemble size.
    let blocks = partition(&setup.sample, plan.k, &mut noise)?;
    let mut report =
        run_with_blocks(&setup.predictor, blocks, &setup.generator, &mut setup.adversary, &mut noise, seed)?;
    report.config_digest = cfg.digest();

    let target = &setup.target;
    let mut wrong = 0;
    let mut transfer_violations = 0;
    for r in &report.rounds {
        let truth = target.evaluate(&r.x)?;
        if r.label != truth {
            wrong += 1;
            if r.outcome != BTOutcome::Top {
                let erring = if truth == Label::Positive { 1.0 - r.vote } else { r.vote };
                if erring < 0.25 {
                    transfer_violations += 1;
                }
            }
        }
    }
    let holdout_error = if cfg.eval_points > 0 {
        let mut eval_noise = NoiseSource::derive(seed, 4);
        let mut errors = 0usize;
        for _ in 0..cfg.eval_points {
            let x = setup.distribution.draw_point(&mut eval_noise);
            if majority(&report.final_hypotheses, &x)? != target.evaluate(&x)? {
                errors += 1;
            }
        }
        Some(errors as f64 / cfg.eval_points as f64)
    } else {
        None
    };
    let max_block_error = report.generations.iter().map(|g| g.max_block_error).fold(0.0, f64::max);
    let wall_ms = if cfg.record_wall_time { start.elapsed().as_millis() as u64 } else { 0 };
    let row = AggregateRow {
        seed,
        top_count: report.top_count,
        max_block_error,
        final_eps: report.eps_total,
        final_delta: report.delta_total,
        wrong_prediction_count: wrong,
        fallback_count: report.fallback_flags.len(),
        wall_ms,
    };
    Ok(TrialOutcome { report, row, target: setup.target, queries: setup.queries, holdout_error, transfer_violations })
}

/// Runs all trials on a pool of `cfg.workers` threads; results are in trial order.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<(PlanResult, Vec<TrialOutcome>)> {
    cfg.validate()?;
    let plan = resolve_plan(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| config(format!("cannot start worker pool: {e}")))?;
    let outcomes = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, &plan, trial_seed(cfg.seed, i)))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok((plan, outcomes))
}

/// Fraction of rows that finished within the gate's hard-query limit.
pub fn gate_fraction(outcomes: &[TrialOutcome], max_top_count: usize) -> f64 {
    let ok = outcomes.iter().filter(|o| !o.report.aborted && o.report.top_count <= max_top_count).count();
    ok as f64 / outcomes.len().max(1) as f64
}

/// Runs the experiment and writes `runs/<digest>/<seed>.json` and
/// `runs/<digest>/aggregate.csv` under the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let (plan, outcomes) = run_trials(cfg)?;
    let digest = cfg.digest();
    let dir = cfg.out_dir.join("runs").join(&digest);
    std::fs::create_dir_all(&dir)?;
    for o in &outcomes {
        let path = dir.join(format!("{}.json", o.report.seed));
        std::fs::write(path, serde_json::to_string_pretty(&o.report)?)?;
    }
    let rows: Vec<AggregateRow> = outcomes.iter().map(|o| o.row.clone()).collect();
    write_csv(&dir.join("aggregate.csv"), &rows)?;
    let gate_fraction = cfg.gate.as_ref().map(|g| gate_fraction(&outcomes, g.max_top_count));
    let gate_passed = match (&cfg.gate, gate_fraction) {
        (Some(g), Some(f)) => f >= g.min_fraction,
        _ => true,
    };
    Ok(ExperimentSummary { digest, dir, plan, rows, gate_fraction, gate_passed })
}

pub fn write_csv(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(config(format!("unexpected aggregate header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}
