use predict_core::dp::{bt_init, BTParams};
use predict_core::domain::NoiseSource;
use predict_core::harness::{
    plan_halfspace, plan_oblivious, read_csv, run_experiment, run_trials, write_csv, AggregateRow, Constants,
    ExperimentConfig, CSV_HEADER,
};
use predict_core::predictor::{T_LOWER, T_UPPER};
use proptest::prelude::*;

const C: Constants = Constants { k: 1.0, m: 1.0 };

#[test]
fn oblivious_plan_golden_value() {
    let p = plan_oblivious(1, 1 << 10, 0.1, 0.1, 1.0, 1e-6, &C).unwrap();
    assert_eq!((p.k, p.m, p.n), (28_230, 1_295_048, 36_559_205_040));
    assert!((p.eps_bt - 0.04242854178605295).abs() < 1e-15);
    assert!((p.beta_bt - 7.637906148852249e-06).abs() < 1e-18);
}

#[test]
fn oblivious_plan_grows_with_t_and_inverse_alpha() {
    let mut prev = plan_oblivious(1, 1 << 4, 0.1, 0.1, 1.0, 1e-6, &C).unwrap();
    for e in 5..=16 {
        let p = plan_oblivious(1, 1 << e, 0.1, 0.1, 1.0, 1e-6, &C).unwrap();
        assert!(p.k > prev.k && p.m >= prev.m, "T = 2^{e}");
        prev = p;
    }
    for alpha in [0.2, 0.1, 0.05] {
        let a = plan_oblivious(2, 1024, alpha, 0.1, 1.0, 1e-6, &C).unwrap();
        let b = plan_oblivious(2, 1024, alpha / 2.0, 0.1, 1.0, 1e-6, &C).unwrap();
        assert!(b.m >= 4 * a.m);
    }
}

#[test]
fn halfspace_plan_examples() {
    for d in [2, 3, 4] {
        let p = plan_halfspace(d, 1024, 0.1, 0.1, 1.0, 1e-6, &C).unwrap();
        assert_eq!(p.alpha_bt, 0.1 / (d * d) as f64);
        // The per-instance delta is delta/d, so d+1 instances cost at most 2 delta.
        assert!(p.delta_bt * (d + 1) as f64 <= 2.0 * 1e-6 * (1.0 + 1e-12));
    }
    let mut ratios = Vec::new();
    for d in [2, 3] {
        for e in [6, 10, 14] {
            let t = 1usize << e;
            let p = plan_halfspace(d, t, 0.1, 0.1, 1.0, 1e-6, &C).unwrap();
            ratios.push(p.k as f64 / ((d as f64).sqrt() * (t as f64).ln()));
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    assert!(hi / lo < 2.0, "k / (sqrt(d) ln T) ranges over {lo}..{hi}");
}

fn config(body: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(body).unwrap()
}

const EMPTY: &str = r#"{"mode": "oblivious", "T": 0, "alpha": 0.1, "beta": 0.1, "eps": 1.0, "delta": 1e-5,
    "trials": 1, "seed": 1, "domain_size": 64, "bt": {"eps": 1.0, "delta": 0.01, "beta": 1e-6}, "block_size": 1}"#;

#[test]
fn empty_experiment_writes_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(EMPTY);
    cfg.out_dir = dir.path().to_path_buf();
    let s = run_experiment(&cfg).unwrap();
    assert_eq!(s.rows.len(), 1);
    assert_eq!(s.rows[0].top_count, 0);
    assert_eq!(read_csv(&s.dir.join("aggregate.csv")).unwrap(), s.rows);
    assert!(s.dir.join(format!("{}.json", s.rows[0].seed)).exists());
}

const THRESHOLDS: &str = r#"{"mode": "oblivious", "T": 128, "alpha": 0.1, "beta": 0.1, "eps": 1.0, "delta": 1e-5,
    "trials": 6, "seed": 21, "domain_size": 1024, "bt": {"k": 300, "delta": 0.01, "beta": 0.01},
    "block_size": 20, "eval_points": 500}"#;

#[test]
fn experiments_are_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = config(THRESHOLDS);
    a.out_dir = dir.path().join("a");
    let mut b = a.clone();
    b.out_dir = dir.path().join("b");
    b.workers = 3;
    let sa = run_experiment(&a).unwrap();
    let sb = run_experiment(&b).unwrap();
    assert_eq!(sa.digest, sb.digest);
    assert_eq!(std::fs::read(sa.dir.join("aggregate.csv")).unwrap(), std::fs::read(sb.dir.join("aggregate.csv")).unwrap());
    for row in &sa.rows {
        let name = format!("{}.json", row.seed);
        assert_eq!(std::fs::read(sa.dir.join(&name)).unwrap(), std::fs::read(sb.dir.join(&name)).unwrap());
    }
}

#[test]
fn halfspace_desk_runs_stop_within_three_hard_queries() {
    let cfg = config(
        r#"{"mode": "halfspace", "d": 2, "T": 256, "alpha": 0.1, "beta": 0.1, "eps": 1.0, "delta": 1e-5,
        "trials": 10, "seed": 4, "bt": {"k": 50, "delta": 1e-5, "beta": 0.01}, "block_size": 12}"#,
    );
    let (_, outcomes) = run_trials(&cfg).unwrap();
    let within = outcomes.iter().filter(|o| !o.report.aborted && o.report.top_count <= 3).count();
    assert!(within >= 9, "{within}/10 runs within three hard queries");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planner_outputs_satisfy_the_gap(
        d in 1usize..=4,
        e in 2u32..=16,
        alpha in 0.01f64..0.5,
        beta in 0.01f64..0.5,
        eps in 0.1f64..4.0,
        log_delta in -10.0f64..-3.0,
    ) {
        let delta = 10f64.powf(log_delta);
        let plans = [
            plan_oblivious(d, 1 << e, alpha, beta, eps, delta, &C).unwrap(),
            plan_halfspace(d.max(2), 1 << e, alpha, beta, eps, delta, &C).unwrap(),
        ];
        for plan in plans {
            let params = BTParams::new(plan.eps_bt, plan.delta_bt, plan.k, T_LOWER, T_UPPER, 1 << e);
            prop_assert!(bt_init(params, &mut NoiseSource::zero()).is_ok());
            prop_assert_eq!(plan.n, plan.k * plan.m);
        }
    }

    #[test]
    fn csv_rows_round_trip(rows in proptest::collection::vec(
        (any::<u64>(), 0usize..100, 0.0f64..1.0, 0.0f64..1e3, 0.0f64..1.0, 0usize..1000, 0usize..10, any::<u64>()),
        0..20,
    )) {
        let rows: Vec<AggregateRow> = rows
            .into_iter()
            .map(|(seed, top_count, max_block_error, final_eps, final_delta, wrong, fallback, wall_ms)| AggregateRow {
                seed,
                top_count,
                max_block_error,
                final_eps,
                final_delta,
                wrong_prediction_count: wrong,
                fallback_count: fallback,
                wall_ms,
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("aggregate.csv");
        write_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        prop_assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        prop_assert_eq!(read_csv(&path).unwrap(), rows);
    }
}
