use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmlink::config::ScenarioConfig;
use swarmlink::experiments::{
    capability_model, run_aggregation_sweep, run_feedback_scenario, run_street_benchmark,
    run_sweep, unimodality_check, ExperimentError, ExperimentResult, SweepSpec,
};
use swarmlink::report::{ResultRow, Value};

const STREET: &str = include_str!("../configs/street6.toml");
const FEEDBACK: &str = include_str!("../configs/feedback.toml");
const AGGREGATION: &str = include_str!("../configs/aggregation.toml");

fn short_aggregation() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::from_toml(AGGREGATION).unwrap();
    cfg.run.ticks = 200;
    cfg
}

fn csv(result: &ExperimentResult) -> Vec<u8> {
    let mut buf = Vec::new();
    result.write_csv(&mut buf).unwrap();
    buf
}

#[test]
fn capability_model_by_brute_force() {
    assert_eq!(capability_model(1), 0.0);
    let values: Vec<f64> = (1..=100).map(capability_model).collect();
    let argmax = (0..values.len())
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap()
        + 1;
    assert_eq!(argmax, 3);
    for n in 3..100 {
        assert!(values[n] < values[n - 1], "not decreasing at n = {}", n + 1);
    }
    assert!(values[1] < values[2]);
}

#[test]
fn synthetic_capability_curve_is_unimodal() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rows = Vec::new();
    for n in [1usize, 3, 6, 12, 24, 48] {
        for seed in 0..20u64 {
            let noise = rng.random_range(-0.02..0.02);
            rows.push(ResultRow {
                scenario: "synthetic".into(),
                n,
                seed,
                metric: "m".into(),
                value: (capability_model(n as u32) + noise).into(),
            });
        }
    }
    let verdict = unimodality_check(&ExperimentResult::from_rows(rows), "m").unwrap();
    assert!(verdict.holds, "{:?}", verdict.reason);
    assert_eq!(verdict.peak, 1);
}

#[test]
fn sweep_rows_are_reproducible_and_sorted() {
    let spec = SweepSpec::new(short_aggregation(), vec![10, 5], vec![3, 1, 2]);
    let a = run_aggregation_sweep(&spec).unwrap();
    let b = run_aggregation_sweep(&spec).unwrap();
    assert_eq!(csv(&a), csv(&b));
    let keys: Vec<(usize, u64)> = a.rows.iter().map(|r| (r.n, r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    // one row per (n, seed, metric)
    let mut triples: Vec<_> = a
        .rows
        .iter()
        .map(|r| (r.n, r.seed, r.metric.clone()))
        .collect();
    let before = triples.len();
    triples.dedup();
    assert_eq!(before, triples.len());
    assert_eq!(a.values("cluster_fraction", 5).len(), 3);
    assert_eq!(a.values("control_cluster_fraction", 10).len(), 3);
}

#[test]
fn bad_specs_rejected() {
    let base = short_aggregation();
    let empty_n = SweepSpec::new(base.clone(), vec![], vec![1]);
    assert!(matches!(
        run_sweep(&empty_n),
        Err(ExperimentError::NoCounts)
    ));
    let empty_seeds = SweepSpec::new(base.clone(), vec![3], vec![]);
    assert!(matches!(
        run_sweep(&empty_seeds),
        Err(ExperimentError::NoSeeds)
    ));
    let zero = SweepSpec::new(base.clone(), vec![0, 3], vec![1]);
    assert!(matches!(run_sweep(&zero), Err(ExperimentError::ZeroRobots)));
    let mut no_ticks = SweepSpec::new(base.clone(), vec![3], vec![1]);
    no_ticks.ticks = Some(0);
    assert!(matches!(
        run_sweep(&no_ticks),
        Err(ExperimentError::NoTicks)
    ));
    let wrong = SweepSpec::new(base, vec![3], vec![1]);
    assert!(matches!(
        run_street_benchmark(&wrong),
        Err(ExperimentError::WrongScenario { .. })
    ));
}

#[test]
fn street_benchmark_matches_the_hop_oracle() {
    let mut base = ScenarioConfig::from_toml(STREET).unwrap();
    base.arena.width = 2.1;
    let spec = SweepSpec::new(base, vec![3, 6, 15], vec![0, 1]);
    let result = run_street_benchmark(&spec).unwrap();
    assert_eq!(result.failures().count(), 0);
    for n in [3, 6, 15] {
        for seed in [0, 1] {
            assert_eq!(result.value("oracle_match", n, seed), Some(&Value::Int(1)));
            assert_eq!(
                result.value("build_rounds", n, seed),
                Some(&Value::Int(n as i64 - 1))
            );
            assert_eq!(
                result.value("street_length", n, seed),
                Some(&Value::Int(n as i64))
            );
        }
    }
}

#[test]
fn incomplete_streets_become_failure_rows() {
    let mut base = ScenarioConfig::from_toml(STREET).unwrap();
    base.robots.end_landmark = false;
    let result = run_street_benchmark(&SweepSpec::new(base, vec![4], vec![0])).unwrap();
    assert_eq!(result.failures().count(), 1);
}

#[test]
fn feedback_scenario_reports_outcomes() {
    let base = ScenarioConfig::from_toml(FEEDBACK).unwrap();
    let result = run_feedback_scenario(&SweepSpec::new(base, vec![6], vec![0, 1])).unwrap();
    for seed in [0, 1] {
        assert_eq!(
            result.value("outcome", 6, seed),
            Some(&Value::Text("Teamed".into()))
        );
        assert_eq!(
            result.value("responders_confirmed", 6, seed),
            Some(&Value::Int(2))
        );
    }
}
