//! Seeded experiment harness: parameter sweeps over swarm size and seed,
//! protocol benchmarks and the statistics used to read them.
//!
//! Every `(n, seed)` cell is an independent world, so cells run in parallel;
//! the row table is sorted afterwards and is therefore identical however the
//! cells were scheduled.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Placement, ScenarioConfig};
use crate::report::{sort_rows, ResultRow, Value};
use crate::scenario::{run_scenario_with, RunOptions};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("sweep needs at least one n value")]
    NoCounts,
    #[error("sweep needs at least one seed")]
    NoSeeds,
    #[error("sweep needs ticks > 0")]
    NoTicks,
    #[error("swarm size must be at least 1")]
    ZeroRobots,
    #[error("expected a {expected} scenario, got {found}")]
    WrongScenario {
        expected: &'static str,
        found: &'static str,
    },
    #[error("street benchmark needs chain placement")]
    NotAChain,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// A cross product of swarm sizes and seeds over one base scenario.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub n_values: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Overrides `base.run.ticks` when set.
    pub ticks: Option<u64>,
}

impl SweepSpec {
    pub fn new(base: ScenarioConfig, n_values: Vec<usize>, seeds: Vec<u64>) -> Self {
        SweepSpec {
            base,
            n_values,
            seeds,
            ticks: None,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_values.is_empty() {
            return Err(ExperimentError::NoCounts);
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::NoSeeds);
        }
        if self.ticks == Some(0) {
            return Err(ExperimentError::NoTicks);
        }
        if self.n_values.contains(&0) {
            return Err(ExperimentError::ZeroRobots);
        }
        // validate every size once, so bad cells fail up front
        for &n in &self.n_values {
            self.cell(n, self.seeds[0]).validate()?;
        }
        Ok(())
    }

    fn cell(&self, n: usize, seed: u64) -> ScenarioConfig {
        let mut cfg = self.base.clone().with_count(n).with_seed(seed);
        if let Some(t) = self.ticks {
            cfg.run.ticks = t;
        }
        cfg
    }

    fn cells(&self) -> Vec<(usize, u64)> {
        self.n_values
            .iter()
            .flat_map(|&n| self.seeds.iter().map(move |&s| (n, s)))
            .collect()
    }
}

/// Rows of `(scenario, n, seed, metric, value)`, in sorted order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
}

impl ExperimentResult {
    pub fn from_rows(mut rows: Vec<ResultRow>) -> Self {
        sort_rows(&mut rows);
        ExperimentResult { rows }
    }

    /// Numeric values of `metric`, grouped by swarm size.
    pub fn by_n(&self, metric: &str) -> BTreeMap<usize, Vec<f64>> {
        let mut out: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.metric == metric) {
            if let Some(v) = r.value.as_f64() {
                out.entry(r.n).or_default().push(v);
            }
        }
        out
    }

    pub fn values(&self, metric: &str, n: usize) -> Vec<f64> {
        self.by_n(metric).remove(&n).unwrap_or_default()
    }

    pub fn value(&self, metric: &str, n: usize, seed: u64) -> Option<&Value> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.n == n && r.seed == seed)
            .map(|r| &r.value)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.metric == "failure")
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        crate::report::write_rows(out, &self.rows)
    }
}

fn failure_row(scenario: &str, n: usize, seed: u64, err: impl ToString) -> ResultRow {
    ResultRow {
        scenario: scenario.to_string(),
        n,
        seed,
        metric: "failure".to_string(),
        value: Value::Text(err.to_string()),
    }
}

fn quiet() -> RunOptions {
    RunOptions {
        record_events: false,
        cluster_snapshots: false,
    }
}

fn run_cell(spec: &SweepSpec, n: usize, seed: u64) -> Vec<ResultRow> {
    let cfg = spec.cell(n, seed);
    let scenario = cfg.protocol.name();
    match run_scenario_with(&cfg, quiet()) {
        Ok(out) => {
            let mut rows: Vec<ResultRow> = out
                .metrics
                .into_iter()
                .map(|(metric, value)| ResultRow {
                    scenario: scenario.to_string(),
                    n,
                    seed,
                    metric,
                    value,
                })
                .collect();
            if let Some(reason) = out.incomplete {
                if !rows.iter().any(|r| r.metric == "failure") {
                    rows.push(failure_row(scenario, n, seed, reason));
                }
            }
            rows
        }
        Err(e) => vec![failure_row(scenario, n, seed, e)],
    }
}

/// Runs every cell of the sweep with the base scenario's own protocol.
/// Cells that fail produce a `failure` row instead of metrics.
pub fn run_sweep(spec: &SweepSpec) -> Result<ExperimentResult, ExperimentError> {
    spec.validate()?;
    let rows = spec
        .cells()
        .into_par_iter()
        .flat_map_iter(|(n, seed)| run_cell(spec, n, seed))
        .collect();
    Ok(ExperimentResult::from_rows(rows))
}

fn expect_protocol(spec: &SweepSpec, expected: &'static str) -> Result<(), ExperimentError> {
    let found = spec.base.protocol.name();
    if found != expected {
        return Err(ExperimentError::WrongScenario { expected, found });
    }
    Ok(())
}

/// Aggregation sweep. Each cell is run twice from the same seed: once as
/// configured and once as a control with every light switched off. Both
/// runs report the anchored cluster fraction; the control's is stored as
/// `control_cluster_fraction`.
pub fn run_aggregation_sweep(spec: &SweepSpec) -> Result<ExperimentResult, ExperimentError> {
    expect_protocol(spec, "aggregation")?;
    spec.validate()?;
    let mut control = spec.clone();
    for light in &mut control.base.lights {
        light.peak_intensity = 0.0;
    }
    let rows = spec
        .cells()
        .into_par_iter()
        .flat_map_iter(|(n, seed)| {
            let mut rows = run_cell(spec, n, seed);
            rows.extend(
                run_cell(&control, n, seed)
                    .into_iter()
                    .filter(|r| r.metric == "cluster_fraction" || r.metric == "failure")
                    .map(|mut r| {
                        r.metric = format!("control_{}", r.metric);
                        r
                    }),
            );
            rows
        })
        .collect();
    Ok(ExperimentResult::from_rows(rows))
}

/// Street build/propagation benchmark over chain placements. In runs
/// without motion, an `oracle_match` row records whether the build latency
/// equals the hop distance of the terminus.
pub fn run_street_benchmark(spec: &SweepSpec) -> Result<ExperimentResult, ExperimentError> {
    expect_protocol(spec, "street")?;
    if spec.base.robots.placement != Placement::Chain {
        return Err(ExperimentError::NotAChain);
    }
    run_sweep(spec)
}

pub fn run_feedback_scenario(spec: &SweepSpec) -> Result<ExperimentResult, ExperimentError> {
    expect_protocol(spec, "feedback")?;
    run_sweep(spec)
}

/// The `ln(n)/n` capability curve.
pub fn capability_model(n: u32) -> f64 {
    assert!(n >= 1, "capability_model needs n >= 1");
    let n = f64::from(n);
    n.ln() / n
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let count = values.len();
        if count == 0 {
            return Summary {
                mean: f64::NAN,
                se: f64::NAN,
                count,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let se = if count < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        };
        Summary { mean, se, count }
    }

    /// Standard error of the difference of two independent means.
    pub fn pooled_se(&self, other: &Summary) -> f64 {
        self.se.hypot(other.se)
    }
}

/// Two-sample comparison of a treatment against a control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub treatment: Summary,
    pub control: Summary,
    pub difference: f64,
    pub pooled_se: f64,
}

impl Comparison {
    pub fn new(treatment: &[f64], control: &[f64]) -> Comparison {
        let treatment = Summary::of(treatment);
        let control = Summary::of(control);
        Comparison {
            treatment,
            control,
            difference: treatment.mean - control.mean,
            pooled_se: treatment.pooled_se(&control),
        }
    }

    /// The means differ by no more than one pooled standard error.
    pub fn indistinguishable(&self) -> bool {
        self.difference.abs() <= self.pooled_se
    }

    /// The treatment exceeds the control by more than one pooled standard error.
    pub fn exceeds(&self) -> bool {
        self.difference > self.pooled_se
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unimodality {
    pub holds: bool,
    /// Index of the largest mean.
    pub peak: usize,
    pub summaries: Vec<Summary>,
    pub reason: Option<String>,
}

/// Shape test on per-`n` summaries, ordered by `n`: the largest mean must be
/// interior, exceed the first mean and the last mean by more than their
/// pooled standard error, and no later step may rise by more than its pooled
/// standard error.
pub fn unimodal(summaries: &[Summary]) -> Unimodality {
    let fail = |peak, reason: String| Unimodality {
        holds: false,
        peak,
        summaries: summaries.to_vec(),
        reason: Some(reason),
    };
    if summaries.len() < 3 {
        return fail(0, "fewer than three points".into());
    }
    let peak = summaries
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.mean.total_cmp(&b.1.mean).then(b.0.cmp(&a.0)))
        .map(|(k, _)| k)
        .expect("nonempty");
    let last = summaries.len() - 1;
    if peak == 0 || peak == last {
        return fail(peak, format!("maximum at the boundary (index {peak})"));
    }
    let top = &summaries[peak];
    let first = &summaries[0];
    if top.mean - first.mean <= top.pooled_se(first) {
        return fail(peak, "no significant rise before the peak".into());
    }
    let end = &summaries[last];
    if top.mean - end.mean <= top.pooled_se(end) {
        return fail(peak, "no significant fall after the peak".into());
    }
    for k in peak..last {
        let (a, b) = (&summaries[k], &summaries[k + 1]);
        if b.mean - a.mean > a.pooled_se(b) {
            return fail(
                peak,
                format!("rises again after the peak at index {}", k + 1),
            );
        }
    }
    Unimodality {
        holds: true,
        peak,
        summaries: summaries.to_vec(),
        reason: None,
    }
}

pub const MIN_SWEEP_COUNTS: usize = 4;
pub const MIN_SWEEP_SEEDS: usize = 20;

/// Unimodality of the seed-mean of `metric` over `n`. Needs at least
/// four sizes with twenty seeds each.
pub fn unimodality_check(
    result: &ExperimentResult,
    metric: &str,
) -> Result<Unimodality, ExperimentError> {
    let groups = result.by_n(metric);
    if groups.len() < MIN_SWEEP_COUNTS {
        return Err(ExperimentError::InsufficientData(format!(
            "{} distinct n values for {metric}, need {MIN_SWEEP_COUNTS}",
            groups.len()
        )));
    }
    if let Some((n, v)) = groups.iter().find(|(_, v)| v.len() < MIN_SWEEP_SEEDS) {
        return Err(ExperimentError::InsufficientData(format!(
            "{} seeds at n = {n}, need {MIN_SWEEP_SEEDS}",
            v.len()
        )));
    }
    let summaries: Vec<Summary> = groups.values().map(|v| Summary::of(v)).collect();
    Ok(unimodal(&summaries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(means: &[f64]) -> Vec<Summary> {
        means
            .iter()
            .map(|&mean| Summary {
                mean,
                se: 0.0,
                count: 20,
            })
            .collect()
    }

    #[test]
    fn capability_model_shape() {
        assert_eq!(capability_model(1), 0.0);
        let argmax = (1..=100u32)
            .max_by(|&a, &b| capability_model(a).total_cmp(&capability_model(b)))
            .unwrap();
        assert_eq!(argmax, 3);
    }

    #[test]
    fn unimodal_by_definition() {
        let u = unimodal(&exact(&[0.1, 0.5, 0.6, 0.4]));
        assert!(u.holds);
        assert_eq!(u.peak, 2);
        assert!(!unimodal(&exact(&[0.1, 0.2, 0.3, 0.4])).holds);
        assert!(!unimodal(&exact(&[0.4, 0.3, 0.2, 0.1])).holds);
        assert!(!unimodal(&exact(&[0.1, 0.6, 0.2, 0.5])).holds);
    }

    #[test]
    fn noise_hides_a_small_peak() {
        let mut s = exact(&[0.1, 0.15, 0.1, 0.1]);
        for x in &mut s {
            x.se = 0.1;
        }
        assert!(!unimodal(&s).holds);
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        let c = Comparison::new(&[1.0, 1.0], &[1.0, 1.0]);
        assert!(c.indistinguishable());
        assert!(!c.exceeds());
    }

    #[test]
    fn insufficient_data() {
        let rows = (0..3usize)
            .flat_map(|n| {
                (0..20u64).map(move |seed| ResultRow {
                    scenario: "aggregation".into(),
                    n,
                    seed,
                    metric: "m".into(),
                    value: 1.0.into(),
                })
            })
            .collect();
        let r = ExperimentResult::from_rows(rows);
        assert!(matches!(
            unimodality_check(&r, "m"),
            Err(ExperimentError::InsufficientData(_))
        ));
    }
}
