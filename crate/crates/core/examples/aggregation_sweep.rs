//! Density sweep of light-guided aggregation against a lights-off control.
//!
//! ```text
//! cargo run --release --example aggregation_sweep -- [CONFIG] [SEEDS]
//! ```

use std::path::PathBuf;
use std::time::Instant;

use swarmlink::config::ScenarioConfig;
use swarmlink::experiments::{
    run_aggregation_sweep, unimodality_check, Comparison, Summary, SweepSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/configs/aggregation.toml"
        ))
    });
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    let base = ScenarioConfig::load(&path)?;
    let spec = SweepSpec::new(base, vec![3, 6, 12, 24, 48], (0..seeds).collect());
    let started = Instant::now();
    let result = run_aggregation_sweep(&spec)?;

    println!("{:>4}  {:>16}  {:>16}", "n", "light", "control");
    for &n in &spec.n_values {
        let light = Summary::of(&result.values("cluster_fraction", n));
        let control = Summary::of(&result.values("control_cluster_fraction", n));
        println!(
            "{n:>4}  {:>7.3} ± {:<6.3}  {:>7.3} ± {:<6.3}",
            light.mean, light.se, control.mean, control.se
        );
    }
    let n0 = spec.n_values[0];
    let low = Comparison::new(
        &result.values("cluster_fraction", n0),
        &result.values("control_cluster_fraction", n0),
    );
    println!(
        "n = {n0}: difference {:.4}, pooled SE {:.4}, indistinguishable from control: {}",
        low.difference,
        low.pooled_se,
        low.indistinguishable()
    );
    let shape = unimodality_check(&result, "cluster_fraction")?;
    println!(
        "unimodal: {} (peak at n = {}){}",
        shape.holds,
        spec.n_values[shape.peak],
        shape.reason.map(|r| format!(" — {r}")).unwrap_or_default()
    );
    println!(
        "{} failures, {:.1}s",
        result.failures().count(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}
