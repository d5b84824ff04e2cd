//! Builds a communication street along a chain of robots, then reports
//! build and propagation latencies in ticks against the hop distance.

use swarmlink::config::ScenarioConfig;
use swarmlink::scenario::run_scenario;

const CONFIG: &str = include_str!("../configs/street6.toml");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = ScenarioConfig::from_toml(CONFIG)?;
    println!(
        "{:>3}  {:>6}  {:>5}  {:>11}  {:>3}  {:>6}",
        "n", "build", "hops", "propagation", "ok", "length"
    );
    for n in [2, 4, 6, 10, 15] {
        let mut cfg = base.clone().with_count(n);
        // stretch the arena so the whole chain fits
        cfg.arena.width = cfg.arena.width.max(n as f64 * 0.9 * cfg.arena.comm_radius);
        let run = run_scenario(&cfg)?;
        let get = |m: &str| {
            run.metric(m)
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "{n:>3}  {:>6}  {:>5}  {:>11}  {:>3}  {:>6}",
            get("build_rounds"),
            get("bfs_distance"),
            get("propagation_rounds"),
            get("ok_rounds"),
            get("street_length")
        );
        if let Some(reason) = &run.incomplete {
            println!("     incomplete: {reason}");
        }
    }
    Ok(())
}
