//! A scout asks the swarm for two more robots with a color sensor. The same
//! topology is run with different numbers of capable robots.

use swarmlink::arena::RobotId;
use swarmlink::config::ScenarioConfig;
use swarmlink::scenario::run_scenario;

const CONFIG: &str = include_str!("../configs/feedback.toml");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = ScenarioConfig::from_toml(CONFIG)?;
    for capable in [vec![3, 5], vec![5], vec![]] {
        let mut cfg = base.clone();
        cfg.robots.capabilities[0].ids = Some(
            std::iter::once(0)
                .chain(capable.iter().copied())
                .map(RobotId::new)
                .collect::<Result<_, _>>()?,
        );
        let run = run_scenario(&cfg)?;
        let get = |m: &str| {
            run.metric(m)
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "capable peers {capable:?}: outcome {}, responders {}, latency {} (eccentricity {})",
            get("outcome"),
            get("responders_confirmed"),
            get("feedback_latency_rounds"),
            get("scout_eccentricity")
        );
    }
    Ok(())
}
