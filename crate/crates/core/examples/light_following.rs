//! Moves the light halfway through a run and checks that the swarm
//! regroups at the new position, compared with a lights-off control.
//!
//! ```text
//! cargo run --release --example light_following -- [N] [SEEDS]
//! ```

use swarmlink::arena::Vec2;
use swarmlink::config::{LightMove, ScenarioConfig};
use swarmlink::experiments::{run_aggregation_sweep, Comparison, SweepSpec};

const CONFIG: &str = include_str!("../configs/aggregation.toml");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(24);
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    let mut base = ScenarioConfig::from_toml(CONFIG)?;
    let to = Vec2::new(0.3, 0.7);
    base.run.relocate_light = Some(LightMove {
        tick: base.run.ticks / 2,
        to,
    });
    // score the swarm around the new light position, in both arms
    base.run.anchor = Some(to);
    println!(
        "light moves from {:?} to {:?} at tick {} of {}",
        base.lights[0].position,
        to,
        base.run.ticks / 2,
        base.run.ticks
    );

    let spec = SweepSpec::new(base, vec![n], (0..seeds).collect());
    let result = run_aggregation_sweep(&spec)?;
    let cmp = Comparison::new(
        &result.values("cluster_fraction", n),
        &result.values("control_cluster_fraction", n),
    );
    println!(
        "n = {n}: light {:.3} ± {:.3}, control {:.3} ± {:.3}",
        cmp.treatment.mean, cmp.treatment.se, cmp.control.mean, cmp.control.se
    );
    println!(
        "difference {:.3} vs pooled SE {:.3}: swarm followed the light: {}",
        cmp.difference,
        cmp.pooled_se,
        cmp.exceeds()
    );
    Ok(())
}
