//! Splits a random swarm into communication components and labels them:
//! the main body, detached groups big enough to work on their own, and
//! lost robots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmlink::arena::Vec2;
use swarmlink::graph::{build_graph, cluster_report};

fn main() {
    let radius = 0.15;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [6, 12, 24, 48] {
        let positions: Vec<Vec2> = (0..n)
            .map(|_| Vec2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
            .collect();
        let graph = build_graph(&positions, radius);
        let report = cluster_report(&positions, radius);
        println!("n = {n}, mean degree {:.2}", graph.mean_degree());
        for (part, label) in report.iter() {
            println!("  {label:<15} {:>2} robots {part:?}", part.len());
        }
    }
}
