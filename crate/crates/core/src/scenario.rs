//! Runs one configured scenario and derives its metrics.

use crate::arena::{Event, EventDetail, RobotId, Vec2, World};
use crate::config::{ConfigError, ProtocolConfig, ScenarioConfig};
use crate::graph::{build_graph, cluster_report, ClusterReport};
use crate::proto::feedback::{FeedbackEventKind, Role};
use crate::proto::street::street_metrics;
use crate::proto::{FeedbackState, ProtoState};
use crate::report::Value;

/// Outcome of the first request a scout made.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackOutcome {
    Teamed,
    ResumedSearch,
    /// Enough responders confirmed but the team had not assembled by the end.
    Waiting,
    /// The scout never made a request, or the deadline fell after the end.
    Pending,
}

impl FeedbackOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackOutcome::Teamed => "Teamed",
            FeedbackOutcome::ResumedSearch => "ResumedSearch",
            FeedbackOutcome::Waiting => "Waiting",
            FeedbackOutcome::Pending => "Pending",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub record_events: bool,
    pub cluster_snapshots: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            record_events: true,
            cluster_snapshots: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub protocol: &'static str,
    pub n: usize,
    pub seed: u64,
    pub metrics: Vec<(String, Value)>,
    pub events: Vec<Event>,
    pub clusters: Vec<(u64, ClusterReport)>,
    /// Why the protocol did not finish, if it did not.
    pub incomplete: Option<String>,
    pub world: World,
}

impl RunOutput {
    pub fn metric(&self, name: &str) -> Option<&Value> {
        self.metrics.iter().find(|(m, _)| m == name).map(|(_, v)| v)
    }
}

/// Size of the largest proximity-graph component that has a robot within
/// `radius` of `anchor`.
pub fn anchored_cluster_size(positions: &[Vec2], radius: f64, anchor: Vec2) -> usize {
    build_graph(positions, radius)
        .components()
        .into_iter()
        .filter(|c| c.iter().any(|&i| positions[i].distance(anchor) <= radius))
        .map(|c| c.len())
        .max()
        .unwrap_or(0)
}

fn largest_component(positions: &[Vec2], radius: f64) -> usize {
    build_graph(positions, radius)
        .components()
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput, ConfigError> {
    run_scenario_with(config, RunOptions::default())
}

pub fn run_scenario_with(
    config: &ScenarioConfig,
    options: RunOptions,
) -> Result<RunOutput, ConfigError> {
    let mut world = config.build_world()?;
    let is_street = matches!(config.protocol, ProtocolConfig::Street(_));
    let is_feedback = matches!(config.protocol, ProtocolConfig::Feedback(_));
    // street and feedback metrics are read back from the event log
    world.set_recording(
        options.record_events || is_street || is_feedback,
        options.record_events,
    );

    let n = config.robots.count;
    let ticks = config.run.ticks;
    let comm = config.arena.comm_radius;
    let prox = config.arena.proximity_radius;
    let initial_positions = world.positions();
    let anchor = |w: &World| {
        config
            .run
            .anchor
            .or_else(|| w.lights().first().map(|l| l.position))
    };

    let mut clusters = Vec::new();
    let snapshot = |w: &World, clusters: &mut Vec<(u64, ClusterReport)>| {
        clusters.push((w.clock(), cluster_report(&w.positions(), comm)));
    };
    if options.cluster_snapshots {
        snapshot(&world, &mut clusters);
    }

    let measure_from = ticks - ticks / 4;
    let mut anchored_sum = 0.0;
    let mut anchored_samples = 0u64;
    let mut max_group_late = 0usize;
    let aggregation = matches!(config.protocol, ProtocolConfig::Aggregation(_));

    for t in 0..ticks {
        if let Some(mv) = config.run.relocate_light {
            if mv.tick == t {
                for light in world.lights_mut() {
                    light.position = mv.to;
                }
            }
        }
        world.step();
        let clock = world.clock();
        if options.cluster_snapshots
            && config.run.cluster_interval > 0
            && clock % config.run.cluster_interval == 0
            && clock != ticks
        {
            snapshot(&world, &mut clusters);
        }
        if aggregation && clock > measure_from {
            let positions = world.positions();
            if let Some(a) = anchor(&world) {
                anchored_sum += anchored_cluster_size(&positions, prox, a) as f64;
                anchored_samples += 1;
            }
            max_group_late = max_group_late.max(largest_component(&positions, prox));
        }
    }
    if options.cluster_snapshots {
        snapshot(&world, &mut clusters);
    }

    let mut metrics: Vec<(String, Value)> = Vec::new();
    let mut put = |name: &str, v: Value| metrics.push((name.to_string(), v));
    let mut incomplete = None;
    let final_positions = world.positions();

    if aggregation && config.run.wants("aggregation") {
        if anchored_samples > 0 {
            let mean = anchored_sum / anchored_samples as f64;
            put("cluster_size", mean.into());
            put("cluster_fraction", (mean / n as f64).into());
        }
        put("max_group_late", max_group_late.into());
        put(
            "largest_group_final",
            largest_component(&final_positions, prox).into(),
        );
    }

    if let ProtocolConfig::Street(_) = &config.protocol {
        if config.run.wants("street") {
            match street_metrics(world.events()) {
                Ok(m) => {
                    put("build_rounds", m.build_rounds.into());
                    if let Some(p) = m.propagation_rounds {
                        put("propagation_rounds", p.into());
                    }
                    if let Some(ok) = m.ok_rounds {
                        put("ok_rounds", ok.into());
                    }
                    put("street_length", m.street_length.into());
                    put("terminus", (m.terminus.index()).into());
                    let graph = build_graph(&initial_positions, comm);
                    let hops = graph
                        .bfs_distances(m.origin.index())
                        .ok()
                        .and_then(|d| d[m.terminus.index()]);
                    if let Some(h) = hops {
                        put("bfs_distance", h.into());
                        // the hop-distance oracle only applies when nothing moves
                        if config.arena.speed == 0.0 {
                            put("oracle_match", ((h as u64 == m.build_rounds) as u64).into());
                        }
                    }
                    if m.ok_rounds.is_none() {
                        incomplete = Some("Ok confirmation never reached the origin".to_string());
                    }
                }
                Err(e) => {
                    put("failure", Value::Text(e.to_string()));
                    incomplete = Some(e.to_string());
                }
            }
        }
    }

    if let ProtocolConfig::Feedback(params) = &config.protocol {
        if config.run.wants("feedback") {
            let scout = params.scout;
            let summary = feedback_summary(world.events(), scout);
            put("outcome", Value::Text(summary.outcome.as_str().to_string()));
            put("responders_confirmed", summary.responders.into());
            if let Some(l) = summary.latency {
                put("feedback_latency_rounds", l.into());
            }
            let graph = build_graph(&initial_positions, comm);
            let dist = graph.bfs_distances(scout.index()).expect("scout exists");
            let reachable_capable = world
                .robots()
                .iter()
                .filter(|r| r.id != scout && r.capabilities.contains(&params.capability))
                .filter(|r| dist[r.id.index()].is_some())
                .count();
            put("reachable_capable", reachable_capable.into());
            put(
                "scout_eccentricity",
                graph
                    .eccentricity(scout.index())
                    .expect("scout exists")
                    .into(),
            );
            let dropped: u32 = world
                .robots()
                .iter()
                .filter_map(|r| match &r.proto {
                    ProtoState::Feedback(FeedbackState::Peer(p)) => Some(p.dropped),
                    _ => None,
                })
                .sum();
            put("feedback_dropped", (dropped as u64).into());
            if matches!(
                summary.outcome,
                FeedbackOutcome::Waiting | FeedbackOutcome::Pending
            ) {
                incomplete = Some(format!(
                    "scout ended the run in state {}",
                    summary.outcome.as_str()
                ));
            }
        }
    }

    if config.run.wants("degree") {
        let g = build_graph(&final_positions, comm);
        put("mean_degree_final", g.mean_degree().into());
        put("components_final", g.components().len().into());
    }

    let events = if options.record_events {
        world.events().to_vec()
    } else {
        Vec::new()
    };
    Ok(RunOutput {
        protocol: config.protocol.name(),
        n,
        seed: config.arena.seed,
        metrics,
        events,
        clusters,
        incomplete,
        world,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeedbackSummary {
    pub outcome: FeedbackOutcome,
    pub responders: usize,
    /// Ticks from the first request to the last feedback the scout received
    /// before deciding.
    pub latency: Option<u64>,
}

/// Reads the first request cycle of `scout` from the event log.
pub fn feedback_summary(events: &[Event], scout: RobotId) -> FeedbackSummary {
    let mine = events.iter().filter_map(|e| match e.detail {
        EventDetail::Feedback(f) if e.robot == scout && f.role == Role::Scout => {
            Some((e.tick, f.kind))
        }
        _ => None,
    });
    let mut request = None;
    let mut responders = 0;
    let mut last_feedback = None;
    let mut outcome = FeedbackOutcome::Pending;
    for (tick, kind) in mine {
        match kind {
            FeedbackEventKind::Request if request.is_none() => request = Some(tick),
            FeedbackEventKind::FeedbackReceived if outcome == FeedbackOutcome::Pending => {
                responders += 1;
                last_feedback = Some(tick);
            }
            FeedbackEventKind::Waiting if outcome == FeedbackOutcome::Pending => {
                outcome = FeedbackOutcome::Waiting
            }
            FeedbackEventKind::ResumeSearch if outcome == FeedbackOutcome::Pending => {
                outcome = FeedbackOutcome::ResumedSearch
            }
            FeedbackEventKind::Teamed if outcome == FeedbackOutcome::Waiting => {
                outcome = FeedbackOutcome::Teamed
            }
            _ => {}
        }
    }
    FeedbackSummary {
        outcome,
        responders,
        latency: request.zip(last_feedback).map(|(r, f)| f - r),
    }
}
