//! Scout request / feedback / engage cycles on fixed topologies.

use proptest::prelude::*;
use swarmlink::arena::{RobotId, Vec2};
use swarmlink::config::ScenarioConfig;
use swarmlink::graph::{build_graph, cluster_report, ClusterLabel};
use swarmlink::proto::feedback::{FeedbackEventKind, Role, ScoutMode};
use swarmlink::proto::{FeedbackState, ProtoState};
use swarmlink::scenario::{feedback_summary, run_scenario, FeedbackOutcome};

const COMM: f64 = 0.15;

fn scenario(positions: &[(f64, f64)], capable: &[u8], ticks: u64) -> ScenarioConfig {
    let pos: Vec<String> = positions
        .iter()
        .map(|(x, y)| format!("[{x}, {y}]"))
        .collect();
    let ids: Vec<String> = capable.iter().map(u8::to_string).collect();
    let (sx, sy) = positions[0];
    let text = format!(
        r#"
[arena]
comm_radius = {COMM}
proximity_radius = 0.04
speed = 0.05
seed = 8

[robots]
count = {}
placement = "explicit"
positions = [{}]

[[robots.capabilities]]
tag = "color_sensor"
ids = [{}]

[landmarks]
positions = [[{sx}, {sy}]]

[protocol]
name = "feedback"
scout = 0
request_timeout = 30

[run]
ticks = {ticks}
"#,
        positions.len(),
        pos.join(", "),
        ids.join(", ")
    );
    ScenarioConfig::from_toml(&text).unwrap()
}

// scout at the left end of a 5-robot line, plus a far-off pair
const LINE: [(f64, f64); 7] = [
    (0.1, 0.5),
    (0.23, 0.5),
    (0.36, 0.5),
    (0.49, 0.5),
    (0.62, 0.5),
    (0.9, 0.1),
    (0.9, 0.2),
];

fn outcome(capable: &[u8]) -> (FeedbackOutcome, usize, Option<u64>) {
    let run = run_scenario(&scenario(&LINE, capable, 400)).unwrap();
    let s = feedback_summary(&run.events, RobotId::new(0).unwrap());
    (s.outcome, s.responders, s.latency)
}

#[test]
fn two_reachable_responders_form_a_team() {
    let (o, r, latency) = outcome(&[2, 4]);
    assert_eq!((o, r), (FeedbackOutcome::Teamed, 2));
    // robot 4 is four hops out: request out, feedback back
    assert_eq!(latency, Some(8));
}

#[test]
fn one_responder_is_not_enough() {
    assert_eq!(outcome(&[3]).0, FeedbackOutcome::ResumedSearch);
    assert_eq!(outcome(&[3]).1, 1);
}

#[test]
fn nobody_capable() {
    let (o, r, latency) = outcome(&[]);
    assert_eq!((o, r, latency), (FeedbackOutcome::ResumedSearch, 0, None));
}

#[test]
fn capable_robots_cut_off_from_the_scout() {
    let report = cluster_report(&LINE.map(|(x, y)| Vec2::new(x, y)), COMM);
    assert_eq!(report.label_of(5), Some(ClusterLabel::Lost));
    assert_eq!(report.label_of(6), Some(ClusterLabel::Lost));
    assert_eq!(outcome(&[5, 6]).0, FeedbackOutcome::ResumedSearch);
    assert_eq!(outcome(&[5, 6]).1, 0);
}

#[test]
fn scout_searches_again_right_after_the_deadline() {
    let cfg = scenario(&LINE, &[], 200);
    let run = run_scenario(&cfg).unwrap();
    let scout = RobotId::new(0).unwrap();
    let ticks: Vec<(u64, FeedbackEventKind)> = run
        .events
        .iter()
        .filter(|e| e.robot == scout)
        .filter_map(|e| match e.detail {
            swarmlink::arena::EventDetail::Feedback(f) if f.role == Role::Scout => {
                Some((e.tick, f.kind))
            }
            _ => None,
        })
        .collect();
    let request = ticks
        .iter()
        .find(|(_, k)| *k == FeedbackEventKind::Request)
        .unwrap()
        .0;
    let resume = ticks
        .iter()
        .find(|(_, k)| *k == FeedbackEventKind::ResumeSearch)
        .unwrap()
        .0;
    assert!(
        resume - request <= 30 + 1,
        "request at {request}, resumed at {resume}"
    );
}

#[test]
fn engaged_responders_end_next_to_the_scout() {
    let run = run_scenario(&scenario(&LINE, &[2, 4], 400)).unwrap();
    let p = run.world.positions();
    for r in [2, 4] {
        assert!(p[r].distance(p[0]) <= 0.04, "robot {r} at {:?}", p[r]);
    }
    let ProtoState::Feedback(FeedbackState::Scout(s)) = &run.world.robots()[0].proto else {
        panic!("robot 0 is the scout");
    };
    assert!(matches!(s.mode, ScoutMode::Teamed { .. }));
}

fn layout() -> impl Strategy<Value = (Vec<(f64, f64)>, Vec<u8>)> {
    (3usize..14).prop_flat_map(|n| {
        (
            prop::collection::vec((0.05..0.95f64, 0.05..0.95f64), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(pos, caps)| {
                let ids = (1..pos.len() as u8).filter(|&i| caps[i as usize]).collect();
                (pos, ids)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Responses never exceed the capable robots the scout can reach; on a
    /// static topology all of them answer within twice the scout's
    /// eccentricity, and the threshold decides the outcome.
    #[test]
    fn feedback_conservation_and_latency((pos, capable) in layout()) {
        let cfg = scenario(&pos, &capable, 120);
        let points: Vec<Vec2> = pos.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        let graph = build_graph(&points, COMM);
        let dist = graph.bfs_distances(0).unwrap();
        let reachable = capable.iter().filter(|&&c| dist[c as usize].is_some()).count();
        let ecc = graph.eccentricity(0).unwrap() as u64;

        let run = run_scenario(&cfg).unwrap();
        let s = feedback_summary(&run.events, RobotId::new(0).unwrap());
        prop_assert!(s.responders <= reachable);
        // the timeout (30) covers every layout here: eccentricity <= 13
        prop_assert_eq!(s.responders, reachable);
        if let Some(l) = s.latency {
            prop_assert!(l <= 2 * ecc, "latency {} > 2 * {}", l, ecc);
        }
        let expected = if reachable >= 2 {
            [FeedbackOutcome::Teamed, FeedbackOutcome::Waiting]
        } else {
            [FeedbackOutcome::ResumedSearch; 2]
        };
        prop_assert!(expected.contains(&s.outcome), "{:?}", s.outcome);
    }
}
