use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sense_light, ArenaConfig, ArenaError, LightSource, Motion, Pose, RobotId, Vec2};
use crate::proto::feedback::{
    peer_step, scout_step, FeedbackEvent, PeerContext, RelayState, ScoutContext, ScoutMode,
};
use crate::proto::local::{local_step, LocalState};
use crate::proto::street::{street_step, StreetContext, StreetEvent};
use crate::proto::{Capability, Controller, Envelope, FeedbackState, Outgoing, ProtoState};

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub id: RobotId,
    pub pose: Pose,
    pub capabilities: BTreeSet<Capability>,
    pub proto: ProtoState,
    pub inbox: Vec<Envelope>,
}

impl RobotState {
    pub fn new(id: RobotId, pose: Pose, proto: ProtoState) -> Self {
        RobotState {
            id,
            pose,
            capabilities: BTreeSet::new(),
            proto,
            inbox: Vec::new(),
        }
    }

    pub fn with_capability(mut self, capability: Capability) -> Self {
        self.capabilities.insert(capability);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDetail {
    Local { kind: &'static str, value: u32 },
    Street(StreetEvent),
    Feedback(FeedbackEvent),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub tick: u64,
    pub robot: RobotId,
    pub detail: EventDetail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub tick: u64,
    pub from: RobotId,
    pub to: RobotId,
    pub distance: f64,
}

/// What a robot's protocol gets to see this tick, computed from the state at
/// the start of the tick.
enum Percept {
    Idle,
    Local {
        encounter: bool,
        intensity: f64,
    },
    Street {
        near_landmark: bool,
        origins: Vec<RobotId>,
    },
    Scout {
        found_object: bool,
        team_assembled: bool,
    },
    Peer {
        engage_target: Option<Vec2>,
        at_scout: bool,
    },
}

#[derive(Debug, Clone)]
pub struct World {
    config: ArenaConfig,
    controller: Controller,
    robots: Vec<RobotState>,
    lights: Vec<LightSource>,
    landmarks: Vec<Vec2>,
    clock: u64,
    rng: ChaCha8Rng,
    events: Vec<Event>,
    deliveries: Vec<Delivery>,
    lost_messages: u64,
    record_events: bool,
    record_deliveries: bool,
}

impl World {
    pub fn new(
        config: ArenaConfig,
        controller: Controller,
        mut robots: Vec<RobotState>,
        lights: Vec<LightSource>,
        landmarks: Vec<Vec2>,
    ) -> Result<Self, ArenaError> {
        config.validate()?;
        robots.sort_by_key(|r| r.id);
        for pair in robots.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ArenaError::DuplicateRobot(pair[0].id));
            }
        }
        for r in &robots {
            if !r.pose.position.is_finite() || !config.contains(r.pose.position) {
                return Err(ArenaError::OutOfBounds(r.id));
            }
        }
        Ok(World {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            controller,
            robots,
            lights,
            landmarks,
            clock: 0,
            events: Vec::new(),
            deliveries: Vec::new(),
            lost_messages: 0,
            record_events: true,
            record_deliveries: true,
        })
    }

    /// Turns event and delivery logging on or off. Sweeps only need metrics.
    pub fn set_recording(&mut self, events: bool, deliveries: bool) {
        self.record_events = events;
        self.record_deliveries = deliveries;
    }

    pub fn config(&self) -> &ArenaConfig {
        &self.config
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn robots_mut(&mut self) -> &mut [RobotState] {
        &mut self.robots
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.robots.iter().map(|r| r.pose.position).collect()
    }

    pub fn lights(&self) -> &[LightSource] {
        &self.lights
    }

    pub fn lights_mut(&mut self) -> &mut Vec<LightSource> {
        &mut self.lights
    }

    pub fn landmarks(&self) -> &[Vec2] {
        &self.landmarks
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn deliveries(&self) -> &[Delivery] {
        &self.deliveries
    }

    /// Unicasts that could not be delivered because the receiver was out of
    /// range or unknown.
    pub fn lost_messages(&self) -> u64 {
        self.lost_messages
    }

    fn index_of(&self, id: RobotId) -> Result<usize, ArenaError> {
        self.robots
            .binary_search_by_key(&id, |r| r.id)
            .map_err(|_| ArenaError::UnknownRobot(id))
    }

    pub fn robot(&self, id: RobotId) -> Result<&RobotState, ArenaError> {
        self.index_of(id).map(|i| &self.robots[i])
    }

    /// Other robots within `radius` (closed ball), in id order.
    pub fn neighbors(&self, id: RobotId, radius: f64) -> Result<Vec<RobotId>, ArenaError> {
        // also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(radius > 0.0) {
            return Err(ArenaError::Radius(radius));
        }
        let me = self.robot(id)?.pose.position;
        Ok(self
            .robots
            .iter()
            .filter(|r| r.id != id && r.pose.position.distance(me) <= radius)
            .map(|r| r.id)
            .collect())
    }

    pub fn sense_light(&self, id: RobotId) -> Result<f64, ArenaError> {
        Ok(sense_light(self.robot(id)?.pose.position, &self.lights))
    }

    pub fn run(&mut self, ticks: u64) {
        for _ in 0..ticks {
            self.step();
        }
    }

    fn perceive(&self, positions: &[Vec2]) -> Vec<Percept> {
        let cfg = &self.config;
        let within = |i: usize, radius: f64| {
            let p = positions[i];
            (0..positions.len()).filter(move |&j| j != i && positions[j].distance(p) <= radius)
        };
        let near_landmark = |p: Vec2| {
            self.landmarks
                .iter()
                .any(|l| l.distance(p) <= cfg.proximity_radius)
        };
        self.robots
            .iter()
            .enumerate()
            .map(|(i, robot)| match (&self.controller, &robot.proto) {
                (Controller::Local(_), ProtoState::Local(_)) => Percept::Local {
                    encounter: within(i, cfg.proximity_radius).next().is_some(),
                    intensity: sense_light(positions[i], &self.lights),
                },
                (Controller::Street(_), ProtoState::Street(_)) => {
                    let mut origins: Vec<RobotId> = within(i, cfg.comm_radius)
                        .filter_map(|j| match &self.robots[j].proto {
                            ProtoState::Street(s) => s.street_origin(self.robots[j].id),
                            _ => None,
                        })
                        .collect();
                    origins.sort();
                    origins.dedup();
                    Percept::Street {
                        near_landmark: near_landmark(positions[i]),
                        origins,
                    }
                }
                (Controller::Feedback(_), ProtoState::Feedback(FeedbackState::Scout(s))) => {
                    let team_assembled = match &s.mode {
                        ScoutMode::Waiting { responders } => responders.iter().all(|r| {
                            self.index_of(*r)
                                .map(|j| {
                                    positions[j].distance(positions[i]) <= cfg.proximity_radius
                                })
                                .unwrap_or(false)
                        }),
                        _ => false,
                    };
                    Percept::Scout {
                        found_object: near_landmark(positions[i]),
                        team_assembled,
                    }
                }
                (Controller::Feedback(_), ProtoState::Feedback(FeedbackState::Peer(p))) => {
                    self.peer_percept(i, p, positions)
                }
                _ => Percept::Idle,
            })
            .collect()
    }

    fn peer_percept(&self, i: usize, state: &RelayState, positions: &[Vec2]) -> Percept {
        let Some(scout) = state.engaged else {
            return Percept::Peer {
                engage_target: None,
                at_scout: false,
            };
        };
        let me = positions[i];
        let Ok(scout_idx) = self.index_of(scout) else {
            return Percept::Peer {
                engage_target: None,
                at_scout: false,
            };
        };
        // walk the reverse path toward the scout
        let mut chain = Vec::new();
        let mut next = state.reverse_hop.get(&scout).copied();
        while let Some(hop) = next {
            let Ok(j) = self.index_of(hop) else { break };
            if chain.contains(&j) || chain.len() > self.robots.len() {
                break;
            }
            chain.push(j);
            if hop == scout {
                break;
            }
            next = match &self.robots[j].proto {
                ProtoState::Feedback(FeedbackState::Peer(p)) => p.reverse_hop.get(&scout).copied(),
                _ => None,
            };
        }
        // Head for the hop closest to the scout that is still in radio range.
        // Once on it, or already past it, keep going to the following hop
        // even out of range: the relay there may itself have left to join
        // the team, leaving a gap in the path.
        let reached = 0.5 * self.config.proximity_radius;
        let engage_target = chain
            .iter()
            .rposition(|&j| positions[j].distance(me) <= self.config.comm_radius)
            .map(|k| match chain.get(k + 1) {
                Some(&after)
                    if positions[chain[k]].distance(me) <= reached
                        || positions[after].distance(me)
                            < positions[after].distance(positions[chain[k]]) =>
                {
                    after
                }
                _ => chain[k],
            })
            .or(chain.first().copied())
            .map(|j| positions[j]);
        Percept::Peer {
            engage_target,
            at_scout: positions[scout_idx].distance(me) <= 0.5 * self.config.proximity_radius,
        }
    }

    /// Advances the world by one tick: protocols consume their inboxes, motion
    /// is integrated with odometry noise, positions are kept in the arena and
    /// outgoing messages are delivered within communication range.
    pub fn step(&mut self) {
        let now = self.clock;
        let positions = self.positions();
        let percepts = self.perceive(&positions);
        let step_length = self.config.step_length();
        let controller = self.controller.clone();

        let mut motions = vec![Motion::STOP; self.robots.len()];
        let mut outbox: Vec<(usize, Outgoing)> = Vec::new();
        let mut new_events: Vec<(RobotId, EventDetail)> = Vec::new();

        for (i, percept) in percepts.into_iter().enumerate() {
            let robot = &mut self.robots[i];
            let inbox = std::mem::take(&mut robot.inbox);
            let id = robot.id;
            match (&controller, &mut robot.proto, percept) {
                (
                    Controller::Local(params),
                    ProtoState::Local(state),
                    Percept::Local {
                        encounter,
                        intensity,
                    },
                ) => {
                    let (next, motion) =
                        local_step(*state, params, encounter, intensity, &mut self.rng);
                    let change = match (*state, next) {
                        (LocalState::Wandering, LocalState::Waiting { remaining }) => {
                            Some(("wait", remaining))
                        }
                        (
                            LocalState::Wandering | LocalState::Waiting { .. },
                            LocalState::Avoiding { remaining },
                        ) => Some(("avoid", remaining)),
                        (LocalState::Avoiding { .. }, LocalState::Wandering) => Some(("resume", 0)),
                        _ => None,
                    };
                    if let Some((kind, value)) = change {
                        new_events.push((id, EventDetail::Local { kind, value }));
                    }
                    *state = next;
                    motions[i] = motion;
                }
                (
                    Controller::Street(params),
                    ProtoState::Street(state),
                    Percept::Street {
                        near_landmark,
                        origins,
                    },
                ) => {
                    let ctx = StreetContext {
                        id,
                        now,
                        pose: robot.pose,
                        step_length,
                        near_landmark,
                        nearby_street_origins: &origins,
                    };
                    let out = street_step(state, params, &inbox, &ctx, &mut self.rng);
                    *state = out.state;
                    motions[i] = out.motion;
                    outbox.extend(out.outgoing.into_iter().map(|o| (i, o)));
                    new_events.extend(out.events.into_iter().map(|e| (id, EventDetail::Street(e))));
                }
                (
                    Controller::Feedback(params),
                    ProtoState::Feedback(FeedbackState::Scout(state)),
                    Percept::Scout {
                        found_object,
                        team_assembled,
                    },
                ) => {
                    let ctx = ScoutContext {
                        id,
                        now,
                        step_length,
                        found_object,
                        team_assembled,
                    };
                    let out = scout_step(state, params, &inbox, &ctx, &mut self.rng);
                    *state = out.state;
                    motions[i] = out.motion;
                    outbox.extend(out.outgoing.into_iter().map(|o| (i, o)));
                    new_events.extend(
                        out.events
                            .into_iter()
                            .map(|e| (id, EventDetail::Feedback(e))),
                    );
                }
                (
                    Controller::Feedback(params),
                    ProtoState::Feedback(FeedbackState::Peer(state)),
                    Percept::Peer {
                        engage_target,
                        at_scout,
                    },
                ) => {
                    let ctx = PeerContext {
                        id,
                        pose: robot.pose,
                        step_length,
                        engage_target,
                        at_scout,
                    };
                    let out = peer_step(
                        state,
                        params,
                        &robot.capabilities,
                        &inbox,
                        &ctx,
                        &mut self.rng,
                    );
                    *state = out.state;
                    motions[i] = out.motion;
                    outbox.extend(out.outgoing.into_iter().map(|o| (i, o)));
                    new_events.extend(
                        out.events
                            .into_iter()
                            .map(|e| (id, EventDetail::Feedback(e))),
                    );
                }
                _ => {}
            }
        }

        for (i, motion) in motions.into_iter().enumerate() {
            self.integrate(i, motion);
        }

        self.deliver(now, outbox);

        if self.record_events {
            self.events
                .extend(new_events.into_iter().map(|(robot, detail)| Event {
                    tick: now,
                    robot,
                    detail,
                }));
        }
        self.clock += 1;
    }

    fn integrate(&mut self, i: usize, motion: Motion) {
        let cfg = self.config;
        // two draws per robot per tick keep the stream aligned across runs
        let u_dist: f64 = self.rng.random_range(-1.0..=1.0);
        let u_rot: f64 = self.rng.random_range(-1.0..=1.0);

        let pose = self.robots[i].pose;
        let mut heading = pose.heading() + motion.turn * (1.0 + u_rot * cfg.rot_noise_frac);
        let distance = motion.forward * cfg.step_length() * (1.0 + u_dist * cfg.dist_noise_frac);
        let mut p = pose.position + Vec2::from_angle(heading) * distance;

        if cfg.body_radius > 0.0 && distance > 0.0 {
            let contact = 2.0 * cfg.body_radius;
            let blocked = self.robots.iter().enumerate().any(|(j, other)| {
                let q = other.pose.position;
                j != i && q.distance(p) < contact && q.distance(p) < q.distance(pose.position)
            });
            if blocked {
                p = pose.position;
            }
        }

        if p.x < 0.0 {
            p.x = 0.0;
            heading = PI - heading;
        } else if p.x > cfg.width {
            p.x = cfg.width;
            heading = PI - heading;
        }
        if p.y < 0.0 {
            p.y = 0.0;
            heading = -heading;
        } else if p.y > cfg.height {
            p.y = cfg.height;
            heading = -heading;
        }
        self.robots[i].pose = Pose::new(p, heading);
    }

    fn deliver(&mut self, now: u64, outbox: Vec<(usize, Outgoing)>) {
        let radius = self.config.comm_radius;
        for (sender, out) in outbox {
            let from = self.robots[sender].id;
            let origin = self.robots[sender].pose.position;
            let targets: Vec<usize> = match out.to {
                Some(to) => match self.index_of(to) {
                    Ok(j)
                        if j != sender
                            && self.robots[j].pose.position.distance(origin) <= radius =>
                    {
                        vec![j]
                    }
                    _ => {
                        self.lost_messages += 1;
                        Vec::new()
                    }
                },
                None => (0..self.robots.len())
                    .filter(|&j| {
                        j != sender && self.robots[j].pose.position.distance(origin) <= radius
                    })
                    .collect(),
            };
            for j in targets {
                let receiver = &mut self.robots[j];
                if self.record_deliveries {
                    self.deliveries.push(Delivery {
                        tick: now,
                        from,
                        to: receiver.id,
                        distance: receiver.pose.position.distance(origin),
                    });
                }
                receiver.inbox.push(Envelope {
                    from,
                    to: out.to,
                    sent_from: origin,
                    msg: out.msg.clone(),
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proto::street::{StreetMsg, StreetParams, StreetState};
    use crate::proto::Message;

    fn id(i: u8) -> RobotId {
        RobotId::new(i).unwrap()
    }

    fn idle_world(config: ArenaConfig, poses: &[(f64, f64, f64)]) -> World {
        let robots = poses
            .iter()
            .enumerate()
            .map(|(i, &(x, y, h))| {
                RobotState::new(id(i as u8), Pose::new(Vec2::new(x, y), h), ProtoState::Idle)
            })
            .collect();
        World::new(config, Controller::Idle, robots, Vec::new(), Vec::new()).unwrap()
    }

    #[test]
    fn idle_robot_stays_put() {
        let mut w = idle_world(ArenaConfig::default(), &[(0.5, 0.5, 1.0)]);
        w.step();
        assert_eq!(w.clock(), 1);
        assert_eq!(w.robots()[0].pose, Pose::new(Vec2::new(0.5, 0.5), 1.0));
    }

    #[test]
    fn neighbors_examples() {
        let cfg = ArenaConfig::default();
        let w = idle_world(cfg, &[(0.5, 0.5, 0.0)]);
        assert!(w.neighbors(id(0), 0.1).unwrap().is_empty());

        // exactly at the radius counts; binary fractions keep the sum exact
        let r = 0.125;
        let w = idle_world(cfg, &[(0.25, 0.5, 0.0), (0.25 + r, 0.5, 0.0)]);
        assert_eq!(w.neighbors(id(0), r).unwrap(), vec![id(1)]);
        assert_eq!(w.neighbors(id(1), r).unwrap(), vec![id(0)]);

        let w = idle_world(
            cfg,
            &[
                (0.2, 0.5, 0.0),
                (0.2 + 0.9 * r, 0.5, 0.0),
                (0.2 + 1.8 * r, 0.5, 0.0),
            ],
        );
        assert_eq!(w.neighbors(id(1), r).unwrap().len(), 2);
        assert_eq!(w.neighbors(id(0), r).unwrap().len(), 1);
        assert_eq!(w.neighbors(id(2), r).unwrap().len(), 1);

        assert!(matches!(
            w.neighbors(id(9), r),
            Err(ArenaError::UnknownRobot(_))
        ));
        assert!(w.neighbors(id(0), 0.0).is_err());
    }

    #[test]
    fn rejects_bad_construction() {
        let cfg = ArenaConfig::default();
        let robots = vec![
            RobotState::new(id(1), Pose::new(Vec2::new(0.1, 0.1), 0.0), ProtoState::Idle),
            RobotState::new(id(1), Pose::new(Vec2::new(0.2, 0.1), 0.0), ProtoState::Idle),
        ];
        assert!(matches!(
            World::new(cfg, Controller::Idle, robots, vec![], vec![]),
            Err(ArenaError::DuplicateRobot(_))
        ));
        let robots = vec![RobotState::new(
            id(0),
            Pose::new(Vec2::new(2.0, 0.1), 0.0),
            ProtoState::Idle,
        )];
        assert!(matches!(
            World::new(cfg, Controller::Idle, robots, vec![], vec![]),
            Err(ArenaError::OutOfBounds(_))
        ));
    }

    #[test]
    fn broadcast_arrives_next_tick_in_range_only() {
        let cfg = ArenaConfig::default().noiseless();
        let r = cfg.comm_radius;
        let params = StreetParams {
            nav_ping_period: 0,
            ..StreetParams::default()
        };
        let robots = vec![
            RobotState::new(
                id(0),
                Pose::new(Vec2::new(0.2, 0.5), 0.0),
                ProtoState::Street(StreetState::origin()),
            ),
            RobotState::new(
                id(1),
                Pose::new(Vec2::new(0.2 + 0.5 * r, 0.5), 0.0),
                ProtoState::Street(StreetState::free()),
            ),
            RobotState::new(
                id(2),
                Pose::new(Vec2::new(0.2 + 1.2 * r, 0.5), 0.0),
                ProtoState::Street(StreetState::free()),
            ),
        ];
        let mut cfg0 = cfg;
        cfg0.speed = 0.0;
        let mut w = World::new(cfg0, Controller::Street(params), robots, vec![], vec![]).unwrap();
        w.step();
        let inbox = &w.robots()[1].inbox;
        assert_eq!(inbox.len(), 1);
        assert!(matches!(
            inbox[0].msg,
            Message::Street(StreetMsg::BuildStreet { n: 0, .. })
        ));
        assert!(w.robots()[2].inbox.is_empty());
        assert!(w.deliveries().iter().all(|d| d.distance <= r));
    }

    #[test]
    fn wall_contact_clamps_and_reflects() {
        let mut cfg = ArenaConfig::default().noiseless();
        cfg.speed = 1.0;
        cfg.dt = 0.1;
        let mut w = idle_world(cfg, &[(0.95, 0.5, 0.0)]);
        w.integrate(0, Motion::drive(0.0, 1.0));
        let pose = w.robots()[0].pose;
        assert_eq!(pose.position.x, 1.0);
        assert!((pose.heading() - PI).abs() < 1e-12);
    }
}
