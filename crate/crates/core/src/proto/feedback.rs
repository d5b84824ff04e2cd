//! Feedback connectivity: team building around a scout.
//!
//! A scout that finds an object floods a capability `Request`. Every other
//! robot relays the first copy it sees (duplicates are suppressed through a
//! [`RoutingLedger`]) and remembers the neighbor it came from. Robots with the
//! requested capability answer with a `Feedback` that travels back hop by hop
//! along those remembered neighbors. At its deadline the scout either has
//! enough responders, floods `Engage` and waits for them, or resumes
//! searching.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Capability, Envelope, Message, Outgoing};
use crate::arena::{Motion, Pose, RobotId, Vec2};
use crate::codec::{RoutingLedger, MAX_PKG_ID};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeedbackMsg {
    Request {
        capability: Capability,
        scout: RobotId,
        hop: u32,
        seq: u16,
    },
    Feedback {
        responder: RobotId,
        scout: RobotId,
    },
    Engage {
        scout: RobotId,
        responders: Vec<RobotId>,
        seq: u16,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedbackParams {
    pub scout: RobotId,
    pub capability: Capability,
    pub min_responders: u32,
    pub request_timeout: u32,
    /// Ticks a scout keeps searching before it may request again.
    pub retry_cooldown: u32,
    pub ledger_capacity: usize,
    /// Whether non-engaged peers random-walk. Off keeps the topology static.
    pub peer_wander: bool,
    pub wander_turn_prob: f64,
}

impl Default for FeedbackParams {
    fn default() -> Self {
        FeedbackParams {
            scout: RobotId::new(0).expect("0 is a valid id"),
            capability: Capability::ColorSensor,
            min_responders: 2,
            request_timeout: 40,
            retry_cooldown: 50,
            ledger_capacity: 64,
            peer_wander: false,
            wander_turn_prob: 0.05,
        }
    }
}

impl FeedbackParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_responders < 1 {
            return Err("min_responders must be at least 1".into());
        }
        if self.request_timeout < 1 {
            return Err("request_timeout must be at least 1".into());
        }
        if self.ledger_capacity < 1 {
            return Err("ledger_capacity must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.wander_turn_prob) {
            return Err("wander_turn_prob must lie in [0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScoutMode {
    Searching {
        cooldown: u32,
    },
    Requesting {
        started: u64,
        deadline: u64,
        responders: BTreeSet<RobotId>,
    },
    Waiting {
        responders: BTreeSet<RobotId>,
    },
    Teamed {
        responders: BTreeSet<RobotId>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoutState {
    pub mode: ScoutMode,
    /// Sequence number of the current or next request.
    pub seq: u16,
}

impl Default for ScoutState {
    fn default() -> Self {
        ScoutState {
            mode: ScoutMode::Searching { cooldown: 0 },
            seq: 0,
        }
    }
}

/// State of every non-scout robot: relay bookkeeping plus the responder's
/// engagement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelayState {
    pub seen: RoutingLedger,
    pub engage_seen: RoutingLedger,
    /// Neighbor each scout's request was first heard from.
    pub reverse_hop: BTreeMap<RobotId, RobotId>,
    /// Hop distance to each scout, from the first request copy.
    pub hops: BTreeMap<RobotId, u32>,
    pub responded: BTreeSet<RobotId>,
    pub engaged: Option<RobotId>,
    pub dropped: u32,
}

impl RelayState {
    pub fn new(ledger_capacity: usize) -> Self {
        RelayState {
            seen: RoutingLedger::new(ledger_capacity),
            engage_seen: RoutingLedger::new(ledger_capacity),
            reverse_hop: BTreeMap::new(),
            hops: BTreeMap::new(),
            responded: BTreeSet::new(),
            engaged: None,
            dropped: 0,
        }
    }
}

// one state per robot; boxing the scout would buy nothing
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeedbackState {
    Scout(ScoutState),
    Peer(RelayState),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Scout,
    Relay,
    Responder,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Scout => "scout",
            Role::Relay => "relay",
            Role::Responder => "responder",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeedbackEventKind {
    Request,
    RequestRelay,
    FeedbackSent,
    FeedbackForward,
    FeedbackDrop,
    FeedbackReceived,
    Waiting,
    EngageRelay,
    Engaged,
    Teamed,
    ResumeSearch,
}

impl FeedbackEventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackEventKind::Request => "request",
            FeedbackEventKind::RequestRelay => "request_relay",
            FeedbackEventKind::FeedbackSent => "feedback_sent",
            FeedbackEventKind::FeedbackForward => "feedback_forward",
            FeedbackEventKind::FeedbackDrop => "feedback_drop",
            FeedbackEventKind::FeedbackReceived => "feedback_received",
            FeedbackEventKind::Waiting => "waiting",
            FeedbackEventKind::EngageRelay => "engage_relay",
            FeedbackEventKind::Engaged => "engaged",
            FeedbackEventKind::Teamed => "teamed",
            FeedbackEventKind::ResumeSearch => "resume_search",
        }
    }
}

impl fmt::Display for FeedbackEventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeedbackEvent {
    pub role: Role,
    pub kind: FeedbackEventKind,
    pub scout: RobotId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackOutput<S> {
    pub state: S,
    pub outgoing: Vec<Outgoing>,
    pub motion: Motion,
    pub events: Vec<FeedbackEvent>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScoutContext {
    pub id: RobotId,
    pub now: u64,
    pub step_length: f64,
    pub found_object: bool,
    /// Every confirmed responder is within proximity range.
    pub team_assembled: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct PeerContext {
    pub id: RobotId,
    pub pose: Pose,
    pub step_length: f64,
    /// Where an engaged responder should head: the farthest robot along its
    /// reverse path that is still within communication range.
    pub engage_target: Option<Vec2>,
    /// The engaged responder has reached its scout.
    pub at_scout: bool,
}

fn ledger_key(seq: u16, scout: RobotId) -> (u16, u8) {
    (seq & MAX_PKG_ID, scout.get())
}

fn wander<R: Rng + ?Sized>(turn_prob: f64, rng: &mut R) -> Motion {
    let turn = if turn_prob > 0.0 && rng.random_bool(turn_prob) {
        rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI)
    } else {
        0.0
    };
    Motion::drive(turn, 1.0)
}

pub fn scout_step<R: Rng + ?Sized>(
    state: &ScoutState,
    params: &FeedbackParams,
    inbox: &[Envelope],
    ctx: &ScoutContext,
    rng: &mut R,
) -> FeedbackOutput<ScoutState> {
    let me = ctx.id;
    let mut s = state.clone();
    let mut outgoing = Vec::new();
    let mut events = Vec::new();
    let mut event = |kind| {
        events.push(FeedbackEvent {
            role: Role::Scout,
            kind,
            scout: me,
        })
    };
    let mut motion = Motion::STOP;

    let arrived: Vec<RobotId> = inbox
        .iter()
        .filter_map(|env| match &env.msg {
            Message::Feedback(FeedbackMsg::Feedback { responder, scout })
                if *scout == me && env.to == Some(me) =>
            {
                Some(*responder)
            }
            _ => None,
        })
        .collect();

    s.mode = match s.mode {
        ScoutMode::Searching { cooldown } if cooldown > 0 => {
            if ctx.step_length > 0.0 {
                motion = wander(params.wander_turn_prob, rng);
            }
            ScoutMode::Searching {
                cooldown: cooldown - 1,
            }
        }
        ScoutMode::Searching { .. } if ctx.found_object => {
            outgoing.push(Outgoing::broadcast(Message::Feedback(
                FeedbackMsg::Request {
                    capability: params.capability.clone(),
                    scout: me,
                    hop: 0,
                    seq: s.seq,
                },
            )));
            event(FeedbackEventKind::Request);
            ScoutMode::Requesting {
                started: ctx.now,
                deadline: ctx.now + params.request_timeout as u64,
                responders: BTreeSet::new(),
            }
        }
        ScoutMode::Searching { cooldown } => {
            if ctx.step_length > 0.0 {
                motion = wander(params.wander_turn_prob, rng);
            }
            ScoutMode::Searching { cooldown }
        }
        ScoutMode::Requesting {
            started,
            deadline,
            mut responders,
        } => {
            for r in arrived {
                if responders.insert(r) {
                    event(FeedbackEventKind::FeedbackReceived);
                }
            }
            if ctx.now < deadline {
                ScoutMode::Requesting {
                    started,
                    deadline,
                    responders,
                }
            } else if responders.len() >= params.min_responders as usize {
                outgoing.push(Outgoing::broadcast(Message::Feedback(
                    FeedbackMsg::Engage {
                        scout: me,
                        responders: responders.iter().copied().collect(),
                        seq: s.seq,
                    },
                )));
                event(FeedbackEventKind::Waiting);
                ScoutMode::Waiting { responders }
            } else {
                event(FeedbackEventKind::ResumeSearch);
                s.seq = s.seq.wrapping_add(1) & MAX_PKG_ID;
                ScoutMode::Searching {
                    cooldown: params.retry_cooldown,
                }
            }
        }
        ScoutMode::Waiting { responders } if ctx.team_assembled => {
            event(FeedbackEventKind::Teamed);
            ScoutMode::Teamed { responders }
        }
        mode @ (ScoutMode::Waiting { .. } | ScoutMode::Teamed { .. }) => mode,
    };

    FeedbackOutput {
        state: s,
        outgoing,
        motion,
        events,
    }
}

/// Request flooding, feedback forwarding along the reverse path, and
/// engage flooding.
pub fn relay_step(
    state: &RelayState,
    inbox: &[Envelope],
    me: RobotId,
) -> (RelayState, Vec<Outgoing>, Vec<FeedbackEvent>) {
    let mut s = state.clone();
    let mut outgoing = Vec::new();
    let mut events = Vec::new();
    for env in inbox {
        let Message::Feedback(msg) = &env.msg else {
            s.dropped += 1;
            continue;
        };
        match msg {
            FeedbackMsg::Request {
                capability,
                scout,
                hop,
                seq,
            } => {
                if *scout == me {
                    continue;
                }
                let (pkg, sender) = ledger_key(*seq, *scout);
                if !s.seen.insert(pkg, sender) {
                    continue;
                }
                s.reverse_hop.entry(*scout).or_insert(env.from);
                s.hops.entry(*scout).or_insert(hop + 1);
                outgoing.push(Outgoing::broadcast(Message::Feedback(
                    FeedbackMsg::Request {
                        capability: capability.clone(),
                        scout: *scout,
                        hop: hop + 1,
                        seq: *seq,
                    },
                )));
                events.push(FeedbackEvent {
                    role: Role::Relay,
                    kind: FeedbackEventKind::RequestRelay,
                    scout: *scout,
                });
            }
            FeedbackMsg::Feedback { responder, scout } => {
                if env.to != Some(me) {
                    continue;
                }
                let kind = match s.reverse_hop.get(scout) {
                    Some(&next) => {
                        outgoing.push(Outgoing::unicast(
                            next,
                            Message::Feedback(FeedbackMsg::Feedback {
                                responder: *responder,
                                scout: *scout,
                            }),
                        ));
                        FeedbackEventKind::FeedbackForward
                    }
                    None => {
                        s.dropped += 1;
                        FeedbackEventKind::FeedbackDrop
                    }
                };
                events.push(FeedbackEvent {
                    role: Role::Relay,
                    kind,
                    scout: *scout,
                });
            }
            FeedbackMsg::Engage {
                scout,
                responders,
                seq,
            } => {
                if *scout == me {
                    continue;
                }
                let (pkg, sender) = ledger_key(*seq, *scout);
                if !s.engage_seen.insert(pkg, sender) {
                    continue;
                }
                outgoing.push(Outgoing::broadcast(Message::Feedback(
                    FeedbackMsg::Engage {
                        scout: *scout,
                        responders: responders.clone(),
                        seq: *seq,
                    },
                )));
                events.push(FeedbackEvent {
                    role: Role::Relay,
                    kind: FeedbackEventKind::EngageRelay,
                    scout: *scout,
                });
            }
        }
    }
    (s, outgoing, events)
}

/// Answers requests for a capability this robot has and follows an `Engage`
/// that names it. Expects `relay_step` to have run on the same inbox.
pub fn responder_step(
    state: &RelayState,
    capabilities: &BTreeSet<Capability>,
    inbox: &[Envelope],
    ctx: &PeerContext,
) -> FeedbackOutput<RelayState> {
    let me = ctx.id;
    let mut s = state.clone();
    let mut outgoing = Vec::new();
    let mut events = Vec::new();
    for env in inbox {
        match &env.msg {
            Message::Feedback(FeedbackMsg::Request {
                capability, scout, ..
            }) if *scout != me && capabilities.contains(capability) => {
                let Some(&next) = s.reverse_hop.get(scout) else {
                    continue;
                };
                if !s.responded.insert(*scout) {
                    continue;
                }
                outgoing.push(Outgoing::unicast(
                    next,
                    Message::Feedback(FeedbackMsg::Feedback {
                        responder: me,
                        scout: *scout,
                    }),
                ));
                events.push(FeedbackEvent {
                    role: Role::Responder,
                    kind: FeedbackEventKind::FeedbackSent,
                    scout: *scout,
                });
            }
            Message::Feedback(FeedbackMsg::Engage {
                scout, responders, ..
            }) if s.engaged.is_none()
                && responders.contains(&me)
                && s.responded.contains(scout) =>
            {
                s.engaged = Some(*scout);
                events.push(FeedbackEvent {
                    role: Role::Responder,
                    kind: FeedbackEventKind::Engaged,
                    scout: *scout,
                });
            }
            _ => {}
        }
    }
    let motion = match (s.engaged, ctx.engage_target) {
        (Some(_), _) if ctx.at_scout => Motion::STOP,
        (Some(_), Some(target)) => Motion::toward(&ctx.pose, target, ctx.step_length),
        _ => Motion::STOP,
    };
    FeedbackOutput {
        state: s,
        outgoing,
        motion,
        events,
    }
}

/// Full transition of a non-scout robot.
pub fn peer_step<R: Rng + ?Sized>(
    state: &RelayState,
    params: &FeedbackParams,
    capabilities: &BTreeSet<Capability>,
    inbox: &[Envelope],
    ctx: &PeerContext,
    rng: &mut R,
) -> FeedbackOutput<RelayState> {
    let (relayed, mut outgoing, mut events) = relay_step(state, inbox, ctx.id);
    let mut out = responder_step(&relayed, capabilities, inbox, ctx);
    outgoing.append(&mut out.outgoing);
    events.append(&mut out.events);
    out.outgoing = outgoing;
    out.events = events;
    if out.state.engaged.is_none() && params.peer_wander && ctx.step_length > 0.0 {
        out.motion = wander(params.wander_turn_prob, rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn id(i: u8) -> RobotId {
        RobotId::new(i).unwrap()
    }

    fn env(from: u8, to: Option<u8>, msg: FeedbackMsg) -> Envelope {
        Envelope {
            from: id(from),
            to: to.map(id),
            sent_from: Vec2::ZERO,
            msg: Message::Feedback(msg),
        }
    }

    fn request(scout: u8, hop: u32) -> FeedbackMsg {
        FeedbackMsg::Request {
            capability: Capability::ColorSensor,
            scout: id(scout),
            hop,
            seq: 0,
        }
    }

    fn peer_ctx(me: u8) -> PeerContext {
        PeerContext {
            id: id(me),
            pose: Pose::new(Vec2::ZERO, 0.0),
            step_length: 0.0,
            engage_target: None,
            at_scout: false,
        }
    }

    #[test]
    fn duplicate_request_relayed_once() {
        let state = RelayState::new(8);
        let inbox = [env(0, None, request(0, 0)), env(2, None, request(0, 1))];
        let (s, out, _) = relay_step(&state, &inbox, id(1));
        assert_eq!(out.len(), 1);
        assert_eq!(s.reverse_hop[&id(0)], id(0));
        assert_eq!(s.hops[&id(0)], 1);
        let (_, again, _) = relay_step(&s, &[env(3, None, request(0, 2))], id(1));
        assert!(again.is_empty());
    }

    #[test]
    fn feedback_without_reverse_hop_dropped() {
        let state = RelayState::new(8);
        let msg = FeedbackMsg::Feedback {
            responder: id(4),
            scout: id(0),
        };
        let (s, out, events) = relay_step(&state, &[env(4, Some(1), msg)], id(1));
        assert!(out.is_empty());
        assert_eq!(s.dropped, 1);
        assert_eq!(events[0].kind, FeedbackEventKind::FeedbackDrop);
    }

    #[test]
    fn capable_peer_answers_once() {
        let caps: BTreeSet<_> = [Capability::ColorSensor].into();
        let params = FeedbackParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let first = peer_step(
            &RelayState::new(8),
            &params,
            &caps,
            &[env(2, None, request(0, 1))],
            &peer_ctx(3),
            &mut rng,
        );
        let feedbacks = |o: &FeedbackOutput<RelayState>| {
            o.outgoing
                .iter()
                .filter(|m| matches!(m.msg, Message::Feedback(FeedbackMsg::Feedback { .. })))
                .count()
        };
        assert_eq!(feedbacks(&first), 1);
        assert_eq!(
            first.outgoing.iter().find(|m| m.to.is_some()).unwrap().to,
            Some(id(2))
        );
        let mut second_req = request(0, 1);
        if let FeedbackMsg::Request { seq, .. } = &mut second_req {
            *seq = 1;
        }
        let second = peer_step(
            &first.state,
            &params,
            &caps,
            &[env(5, None, second_req)],
            &peer_ctx(3),
            &mut rng,
        );
        assert_eq!(feedbacks(&second), 0);
    }

    #[test]
    fn incapable_peer_only_relays() {
        let caps: BTreeSet<_> = [Capability::Generic].into();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = peer_step(
            &RelayState::new(8),
            &FeedbackParams::default(),
            &caps,
            &[env(0, None, request(0, 0))],
            &peer_ctx(3),
            &mut rng,
        );
        assert_eq!(out.outgoing.len(), 1);
        assert!(out.outgoing[0].to.is_none());
    }

    fn run_scout(arrivals: &[u8], min: u32) -> ScoutMode {
        let params = FeedbackParams {
            min_responders: min,
            request_timeout: 5,
            ..FeedbackParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ctx = |now| ScoutContext {
            id: id(0),
            now,
            step_length: 0.0,
            found_object: true,
            team_assembled: false,
        };
        let mut state = scout_step(&ScoutState::default(), &params, &[], &ctx(0), &mut rng).state;
        for now in 1..=5 {
            let inbox: Vec<Envelope> = if now == 2 {
                arrivals
                    .iter()
                    .map(|&r| {
                        env(
                            1,
                            Some(0),
                            FeedbackMsg::Feedback {
                                responder: id(r),
                                scout: id(0),
                            },
                        )
                    })
                    .collect()
            } else {
                Vec::new()
            };
            state = scout_step(&state, &params, &inbox, &ctx(now), &mut rng).state;
        }
        state.mode
    }

    #[test]
    fn scout_threshold() {
        assert!(
            matches!(run_scout(&[3, 4], 2), ScoutMode::Waiting { responders } if responders.len() == 2)
        );
        assert!(matches!(run_scout(&[3], 2), ScoutMode::Searching { .. }));
        assert!(matches!(run_scout(&[], 2), ScoutMode::Searching { .. }));
        // same responder twice counts once
        assert!(matches!(run_scout(&[3, 3], 2), ScoutMode::Searching { .. }));
        assert!(matches!(run_scout(&[3], 1), ScoutMode::Waiting { .. }));
    }
}
