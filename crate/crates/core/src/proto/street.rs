//! Communication street: hop-counter flooding from an origin robot.
//!
//! A free robot that receives `BuildStreet(n)` stops and checks the finishing
//! conditions (a landmark nearby, another street nearby, or `n` above the
//! threshold). If one holds it becomes the terminus and returns `Ok` upstream;
//! otherwise it joins as a member with counter `n + 1` and keeps
//! rebroadcasting `BuildStreet(n + 1)` until a downstream acceptance is
//! overheard or the send times out. Members and the terminus periodically
//! broadcast `NavPing(counter)` so that free robots can follow the gradient.
//!
//! After the first `Ok` reaches the origin, further confirmation cycles send a
//! `Data` message down the street; each terminus answers with another `Ok`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Envelope, Message, Outgoing};
use crate::arena::{Event, EventDetail, Motion, Pose, RobotId, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FinishReason {
    Landmark,
    OtherStreet,
    Threshold,
}

impl FinishReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FinishReason::Landmark => "landmark",
            FinishReason::OtherStreet => "other_street",
            FinishReason::Threshold => "threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreetMode {
    Free,
    /// Landmark robot the street grows from. Its counter is 0.
    Origin {
        injected: bool,
    },
    Member {
        counter: u32,
        upstream: RobotId,
        origin: RobotId,
    },
    Terminus {
        counter: u32,
        upstream: RobotId,
        origin: RobotId,
        reason: FinishReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreetMsg {
    BuildStreet {
        n: u32,
        from: RobotId,
        origin: RobotId,
        /// Robot whose `BuildStreet` the sender accepted; `None` from the origin.
        upstream: Option<RobotId>,
    },
    Ok {
        to: RobotId,
        seq: u32,
    },
    Data {
        to: RobotId,
        seq: u32,
    },
    NavPing {
        n: u32,
        from: RobotId,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct AckSend {
    n: u32,
    started: u64,
    last: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreetState {
    pub mode: StreetMode,
    /// Set once an `Ok` addressed to this robot has been received.
    pub acked: bool,
    pub downstream: Vec<RobotId>,
    /// Messages of other protocols, or street messages that could not be
    /// routed.
    pub dropped: u32,
    /// Completed confirmation cycles (origin only).
    pub cycles_done: u32,
    send: Option<AckSend>,
}

impl StreetState {
    pub fn free() -> Self {
        Self::with_mode(StreetMode::Free)
    }

    pub fn origin() -> Self {
        Self::with_mode(StreetMode::Origin { injected: false })
    }

    fn with_mode(mode: StreetMode) -> Self {
        StreetState {
            mode,
            acked: false,
            downstream: Vec::new(),
            dropped: 0,
            cycles_done: 0,
            send: None,
        }
    }

    pub fn counter(&self) -> Option<u32> {
        match self.mode {
            StreetMode::Free => None,
            StreetMode::Origin { .. } => Some(0),
            StreetMode::Member { counter, .. } | StreetMode::Terminus { counter, .. } => {
                Some(counter)
            }
        }
    }

    pub fn upstream(&self) -> Option<RobotId> {
        match self.mode {
            StreetMode::Member { upstream, .. } | StreetMode::Terminus { upstream, .. } => {
                Some(upstream)
            }
            _ => None,
        }
    }

    /// Origin of the street this robot belongs to, if any.
    pub fn street_origin(&self, me: RobotId) -> Option<RobotId> {
        match self.mode {
            StreetMode::Free => None,
            StreetMode::Origin { injected } => injected.then_some(me),
            StreetMode::Member { origin, .. } | StreetMode::Terminus { origin, .. } => Some(origin),
        }
    }

    pub fn is_terminus(&self) -> bool {
        matches!(self.mode, StreetMode::Terminus { .. })
    }

    pub fn is_sending(&self) -> bool {
        self.send.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StreetParams {
    /// Landmark robots that inject the first `BuildStreet`.
    pub origins: Vec<RobotId>,
    /// A robot receiving `n > n_threshold` finishes the street.
    pub n_threshold: u32,
    /// Rebroadcast interval of an unacknowledged `BuildStreet`.
    pub resend_ticks: u32,
    /// Give up rebroadcasting after this many ticks.
    pub send_timeout: u32,
    /// Zero disables navigation pings.
    pub nav_ping_period: u32,
    /// Number of `Ok` cycles the origin drives, the build included.
    pub confirm_cycles: u32,
    /// Navigators head toward increasing counters when true.
    pub nav_toward_terminus: bool,
    /// Tick at which origins inject the first `BuildStreet`.
    pub start_tick: u64,
    /// Per-tick turn probability of a wandering free robot.
    pub wander_turn_prob: f64,
}

impl Default for StreetParams {
    fn default() -> Self {
        StreetParams {
            origins: vec![RobotId::new(0).expect("0 is a valid id")],
            n_threshold: 15,
            resend_ticks: 2,
            send_timeout: 30,
            nav_ping_period: 10,
            confirm_cycles: 2,
            nav_toward_terminus: true,
            start_tick: 0,
            wander_turn_prob: 0.05,
        }
    }
}

impl StreetParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_threshold < 1 {
            return Err("n_threshold must be at least 1".into());
        }
        if self.resend_ticks < 1 {
            return Err("resend_ticks must be at least 1".into());
        }
        if self.confirm_cycles < 1 {
            return Err("confirm_cycles must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.wander_turn_prob) {
            return Err("wander_turn_prob must lie in [0, 1]".into());
        }
        Ok(())
    }
}

/// What the world tells a robot about its surroundings this tick.
#[derive(Debug, Clone, Copy)]
pub struct StreetContext<'a> {
    pub id: RobotId,
    pub now: u64,
    pub pose: Pose,
    pub step_length: f64,
    pub near_landmark: bool,
    /// Street origins of robots within communication range.
    pub nearby_street_origins: &'a [RobotId],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreetEventKind {
    Inject,
    Accept,
    Terminus(FinishReason),
    OkRelay,
    OkReceived,
    DataSent,
    DataRelay,
    DataReceived,
    NavPing,
    SendTimeout,
    Drop,
}

impl StreetEventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StreetEventKind::Inject => "inject",
            StreetEventKind::Accept => "accept",
            StreetEventKind::Terminus(FinishReason::Landmark) => "terminus_landmark",
            StreetEventKind::Terminus(FinishReason::OtherStreet) => "terminus_other_street",
            StreetEventKind::Terminus(FinishReason::Threshold) => "terminus_threshold",
            StreetEventKind::OkRelay => "ok_relay",
            StreetEventKind::OkReceived => "ok_received",
            StreetEventKind::DataSent => "data_sent",
            StreetEventKind::DataRelay => "data_relay",
            StreetEventKind::DataReceived => "data_received",
            StreetEventKind::NavPing => "nav_ping",
            StreetEventKind::SendTimeout => "send_timeout",
            StreetEventKind::Drop => "drop",
        }
    }
}

impl fmt::Display for StreetEventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreetEvent {
    pub kind: StreetEventKind,
    /// The robot's counter when the event happened (0 for free robots).
    pub counter: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreetOutput {
    pub state: StreetState,
    pub outgoing: Vec<Outgoing>,
    pub motion: Motion,
    pub events: Vec<StreetEvent>,
}

struct Step<'a> {
    s: StreetState,
    out: Vec<Outgoing>,
    events: Vec<StreetEvent>,
    ctx: &'a StreetContext<'a>,
}

impl Step<'_> {
    fn emit(&mut self, to: Option<RobotId>, msg: StreetMsg) {
        self.out.push(Outgoing {
            to,
            msg: Message::Street(msg),
        });
    }

    fn event(&mut self, kind: StreetEventKind) {
        let counter = self.s.counter().unwrap_or(0);
        self.events.push(StreetEvent { kind, counter });
    }

    fn broadcast_build(&mut self, n: u32, origin: RobotId, upstream: Option<RobotId>) {
        self.emit(
            None,
            StreetMsg::BuildStreet {
                n,
                from: self.ctx.id,
                origin,
                upstream,
            },
        );
        self.s.send = Some(AckSend {
            n,
            started: self.ctx.now,
            last: self.ctx.now,
        });
    }

    fn become_terminus(
        &mut self,
        counter: u32,
        upstream: RobotId,
        origin: RobotId,
        reason: FinishReason,
    ) {
        self.s.mode = StreetMode::Terminus {
            counter,
            upstream,
            origin,
            reason,
        };
        self.s.send = None;
        self.emit(
            Some(upstream),
            StreetMsg::Ok {
                to: upstream,
                seq: 0,
            },
        );
        self.event(StreetEventKind::Terminus(reason));
    }

    fn note_downstream(&mut self, from: RobotId) {
        if !self.s.downstream.contains(&from) {
            self.s.downstream.push(from);
        }
        self.s.send = None;
    }
}

/// A navigation ping as perceived by a free robot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PingObservation {
    pub n: u32,
    pub from: RobotId,
    pub position: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NavError {
    #[error("pings carry no usable gradient")]
    InsufficientGradient,
}

/// Heading toward the sender of the highest-counter ping, ties broken by the
/// smallest sender id.
pub fn navigation_direction(pings: &[PingObservation], my_position: Vec2) -> Result<f64, NavError> {
    navigation_direction_with(pings, my_position, true)
}

/// As [`navigation_direction`], but heads toward the lowest counter when
/// `toward_terminus` is false.
pub fn navigation_direction_with(
    pings: &[PingObservation],
    my_position: Vec2,
    toward_terminus: bool,
) -> Result<f64, NavError> {
    if pings.len() < 2 {
        return Err(NavError::InsufficientGradient);
    }
    let first = pings[0].n;
    if pings.iter().all(|p| p.n == first) {
        return Err(NavError::InsufficientGradient);
    }
    let best = pings
        .iter()
        .min_by(|a, b| {
            let by_n = if toward_terminus {
                b.n.cmp(&a.n)
            } else {
                a.n.cmp(&b.n)
            };
            by_n.then(a.from.cmp(&b.from))
        })
        .expect("at least two pings");
    Ok(crate::arena::normalize_heading(
        (best.position - my_position).angle(),
    ))
}

fn wander<R: Rng + ?Sized>(params: &StreetParams, rng: &mut R) -> Motion {
    let turn = if params.wander_turn_prob > 0.0 && rng.random_bool(params.wander_turn_prob) {
        rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI)
    } else {
        0.0
    };
    Motion::drive(turn, 1.0)
}

pub fn street_step<R: Rng + ?Sized>(
    state: &StreetState,
    params: &StreetParams,
    inbox: &[Envelope],
    ctx: &StreetContext<'_>,
    rng: &mut R,
) -> StreetOutput {
    let mut st = Step {
        s: state.clone(),
        out: Vec::new(),
        events: Vec::new(),
        ctx,
    };
    let me = ctx.id;

    let mut builds = Vec::new();
    let mut pings = Vec::new();
    let mut oks = Vec::new();
    let mut data = Vec::new();
    for env in inbox {
        match &env.msg {
            Message::Street(StreetMsg::BuildStreet {
                n,
                from,
                origin,
                upstream,
            }) => builds.push((*n, *from, *origin, *upstream)),
            Message::Street(StreetMsg::NavPing { n, from }) => pings.push(PingObservation {
                n: *n,
                from: *from,
                position: env.sent_from,
            }),
            Message::Street(StreetMsg::Ok { to, seq }) if *to == me => oks.push((*seq, env.from)),
            Message::Street(StreetMsg::Data { to, seq }) if *to == me => data.push(*seq),
            Message::Street(StreetMsg::Ok { .. } | StreetMsg::Data { .. }) => {}
            Message::Feedback(_) => st.s.dropped += 1,
        }
    }

    let mut motion = Motion::STOP;
    match st.s.mode {
        StreetMode::Free => {
            // shortest street first, then smallest sender
            if let Some(&(n, from, origin, _)) = builds.iter().min_by_key(|b| (b.0, b.1)) {
                let counter = n.saturating_add(1);
                let other_street = ctx.nearby_street_origins.iter().any(|&o| o != origin);
                let reason = if ctx.near_landmark {
                    Some(FinishReason::Landmark)
                } else if other_street {
                    Some(FinishReason::OtherStreet)
                } else if n > params.n_threshold {
                    Some(FinishReason::Threshold)
                } else {
                    None
                };
                match reason {
                    Some(reason) => st.become_terminus(counter, from, origin, reason),
                    None => {
                        st.s.mode = StreetMode::Member {
                            counter,
                            upstream: from,
                            origin,
                        };
                        st.event(StreetEventKind::Accept);
                        st.broadcast_build(counter, origin, Some(from));
                    }
                }
            } else if ctx.step_length > 0.0 {
                motion = match navigation_direction_with(
                    &pings,
                    ctx.pose.position,
                    params.nav_toward_terminus,
                ) {
                    Ok(heading) => Motion::drive(
                        crate::arena::angle_between(ctx.pose.heading(), heading),
                        1.0,
                    ),
                    Err(NavError::InsufficientGradient) => wander(params, rng),
                };
            }
        }
        StreetMode::Origin { injected } => {
            if !injected && ctx.now >= params.start_tick {
                st.s.mode = StreetMode::Origin { injected: true };
                st.event(StreetEventKind::Inject);
                st.broadcast_build(0, me, None);
            }
            for &(_, from, _, upstream) in &builds {
                if upstream == Some(me) {
                    st.note_downstream(from);
                }
            }
            for (seq, from) in oks {
                st.note_downstream(from);
                if seq != st.s.cycles_done {
                    continue;
                }
                st.s.acked = true;
                st.s.send = None;
                st.s.cycles_done += 1;
                st.event(StreetEventKind::OkReceived);
                if st.s.cycles_done < params.confirm_cycles {
                    let seq = st.s.cycles_done;
                    for d in st.s.downstream.clone() {
                        st.emit(Some(d), StreetMsg::Data { to: d, seq });
                    }
                    st.event(StreetEventKind::DataSent);
                }
            }
        }
        StreetMode::Member {
            counter,
            upstream,
            origin,
        } => {
            for &(_, from, _, up) in &builds {
                if up == Some(me) {
                    st.note_downstream(from);
                }
            }
            let other_street = ctx.nearby_street_origins.iter().any(|&o| o != origin);
            if st.s.downstream.is_empty() && other_street {
                // growth front met another street
                st.become_terminus(counter, upstream, origin, FinishReason::OtherStreet);
            } else {
                for (seq, from) in oks {
                    st.note_downstream(from);
                    st.s.acked = true;
                    st.s.send = None;
                    st.emit(Some(upstream), StreetMsg::Ok { to: upstream, seq });
                    st.event(StreetEventKind::OkRelay);
                }
                for seq in data {
                    if st.s.downstream.is_empty() {
                        st.s.dropped += 1;
                        st.event(StreetEventKind::Drop);
                        continue;
                    }
                    for d in st.s.downstream.clone() {
                        st.emit(Some(d), StreetMsg::Data { to: d, seq });
                    }
                    st.event(StreetEventKind::DataRelay);
                }
            }
        }
        StreetMode::Terminus { upstream, .. } => {
            for seq in data {
                st.event(StreetEventKind::DataReceived);
                st.emit(Some(upstream), StreetMsg::Ok { to: upstream, seq });
            }
        }
    }

    // acknowledged send: repeat until a downstream robot is heard or timeout
    if let Some(send) = st.s.send {
        let origin = st.s.street_origin(me).unwrap_or(me);
        if ctx.now.saturating_sub(send.started) >= params.send_timeout as u64 {
            st.s.send = None;
            st.event(StreetEventKind::SendTimeout);
        } else if ctx.now.saturating_sub(send.last) >= params.resend_ticks as u64 {
            let upstream = st.s.upstream();
            st.emit(
                None,
                StreetMsg::BuildStreet {
                    n: send.n,
                    from: me,
                    origin,
                    upstream,
                },
            );
            st.s.send = Some(AckSend {
                last: ctx.now,
                ..send
            });
        }
    }

    if params.nav_ping_period > 0
        && ctx.now.is_multiple_of(params.nav_ping_period as u64)
        && st.s.street_origin(me).is_some()
    {
        let n = st.s.counter().unwrap_or(0);
        st.emit(None, StreetMsg::NavPing { n, from: me });
        st.event(StreetEventKind::NavPing);
    }

    StreetOutput {
        state: st.s,
        outgoing: st.out,
        motion,
        events: st.events,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no terminus formed during the run")]
    IncompleteRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreetMetrics {
    /// Ticks from the first injection to the first terminus.
    pub build_rounds: u64,
    /// Ticks for a `Data` message to travel from the origin to a terminus.
    pub propagation_rounds: Option<u64>,
    /// Ticks from the first terminus until its `Ok` reaches the origin.
    pub ok_rounds: Option<u64>,
    /// Robots that joined the street, origin and termini included.
    pub street_length: usize,
    /// The first robot to become a terminus.
    pub terminus: RobotId,
    pub origin: RobotId,
}

/// Summarizes a street run from the world event log.
pub fn street_metrics(log: &[Event]) -> Result<StreetMetrics, MetricsError> {
    let street: Vec<(u64, RobotId, StreetEventKind)> = log
        .iter()
        .filter_map(|e| match e.detail {
            EventDetail::Street(ev) => Some((e.tick, e.robot, ev.kind)),
            _ => None,
        })
        .collect();
    let first = |pred: &dyn Fn(StreetEventKind) -> bool| {
        street
            .iter()
            .find(|(_, _, k)| pred(*k))
            .map(|&(t, r, _)| (t, r))
    };
    let (inject_tick, origin) =
        first(&|k| k == StreetEventKind::Inject).ok_or(MetricsError::IncompleteRun)?;
    let (terminus_tick, terminus) =
        first(&|k| matches!(k, StreetEventKind::Terminus(_))).ok_or(MetricsError::IncompleteRun)?;
    let ok_rounds = first(&|k| k == StreetEventKind::OkReceived).map(|(t, _)| t - terminus_tick);
    let propagation_rounds = match (
        first(&|k| k == StreetEventKind::DataSent),
        first(&|k| k == StreetEventKind::DataReceived),
    ) {
        (Some((sent, _)), Some((recv, _))) if recv >= sent => Some(recv - sent),
        _ => None,
    };
    let mut members: Vec<RobotId> = street
        .iter()
        .filter(|(_, _, k)| {
            matches!(
                k,
                StreetEventKind::Inject | StreetEventKind::Accept | StreetEventKind::Terminus(_)
            )
        })
        .map(|&(_, r, _)| r)
        .collect();
    members.sort();
    members.dedup();
    Ok(StreetMetrics {
        build_rounds: terminus_tick - inject_tick,
        propagation_rounds,
        ok_rounds,
        street_length: members.len(),
        terminus,
        origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn id(i: u8) -> RobotId {
        RobotId::new(i).unwrap()
    }

    fn ctx<'a>(me: u8, now: u64, near_landmark: bool, origins: &'a [RobotId]) -> StreetContext<'a> {
        StreetContext {
            id: id(me),
            now,
            pose: Pose::new(Vec2::ZERO, 0.0),
            step_length: 0.0,
            near_landmark,
            nearby_street_origins: origins,
        }
    }

    fn build(n: u32, from: u8, origin: u8) -> Envelope {
        Envelope {
            from: id(from),
            to: None,
            sent_from: Vec2::ZERO,
            msg: Message::Street(StreetMsg::BuildStreet {
                n,
                from: id(from),
                origin: id(origin),
                upstream: None,
            }),
        }
    }

    fn ping(n: u32, from: u8, x: f64, y: f64) -> PingObservation {
        PingObservation {
            n,
            from: id(from),
            position: Vec2::new(x, y),
        }
    }

    #[test]
    fn threshold_finishes_street() {
        let params = StreetParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = street_step(
            &StreetState::free(),
            &params,
            &[build(params.n_threshold + 1, 3, 0)],
            &ctx(5, 7, false, &[]),
            &mut rng,
        );
        assert!(matches!(
            out.state.mode,
            StreetMode::Terminus {
                reason: FinishReason::Threshold,
                ..
            }
        ));
        assert!(out.motion.is_stopped());
        assert!(out
            .outgoing
            .iter()
            .any(|o| o.msg == Message::Street(StreetMsg::Ok { to: id(3), seq: 0 })));
    }

    #[test]
    fn free_robot_joins_with_incremented_counter() {
        let params = StreetParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = street_step(
            &StreetState::free(),
            &params,
            &[build(4, 2, 0), build(3, 9, 0), build(3, 1, 0)],
            &ctx(5, 1, false, &[]),
            &mut rng,
        );
        assert_eq!(
            out.state.mode,
            StreetMode::Member {
                counter: 4,
                upstream: id(1),
                origin: id(0)
            }
        );
        assert!(out.state.is_sending());
    }

    #[test]
    fn duplicate_build_ignored_by_member() {
        let params = StreetParams {
            nav_ping_period: 0,
            ..StreetParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let first = street_step(
            &StreetState::free(),
            &params,
            &[build(1, 2, 0)],
            &ctx(5, 1, false, &[]),
            &mut rng,
        );
        let second = street_step(
            &first.state,
            &params,
            &[build(0, 0, 0)],
            &ctx(5, 2, false, &[id(0)]),
            &mut rng,
        );
        assert_eq!(second.state.mode, first.state.mode);
        assert!(second.events.is_empty());
    }

    #[test]
    fn resend_until_timeout() {
        let params = StreetParams {
            resend_ticks: 2,
            send_timeout: 6,
            nav_ping_period: 0,
            ..StreetParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut state = street_step(
            &StreetState::free(),
            &params,
            &[build(1, 2, 0)],
            &ctx(5, 10, false, &[]),
            &mut rng,
        )
        .state;
        let mut sends = Vec::new();
        for now in 11..20 {
            let out = street_step(&state, &params, &[], &ctx(5, now, false, &[]), &mut rng);
            if !out.outgoing.is_empty() {
                sends.push(now);
            }
            state = out.state;
        }
        assert_eq!(sends, vec![12, 14]);
        assert!(!state.is_sending());
    }

    #[test]
    fn navigation_examples() {
        let here = Vec2::new(0.5, 0.5);
        let h = navigation_direction(&[ping(2, 1, 0.0, 0.5), ping(3, 2, 1.0, 0.5)], here).unwrap();
        assert!(h.abs() < 1e-12);
        assert_eq!(
            navigation_direction(&[ping(2, 1, 0.0, 0.5)], here),
            Err(NavError::InsufficientGradient)
        );
        assert_eq!(
            navigation_direction(&[ping(4, 1, 0.0, 0.5), ping(4, 2, 1.0, 0.5)], here),
            Err(NavError::InsufficientGradient)
        );
        let back =
            navigation_direction_with(&[ping(2, 1, 0.0, 0.5), ping(3, 2, 1.0, 0.5)], here, false)
                .unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-12);
    }
}
