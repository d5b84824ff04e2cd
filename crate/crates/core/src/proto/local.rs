//! Stigmergy aggregation: wander, stop on encountering another robot for a
//! time that grows with the sensed light, then turn away and resume.
//!
//! No messages are exchanged; robots only sense proximity and one scalar
//! light level.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arena::Motion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalState {
    #[default]
    Wandering,
    Waiting {
        remaining: u32,
    },
    Avoiding {
        remaining: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalParams {
    /// Wait ticks per unit of sensed intensity.
    #[serde(default = "LocalParams::default_wait_gain")]
    pub wait_gain: f64,
    #[serde(default)]
    pub base_wait: u32,
    #[serde(default = "LocalParams::default_avoid_ticks")]
    pub avoid_ticks: u32,
    /// Turns are drawn uniformly from `[-turn_angle_range, turn_angle_range]`.
    #[serde(default = "LocalParams::default_turn_angle_range")]
    pub turn_angle_range: f64,
    /// Per-tick probability of a random turn while wandering.
    #[serde(default = "LocalParams::default_turn_prob")]
    pub turn_prob: f64,
}

impl LocalParams {
    fn default_wait_gain() -> f64 {
        400.0
    }
    fn default_avoid_ticks() -> u32 {
        5
    }
    fn default_turn_angle_range() -> f64 {
        std::f64::consts::PI
    }
    fn default_turn_prob() -> f64 {
        0.05
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.wait_gain.is_finite() && self.wait_gain > 0.0) {
            return Err(format!(
                "wait_gain must be positive, got {}",
                self.wait_gain
            ));
        }
        if self.avoid_ticks == 0 {
            return Err("avoid_ticks must be at least 1".into());
        }
        if !(self.turn_angle_range.is_finite() && self.turn_angle_range >= 0.0) {
            return Err("turn_angle_range must be nonnegative".into());
        }
        if !(0.0..=1.0).contains(&self.turn_prob) {
            return Err(format!(
                "turn_prob must lie in [0, 1], got {}",
                self.turn_prob
            ));
        }
        Ok(())
    }
}

impl Default for LocalParams {
    fn default() -> Self {
        LocalParams {
            wait_gain: Self::default_wait_gain(),
            base_wait: 0,
            avoid_ticks: Self::default_avoid_ticks(),
            turn_angle_range: Self::default_turn_angle_range(),
            turn_prob: Self::default_turn_prob(),
        }
    }
}

/// Ticks a robot stays put after an encounter at the given light level.
pub fn wait_time(params: &LocalParams, intensity: f64) -> u32 {
    let extra = (params.wait_gain * intensity.max(0.0)).round();
    params
        .base_wait
        .saturating_add(extra.min(u32::MAX as f64) as u32)
}

fn random_turn<R: Rng + ?Sized>(params: &LocalParams, rng: &mut R) -> f64 {
    if params.turn_angle_range == 0.0 {
        0.0
    } else {
        rng.random_range(-params.turn_angle_range..=params.turn_angle_range)
    }
}

fn start_avoiding<R: Rng + ?Sized>(params: &LocalParams, rng: &mut R) -> (LocalState, Motion) {
    (
        LocalState::Avoiding {
            remaining: params.avoid_ticks,
        },
        Motion::drive(random_turn(params, rng), 1.0),
    )
}

/// One transition. `encounter` is true when another robot is within
/// proximity range this tick.
pub fn local_step<R: Rng + ?Sized>(
    state: LocalState,
    params: &LocalParams,
    encounter: bool,
    intensity: f64,
    rng: &mut R,
) -> (LocalState, Motion) {
    match state {
        LocalState::Wandering if encounter => match wait_time(params, intensity) {
            0 => start_avoiding(params, rng),
            ticks => (LocalState::Waiting { remaining: ticks }, Motion::STOP),
        },
        LocalState::Wandering => {
            let turn = if params.turn_prob > 0.0 && rng.random_bool(params.turn_prob) {
                random_turn(params, rng)
            } else {
                0.0
            };
            (LocalState::Wandering, Motion::drive(turn, 1.0))
        }
        // A waiting robot keeps reading its light sensor: if the light has
        // dimmed (say, the lamp was moved) the wait shrinks to what the new
        // level would have granted. Under a steady light this never binds.
        LocalState::Waiting { remaining } => {
            match (remaining - 1).min(wait_time(params, intensity)) {
                0 => start_avoiding(params, rng),
                left => (LocalState::Waiting { remaining: left }, Motion::STOP),
            }
        }
        LocalState::Avoiding { remaining } if remaining > 1 => (
            LocalState::Avoiding {
                remaining: remaining - 1,
            },
            Motion::drive(0.0, 1.0),
        ),
        LocalState::Avoiding { .. } => (LocalState::Wandering, Motion::drive(0.0, 1.0)),
    }
}
