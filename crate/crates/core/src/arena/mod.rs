//! Deterministic 2D arena: kinematics with odometry noise, light sensing,
//! proximity queries and radius-limited message delivery.

mod geometry;
mod world;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use geometry::{
    angle_between, normalize_heading, sense_light, LightSource, Motion, Pose, Vec2,
};
pub use world::{Delivery, Event, EventDetail, RobotState, World};

use crate::codec::MAX_ADDR;

/// Robot address. Fits the 6-bit sender/receiver fields of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct RobotId(u8);

impl RobotId {
    pub const MAX_ROBOTS: usize = MAX_ADDR as usize + 1;

    pub fn new(id: u8) -> Result<Self, ArenaError> {
        if id > MAX_ADDR {
            return Err(ArenaError::IdRange(id as usize));
        }
        Ok(RobotId(id))
    }

    pub fn from_index(index: usize) -> Result<Self, ArenaError> {
        u8::try_from(index)
            .map_err(|_| ArenaError::IdRange(index))
            .and_then(RobotId::new)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for RobotId {
    type Error = ArenaError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        RobotId::new(v)
    }
}

impl From<RobotId> for u8 {
    fn from(id: RobotId) -> u8 {
        id.0
    }
}

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArenaError {
    #[error("robot id {0} does not fit the 6-bit address space")]
    IdRange(usize),
    #[error("unknown robot id {0}")]
    UnknownRobot(RobotId),
    #[error("duplicate robot id {0}")]
    DuplicateRobot(RobotId),
    #[error("invalid arena config: {0}")]
    InvalidConfig(String),
    #[error("robot {0} starts outside the arena")]
    OutOfBounds(RobotId),
    #[error("radius must be positive, got {0}")]
    Radius(f64),
}

fn default_width() -> f64 {
    1.0
}
fn default_height() -> f64 {
    1.0
}
fn default_comm_radius() -> f64 {
    0.15
}
fn default_proximity_radius() -> f64 {
    0.04
}
fn default_dt() -> f64 {
    0.1
}
fn default_speed() -> f64 {
    0.05
}
fn default_dist_noise() -> f64 {
    0.06
}
fn default_rot_noise() -> f64 {
    0.11
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArenaConfig {
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_height")]
    pub height: f64,
    #[serde(default = "default_comm_radius")]
    pub comm_radius: f64,
    #[serde(default = "default_proximity_radius")]
    pub proximity_radius: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Top speed in m/s.
    #[serde(default = "default_speed")]
    pub speed: f64,
    /// Odometry distance error, as a fraction of the commanded distance.
    #[serde(default = "default_dist_noise")]
    pub dist_noise_frac: f64,
    /// Odometry rotation error, as a fraction of the commanded angle.
    #[serde(default = "default_rot_noise")]
    pub rot_noise_frac: f64,
    /// Robots closer than this cannot drive into each other. Zero disables
    /// exclusion.
    #[serde(default)]
    pub body_radius: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ArenaConfig {
    fn default() -> Self {
        ArenaConfig {
            width: default_width(),
            height: default_height(),
            comm_radius: default_comm_radius(),
            proximity_radius: default_proximity_radius(),
            dt: default_dt(),
            speed: default_speed(),
            dist_noise_frac: default_dist_noise(),
            rot_noise_frac: default_rot_noise(),
            body_radius: 0.0,
            seed: 0,
        }
    }
}

impl ArenaConfig {
    /// Same config with both odometry noise fractions set to zero.
    pub fn noiseless(mut self) -> Self {
        self.dist_noise_frac = 0.0;
        self.rot_noise_frac = 0.0;
        self
    }

    /// Distance covered by one tick at full speed.
    pub fn step_length(&self) -> f64 {
        self.speed * self.dt
    }

    pub fn validate(&self) -> Result<(), ArenaError> {
        let bad = |msg: String| Err(ArenaError::InvalidConfig(msg));
        let all = [
            self.width,
            self.height,
            self.comm_radius,
            self.proximity_radius,
            self.dt,
            self.speed,
            self.dist_noise_frac,
            self.rot_noise_frac,
            self.body_radius,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all numeric parameters must be finite".into());
        }
        if self.width <= 0.0 || self.height <= 0.0 {
            return bad(format!(
                "width and height must be positive ({} x {})",
                self.width, self.height
            ));
        }
        if self.proximity_radius <= 0.0 || self.comm_radius <= self.proximity_radius {
            return bad(format!(
                "need comm_radius > proximity_radius > 0 (comm {}, proximity {})",
                self.comm_radius, self.proximity_radius
            ));
        }
        if self.dt <= 0.0 {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.speed < 0.0 {
            return bad(format!("speed must be nonnegative, got {}", self.speed));
        }
        for (name, v) in [
            ("dist_noise_frac", self.dist_noise_frac),
            ("rot_noise_frac", self.rot_noise_frac),
        ] {
            if !(0.0..1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1), got {v}"));
            }
        }
        if self.body_radius < 0.0 || self.body_radius >= self.proximity_radius {
            return bad(format!(
                "body_radius must lie in [0, proximity_radius), got {}",
                self.body_radius
            ));
        }
        Ok(())
    }

    pub fn contains(&self, p: Vec2) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ArenaConfig::default().validate().unwrap();
    }

    #[test]
    fn radius_ordering_enforced() {
        let d = ArenaConfig::default();
        let c = ArenaConfig {
            comm_radius: d.proximity_radius,
            ..d
        };
        assert!(c.validate().is_err());
        let c = ArenaConfig {
            proximity_radius: 0.0,
            ..d
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn noise_and_dt_bounds() {
        let d = ArenaConfig::default();
        let c = ArenaConfig {
            rot_noise_frac: 1.0,
            ..d
        };
        assert!(c.validate().is_err());
        let c = ArenaConfig { dt: 0.0, ..d };
        assert!(c.validate().is_err());
        let c = ArenaConfig { width: -1.0, ..d };
        assert!(c.validate().is_err());
    }

    #[test]
    fn ids_fit_six_bits() {
        assert!(RobotId::new(63).is_ok());
        assert!(RobotId::new(64).is_err());
        assert!(RobotId::from_index(300).is_err());
    }
}
