use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A point or displacement in the arena plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(angle.cos(), angle.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn normalize_heading(angle: f64) -> f64 {
    let h = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if h >= TAU {
        0.0
    } else {
        h
    }
}

/// Signed smallest rotation from `from` to `to`, in `(-π, π]`.
pub fn angle_between(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Pose {
            position,
            heading: normalize_heading(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn set_heading(&mut self, heading: f64) {
        self.heading = normalize_heading(heading);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightSource {
    pub position: Vec2,
    pub peak_intensity: f64,
    pub falloff_radius: f64,
}

impl LightSource {
    /// Linear falloff: `peak · max(0, 1 − d / falloff_radius)`.
    pub fn intensity_at(&self, p: Vec2) -> f64 {
        let d = self.position.distance(p);
        self.peak_intensity * (1.0 - d / self.falloff_radius).max(0.0)
    }
}

/// Scalar reading of a single non-directional light sensor.
pub fn sense_light(position: Vec2, lights: &[LightSource]) -> f64 {
    lights.iter().map(|l| l.intensity_at(position)).sum()
}

/// Per-tick motor command. `forward` is a fraction of the configured speed in
/// `[0, 1]`; `turn` is applied before driving.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Motion {
    pub turn: f64,
    pub forward: f64,
}

impl Motion {
    pub const STOP: Motion = Motion {
        turn: 0.0,
        forward: 0.0,
    };

    pub fn drive(turn: f64, forward: f64) -> Self {
        Motion {
            turn,
            forward: forward.clamp(0.0, 1.0),
        }
    }

    pub fn is_stopped(&self) -> bool {
        self.forward == 0.0 && self.turn == 0.0
    }

    /// Turn to face `target` and drive toward it without overshooting.
    pub fn toward(pose: &Pose, target: Vec2, step_length: f64) -> Self {
        let delta = target - pose.position;
        let dist = delta.norm();
        if dist == 0.0 || step_length <= 0.0 {
            return Motion::STOP;
        }
        Motion::drive(
            angle_between(pose.heading(), delta.angle()),
            dist / step_length,
        )
    }
}
