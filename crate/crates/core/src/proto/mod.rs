//! Per-robot protocol state machines. Each transition function is pure: it
//! takes the robot's state, its inbox and a context computed by the world,
//! and returns the next state, outgoing messages and a motion command.

pub mod feedback;
pub mod local;
pub mod street;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arena::{RobotId, Vec2};

pub use feedback::{FeedbackMsg, FeedbackParams, FeedbackState};
pub use local::{LocalParams, LocalState};
pub use street::{StreetMsg, StreetParams, StreetState};

/// Capability label of a heterogeneous robot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum Capability {
    ColorSensor,
    LightSensor,
    Generic,
    Other(String),
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capability::ColorSensor => f.write_str("color_sensor"),
            Capability::LightSensor => f.write_str("light_sensor"),
            Capability::Generic => f.write_str("generic"),
            Capability::Other(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Capability {
    fn from(s: &str) -> Self {
        match s {
            "color_sensor" => Capability::ColorSensor,
            "light_sensor" => Capability::LightSensor,
            "generic" => Capability::Generic,
            other => Capability::Other(other.to_string()),
        }
    }
}

impl From<String> for Capability {
    fn from(s: String) -> Self {
        Capability::from(s.as_str())
    }
}

impl From<Capability> for String {
    fn from(c: Capability) -> String {
        c.to_string()
    }
}

impl FromStr for Capability {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Capability::from(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Street(StreetMsg),
    Feedback(FeedbackMsg),
}

/// A message as it sits in a receiver's inbox.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub from: RobotId,
    /// `None` for broadcasts.
    pub to: Option<RobotId>,
    /// Sender position at transmission, standing in for the IR bearing.
    pub sent_from: Vec2,
    pub msg: Message,
}

/// A message a protocol wants transmitted this tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Outgoing {
    pub to: Option<RobotId>,
    pub msg: Message,
}

impl Outgoing {
    pub fn broadcast(msg: Message) -> Self {
        Outgoing { to: None, msg }
    }

    pub fn unicast(to: RobotId, msg: Message) -> Self {
        Outgoing { to: Some(to), msg }
    }
}

/// Protocol state carried by each robot.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtoState {
    Idle,
    Local(LocalState),
    Street(StreetState),
    Feedback(FeedbackState),
}

/// Protocol parameters shared by every robot in a world.
#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    Idle,
    Local(LocalParams),
    Street(StreetParams),
    Feedback(FeedbackParams),
}

impl Controller {
    pub fn name(&self) -> &'static str {
        match self {
            Controller::Idle => "idle",
            Controller::Local(_) => "aggregation",
            Controller::Street(_) => "street",
            Controller::Feedback(_) => "feedback",
        }
    }
}
