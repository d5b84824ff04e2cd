//! Deterministic microrobot swarm simulator.
//!
//! Robots live in a bounded 2-D arena, move with noisy differential-drive
//! kinematics and talk over short-range infrared broadcast. On top of that
//! substrate the crate implements three connectivity regimes:
//!
//! * [`proto::local`] — stigmergic aggregation under a light gradient, no
//!   messages at all;
//! * [`proto::street`] — a chain of stationary relays ("communication
//!   street") built by hop-counter flooding, with gradient navigation;
//! * [`proto::feedback`] — a scout floods a capability request and routes
//!   the answers back along reverse paths to assemble a team.
//!
//! [`codec`] holds the 31-bit frame and the routing-memory arithmetic,
//! [`graph`] the connectivity analytics, [`experiments`] the seeded sweep
//! harness and [`cli`] the command-line front end.

pub mod arena;
pub mod cli;
pub mod codec;
pub mod config;
pub mod experiments;
pub mod graph;
pub mod proto;
pub mod report;
pub mod scenario;

pub use arena::{ArenaConfig, RobotId, Vec2, World};
pub use config::ScenarioConfig;
pub use scenario::{run_scenario, RunOutput};
