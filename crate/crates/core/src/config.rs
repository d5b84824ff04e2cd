//! Scenario files: a sectioned `key = value` text format (TOML syntax).
//!
//! ```toml
//! [arena]
//! width = 1.0
//! comm_radius = 0.15
//! seed = 7
//!
//! [robots]
//! count = 6
//! placement = "chain"      # random | chain | grid | explicit
//! end_landmark = true
//!
//! [[lights]]
//! position = [0.5, 0.5]
//! peak_intensity = 1.0
//! falloff_radius = 0.2
//!
//! [landmarks]
//! positions = [[0.9, 0.5]]
//!
//! [protocol]
//! name = "street"          # aggregation | street | feedback | idle
//! n_threshold = 15
//!
//! [run]
//! ticks = 200
//! ```
//!
//! Every section except `[robots]` and `[protocol]` has defaults. Unknown keys
//! are rejected.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{ArenaConfig, ArenaError, LightSource, Pose, RobotId, RobotState, Vec2, World};
use crate::proto::feedback::{RelayState, ScoutState};
use crate::proto::{
    Capability, Controller, FeedbackParams, FeedbackState, LocalParams, LocalState, ProtoState,
    StreetParams, StreetState,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Random,
    Chain,
    Grid,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapabilitySpec {
    pub tag: Capability,
    /// Fraction of eligible robots (all but the scout) that get the tag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    /// Explicit robot ids that get the tag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<RobotId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotsConfig {
    pub count: usize,
    pub placement: Placement,
    /// Chain and grid spacing; defaults to 0.9 of the communication radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// First robot of a chain or grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec2>,
    /// Grid row length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Vec2>>,
    /// Initial heading for chain, grid and explicit placements.
    #[serde(default)]
    pub heading: f64,
    /// Put a landmark just past the last robot of a chain.
    #[serde(default)]
    pub end_landmark: bool,
    #[serde(default)]
    pub capabilities: Vec<CapabilitySpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarksConfig {
    #[serde(default)]
    pub positions: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ProtocolConfig {
    Idle,
    Aggregation(LocalParams),
    Street(StreetParams),
    Feedback(FeedbackParams),
}

impl ProtocolConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolConfig::Idle => "idle",
            ProtocolConfig::Aggregation(_) => "aggregation",
            ProtocolConfig::Street(_) => "street",
            ProtocolConfig::Feedback(_) => "feedback",
        }
    }

    pub fn controller(&self) -> Controller {
        match self {
            ProtocolConfig::Idle => Controller::Idle,
            ProtocolConfig::Aggregation(p) => Controller::Local(*p),
            ProtocolConfig::Street(p) => Controller::Street(p.clone()),
            ProtocolConfig::Feedback(p) => Controller::Feedback(p.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightMove {
    pub tick: u64,
    pub to: Vec2,
}

pub const KNOWN_METRICS: [&str; 5] = ["aggregation", "street", "feedback", "degree", "clusters"];

fn default_ticks() -> u64 {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_ticks")]
    pub ticks: u64,
    /// Metric groups to report; empty means every group that applies.
    #[serde(default)]
    pub metrics: Vec<String>,
    /// Move every light to a new position at the given tick.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relocate_light: Option<LightMove>,
    /// Point the aggregation metric is anchored at; defaults to the (final)
    /// position of the first light.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec2>,
    /// Write a cluster snapshot every this many ticks (0: first and last only).
    #[serde(default)]
    pub cluster_interval: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ticks: default_ticks(),
            metrics: Vec::new(),
            relocate_light: None,
            anchor: None,
            cluster_interval: 0,
        }
    }
}

impl RunConfig {
    pub fn wants(&self, metric: &str) -> bool {
        self.metrics.is_empty() || self.metrics.iter().any(|m| m == metric)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub arena: ArenaConfig,
    pub robots: RobotsConfig,
    #[serde(default)]
    pub lights: Vec<LightSource>,
    #[serde(default)]
    pub landmarks: LandmarksConfig,
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub run: RunConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// The effective configuration with every default spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.arena.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.robots.count = count;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.arena.validate()?;
        let n = self.robots.count;
        if n == 0 {
            return invalid("robots.count must be at least 1");
        }
        if n > RobotId::MAX_ROBOTS {
            return invalid(format!(
                "robots.count {n} exceeds the {} addressable robots",
                RobotId::MAX_ROBOTS
            ));
        }
        if let Some(s) = self.robots.spacing {
            if !(s.is_finite() && s > 0.0) {
                return invalid("robots.spacing must be positive");
            }
        }
        if !self.robots.heading.is_finite() {
            return invalid("robots.heading must be finite");
        }
        match self.robots.placement {
            Placement::Explicit => match &self.robots.positions {
                Some(p) if p.len() == n => {}
                Some(p) => {
                    return invalid(format!(
                        "robots.positions has {} entries, count is {n}",
                        p.len()
                    ))
                }
                None => return invalid("explicit placement needs robots.positions"),
            },
            Placement::Grid if self.robots.columns == Some(0) => {
                return invalid("robots.columns must be at least 1")
            }
            _ => {}
        }
        if self.robots.end_landmark && self.robots.placement != Placement::Chain {
            return invalid("robots.end_landmark only applies to chain placement");
        }
        for cap in &self.robots.capabilities {
            match (&cap.fraction, &cap.ids) {
                (Some(f), None) if (0.0..=1.0).contains(f) => {}
                (Some(_), None) => return invalid("capability fraction must lie in [0, 1]"),
                (None, Some(ids)) => {
                    if let Some(bad) = ids.iter().find(|id| id.index() >= n) {
                        return invalid(format!("capability id {bad} is not a robot"));
                    }
                }
                _ => return invalid("each capability needs exactly one of fraction or ids"),
            }
        }
        for light in &self.lights {
            if !(light.peak_intensity.is_finite() && light.peak_intensity >= 0.0) {
                return invalid("light peak_intensity must be nonnegative");
            }
            if !(light.falloff_radius.is_finite() && light.falloff_radius > 0.0) {
                return invalid("light falloff_radius must be positive");
            }
        }
        let check_id = |id: RobotId, what: &str| {
            if id.index() >= n {
                invalid(format!("{what} {id} is not a robot (count {n})"))
            } else {
                Ok(())
            }
        };
        match &self.protocol {
            ProtocolConfig::Idle => {}
            ProtocolConfig::Aggregation(p) => p.validate().map_err(ConfigError::Invalid)?,
            ProtocolConfig::Street(p) => {
                p.validate().map_err(ConfigError::Invalid)?;
                if p.origins.is_empty() {
                    return invalid("street protocol needs at least one origin");
                }
                for &o in &p.origins {
                    check_id(o, "street origin")?;
                }
            }
            ProtocolConfig::Feedback(p) => {
                p.validate().map_err(ConfigError::Invalid)?;
                check_id(p.scout, "scout")?;
            }
        }
        if self.run.ticks == 0 {
            return invalid("run.ticks must be positive");
        }
        if let Some(m) = self
            .run
            .metrics
            .iter()
            .find(|m| !KNOWN_METRICS.contains(&m.as_str()))
        {
            return invalid(format!(
                "unknown metric `{m}` (known: {})",
                KNOWN_METRICS.join(", ")
            ));
        }
        if self.run.relocate_light.is_some() && self.lights.is_empty() {
            return invalid("run.relocate_light needs at least one light");
        }
        Ok(())
    }

    /// Initial positions and headings. Random placement draws from its own
    /// stream of the arena seed.
    pub fn placement(&self) -> Result<Vec<Pose>, ConfigError> {
        let cfg = &self.arena;
        let robots = &self.robots;
        let n = robots.count;
        let spacing = robots.spacing.unwrap_or(0.9 * cfg.comm_radius);
        let poses: Vec<Pose> = match robots.placement {
            Placement::Random => {
                let mut rng = placement_rng(cfg.seed);
                (0..n)
                    .map(|_| {
                        let p = Vec2::new(
                            rng.random_range(0.0..=cfg.width),
                            rng.random_range(0.0..=cfg.height),
                        );
                        Pose::new(p, rng.random_range(0.0..std::f64::consts::TAU))
                    })
                    .collect()
            }
            Placement::Chain => {
                let start = robots
                    .start
                    .unwrap_or(Vec2::new(0.5 * spacing, 0.5 * cfg.height));
                (0..n)
                    .map(|i| Pose::new(start + Vec2::new(i as f64 * spacing, 0.0), robots.heading))
                    .collect()
            }
            Placement::Grid => {
                let cols = robots
                    .columns
                    .unwrap_or_else(|| (n as f64).sqrt().ceil() as usize);
                let start = robots
                    .start
                    .unwrap_or(Vec2::new(0.5 * spacing, 0.5 * spacing));
                (0..n)
                    .map(|i| {
                        let offset = Vec2::new((i % cols) as f64, (i / cols) as f64) * spacing;
                        Pose::new(start + offset, robots.heading)
                    })
                    .collect()
            }
            Placement::Explicit => robots
                .positions
                .as_ref()
                .expect("validated")
                .iter()
                .map(|&p| Pose::new(p, robots.heading))
                .collect(),
        };
        if let Some(i) = poses.iter().position(|p| !cfg.contains(p.position)) {
            return invalid(format!(
                "robot {i} is placed outside the {} x {} arena",
                cfg.width, cfg.height
            ));
        }
        Ok(poses)
    }

    pub fn landmark_positions(&self, poses: &[Pose]) -> Vec<Vec2> {
        let mut landmarks = self.landmarks.positions.clone();
        if self.robots.end_landmark {
            if let Some(last) = poses.last() {
                let offset = 0.5 * self.arena.proximity_radius;
                let mut p = last.position + Vec2::new(offset, 0.0);
                p.x = p.x.min(self.arena.width);
                landmarks.push(p);
            }
        }
        landmarks
    }

    fn capabilities(&self) -> Vec<BTreeSet<Capability>> {
        let n = self.robots.count;
        let mut caps = vec![BTreeSet::new(); n];
        let scout = match &self.protocol {
            ProtocolConfig::Feedback(p) => Some(p.scout.index()),
            _ => None,
        };
        let mut rng = placement_rng(self.arena.seed);
        rng.set_stream(2);
        for spec in &self.robots.capabilities {
            let chosen: Vec<usize> = match (&spec.fraction, &spec.ids) {
                (_, Some(ids)) => ids.iter().map(|id| id.index()).collect(),
                (Some(f), None) => {
                    let mut eligible: Vec<usize> = (0..n).filter(|&i| Some(i) != scout).collect();
                    let k = (f * eligible.len() as f64).round() as usize;
                    eligible.shuffle(&mut rng);
                    eligible.truncate(k);
                    eligible
                }
                (None, None) => Vec::new(),
            };
            for i in chosen {
                caps[i].insert(spec.tag.clone());
            }
        }
        caps
    }

    pub fn build_world(&self) -> Result<World, ConfigError> {
        self.validate()?;
        let poses = self.placement()?;
        let caps = self.capabilities();
        let mut robots = Vec::with_capacity(poses.len());
        for (i, (pose, capabilities)) in poses.iter().zip(caps).enumerate() {
            let id = RobotId::from_index(i)?;
            let proto = match &self.protocol {
                ProtocolConfig::Idle => ProtoState::Idle,
                ProtocolConfig::Aggregation(_) => ProtoState::Local(LocalState::Wandering),
                ProtocolConfig::Street(p) if p.origins.contains(&id) => {
                    ProtoState::Street(StreetState::origin())
                }
                ProtocolConfig::Street(_) => ProtoState::Street(StreetState::free()),
                ProtocolConfig::Feedback(p) if p.scout == id => {
                    ProtoState::Feedback(FeedbackState::Scout(ScoutState::default()))
                }
                ProtocolConfig::Feedback(p) => {
                    ProtoState::Feedback(FeedbackState::Peer(RelayState::new(p.ledger_capacity)))
                }
            };
            let mut robot = RobotState::new(id, *pose, proto);
            robot.capabilities = capabilities;
            robots.push(robot);
        }
        let landmarks = self.landmark_positions(&poses);
        Ok(World::new(
            self.arena,
            self.protocol.controller(),
            robots,
            self.lights.clone(),
            landmarks,
        )?)
    }
}

fn placement_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    const STREET: &str = r#"
[arena]
comm_radius = 0.15
proximity_radius = 0.04
speed = 0.0

[robots]
count = 6
placement = "chain"
end_landmark = true

[protocol]
name = "street"

[run]
ticks = 60
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ScenarioConfig::from_toml(STREET).unwrap();
        assert_eq!(cfg.robots.count, 6);
        assert_eq!(cfg.protocol.name(), "street");
        let again = ScenarioConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn chain_placement_and_end_landmark() {
        let cfg = ScenarioConfig::from_toml(STREET).unwrap();
        let world = cfg.build_world().unwrap();
        let pos = world.positions();
        for pair in pos.windows(2) {
            assert!((pair[0].distance(pair[1]) - 0.135).abs() < 1e-12);
        }
        assert_eq!(world.landmarks().len(), 1);
        assert!(world.landmarks()[0].distance(pos[5]) <= cfg.arena.proximity_radius);
        assert!(world.landmarks()[0].distance(pos[4]) > cfg.arena.proximity_radius);
    }

    #[test]
    fn rejects_unknown_keys_and_protocols() {
        let bad_key = STREET.replace("count = 6", "count = 6\nflavour = 1");
        assert!(matches!(
            ScenarioConfig::from_toml(&bad_key),
            Err(ConfigError::Parse(_))
        ));
        let bad_proto = STREET.replace("name = \"street\"", "name = \"telepathy\"");
        assert!(matches!(
            ScenarioConfig::from_toml(&bad_proto),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn rejects_radius_ordering() {
        let bad = STREET.replace("proximity_radius = 0.04", "proximity_radius = 0.2");
        assert!(matches!(
            ScenarioConfig::from_toml(&bad),
            Err(ConfigError::Arena(_))
        ));
    }

    #[test]
    fn rejects_out_of_range_roles() {
        let bad = STREET.replace("name = \"street\"", "name = \"street\"\norigins = [9]");
        assert!(matches!(
            ScenarioConfig::from_toml(&bad),
            Err(ConfigError::Invalid(_))
        ));
        let too_many = STREET.replace("count = 6", "count = 65");
        assert!(ScenarioConfig::from_toml(&too_many).is_err());
    }

    #[test]
    fn chain_must_fit() {
        let long = STREET.replace("count = 6", "count = 20");
        let cfg = ScenarioConfig::from_toml(&long).unwrap();
        assert!(matches!(cfg.build_world(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn capability_fraction_skips_scout() {
        let text = r#"
[robots]
count = 9
placement = "random"
[[robots.capabilities]]
tag = "color_sensor"
fraction = 0.25
[protocol]
name = "feedback"
scout = 0
"#;
        let cfg = ScenarioConfig::from_toml(text).unwrap();
        let world = cfg.build_world().unwrap();
        let capable: Vec<_> = world
            .robots()
            .iter()
            .filter(|r| r.capabilities.contains(&Capability::ColorSensor))
            .map(|r| r.id.index())
            .collect();
        assert_eq!(capable.len(), 2);
        assert!(!capable.contains(&0));
    }
}
