//! CSV outputs: result rows, event logs and cluster snapshots.

use std::fmt;
use std::io;

use crate::arena::{Event, EventDetail};
use crate::graph::ClusterReport;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(v) => Some(v as f64),
            Value::Real(v) => Some(v),
            Value::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => v.fmt(f),
            Value::Real(v) => v.fmt(f),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

/// One `scenario,n,seed,metric,value` row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub n: usize,
    pub seed: u64,
    pub metric: String,
    pub value: Value,
}

impl ResultRow {
    fn sort_key(&self) -> (&str, usize, u64, &str) {
        (&self.scenario, self.n, self.seed, &self.metric)
    }
}

/// Sorts rows into `(scenario, n, seed, metric)` order.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn write_rows<W: io::Write>(out: W, rows: &[ResultRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "n", "seed", "metric", "value"])?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.n.to_string(),
            r.seed.to_string(),
            r.metric.clone(),
            r.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the event log. The header depends on the protocol: street logs use
/// `tick,robot,event,counter`, feedback logs `tick,robot,role,event,scout_id`,
/// everything else `tick,robot,event,value`.
pub fn write_events<W: io::Write>(out: W, protocol: &str, events: &[Event]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match protocol {
        "street" => w.write_record(["tick", "robot", "event", "counter"])?,
        "feedback" => w.write_record(["tick", "robot", "role", "event", "scout_id"])?,
        _ => w.write_record(["tick", "robot", "event", "value"])?,
    }
    for e in events {
        let tick = e.tick.to_string();
        let robot = e.robot.to_string();
        match e.detail {
            EventDetail::Street(s) => {
                w.write_record([tick, robot, s.kind.to_string(), s.counter.to_string()])?
            }
            EventDetail::Feedback(f) => w.write_record([
                tick,
                robot,
                f.role.as_str().to_string(),
                f.kind.to_string(),
                f.scout.to_string(),
            ])?,
            EventDetail::Local { kind, value } => {
                w.write_record([tick, robot, kind.to_string(), value.to_string()])?
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One `tick,component_index,size,label` row per component.
pub fn write_clusters<W: io::Write>(out: W, snapshots: &[(u64, ClusterReport)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tick", "component_index", "size", "label"])?;
    for (tick, report) in snapshots {
        for (k, (part, label)) in report.iter().enumerate() {
            w.write_record([
                tick.to_string(),
                k.to_string(),
                part.len().to_string(),
                label.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
