//! Delivery scenario data model, the two built-in grid worlds, and
//! validation.

mod builtin;
mod file;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Mat2, Point};

pub use builtin::builtin_scenario;
pub use file::{load_scenario, save_scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildingKind {
    Home,
    Office,
    Shop,
    Custom,
}

impl BuildingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BuildingKind::Home => "home",
            BuildingKind::Office => "office",
            BuildingKind::Shop => "shop",
            BuildingKind::Custom => "custom",
        }
    }
}

impl fmt::Display for BuildingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A delivery target. `kind` is descriptive only; every cost computation
/// reads `cost`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Building {
    pub position: Point,
    pub kind: BuildingKind,
    pub cost: f64,
}

impl Building {
    pub fn new(x: f64, y: f64, kind: BuildingKind, cost: f64) -> Self {
        Self {
            position: Point::new(x, y),
            kind,
            cost,
        }
    }
}

/// Centre of a keep-out disc whose radius is the scenario-wide `d_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedZone {
    pub position: Point,
}

impl RestrictedZone {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            position: Point::new(x, y),
        }
    }
}

/// A complete delivery problem. Building and zone order is significant:
/// assignments and masks refer to entries by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub buildings: Vec<Building>,
    pub zones: Vec<RestrictedZone>,
    pub d_min: f64,
    pub drone_starts: Vec<Point>,
    pub a: Mat2,
    pub b: Mat2,
    pub horizon: usize,
    pub lambda: f64,
}

impl Scenario {
    pub fn num_drones(&self) -> usize {
        self.drone_starts.len()
    }

    pub fn total_building_cost(&self) -> f64 {
        self.buildings.iter().map(|b| b.cost).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    Env1,
    Env2,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 2] = [ScenarioId::Env1, ScenarioId::Env2];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::Env1 => "env1",
            ScenarioId::Env2 => "env2",
        }
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "env1" => Ok(ScenarioId::Env1),
            "env2" => Ok(ScenarioId::Env2),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One broken scenario invariant, naming the field (and index) at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn finite(p: &Point) -> bool {
    p.x.is_finite() && p.y.is_finite()
}

/// Checks every scenario invariant. An empty result means the scenario is
/// usable by the optimizer and the trainers.
pub fn validate(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();

    if s.buildings.is_empty() {
        out.push(Violation::new("buildings", "at least one building is required"));
    }
    if s.drone_starts.is_empty() {
        out.push(Violation::new("drone_starts", "at least one drone is required"));
    }
    if s.horizon == 0 {
        out.push(Violation::new("horizon", "horizon must be at least 1"));
    }
    if !(s.d_min.is_finite() && s.d_min >= 0.0) {
        out.push(Violation::new(
            "d_min",
            format!("{} is not a finite non-negative distance", s.d_min),
        ));
    }
    if !(s.lambda.is_finite() && s.lambda >= 0.0) {
        out.push(Violation::new(
            "lambda",
            format!("{} is not a finite non-negative weight", s.lambda),
        ));
    }
    if s.a.iter().any(|v| !v.is_finite()) {
        out.push(Violation::new("A", "matrix entries must be finite"));
    }
    if s.b.iter().any(|v| !v.is_finite()) {
        out.push(Violation::new("B", "matrix entries must be finite"));
    }

    for (j, b) in s.buildings.iter().enumerate() {
        if !finite(&b.position) {
            out.push(Violation::new(
                format!("buildings[{j}].position"),
                "coordinates must be finite",
            ));
        }
        if !(b.cost >= 0.0 && b.cost.is_finite()) {
            out.push(Violation::new(
                format!("buildings[{j}].cost"),
                format!("cost {} must be finite and non-negative", b.cost),
            ));
        }
    }
    for (k, z) in s.zones.iter().enumerate() {
        if !finite(&z.position) {
            out.push(Violation::new(format!("zones[{k}]"), "coordinates must be finite"));
        }
    }
    for (i, start) in s.drone_starts.iter().enumerate() {
        if !finite(start) {
            out.push(Violation::new(
                format!("drone_starts[{i}]"),
                "coordinates must be finite",
            ));
            continue;
        }
        for (k, z) in s.zones.iter().enumerate() {
            let dist = (start - z.position).norm();
            if dist < s.d_min {
                out.push(Violation::new(
                    format!("drone_starts[{i}]"),
                    format!(
                        "start ({}, {}) is {dist} from zones[{k}], inside d_min = {}",
                        start.x, start.y, s.d_min
                    ),
                ));
            }
        }
    }
    out
}

/// Fails with [`Error::InvalidScenario`] when `validate` reports anything.
pub fn ensure_valid(s: &Scenario) -> crate::Result<()> {
    let v = validate(s);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidScenario(v.iter().map(|v| v.to_string()).collect()))
    }
}
