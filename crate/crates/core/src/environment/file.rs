//! JSON scenario files.
//!
//! ```json
//! {
//!   "name": "demo", "d_min": 1.0, "lambda": 30.0, "horizon": 20,
//!   "A": [[1.0, 0.0], [0.0, 1.0]], "B": [[1.0, 0.0], [0.0, 1.0]],
//!   "drone_starts": [[0.0, 0.0]],
//!   "buildings": [{"x": 2.0, "y": 3.0, "kind": "home", "cost": 1.0}],
//!   "zones": [[3.0, 4.0]]
//! }
//! ```

use serde::{Deserialize, Serialize};

use super::{ensure_valid, Building, BuildingKind, RestrictedZone, Scenario};
use crate::{Error, Mat2, Point, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    d_min: f64,
    lambda: f64,
    horizon: u64,
    #[serde(rename = "A")]
    a: [[f64; 2]; 2],
    #[serde(rename = "B")]
    b: [[f64; 2]; 2],
    drone_starts: Vec<[f64; 2]>,
    buildings: Vec<BuildingEntry>,
    zones: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildingEntry {
    x: f64,
    y: f64,
    kind: BuildingKind,
    cost: f64,
}

fn to_rows(m: &Mat2) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn from_rows(r: [[f64; 2]; 2]) -> Mat2 {
    Mat2::new(r[0][0], r[0][1], r[1][0], r[1][1])
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(idx) => full[..idx].to_string(),
            None => full,
        };
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    })?;
    let horizon = usize::try_from(file.horizon)
        .map_err(|_| Error::InvalidScenario(vec![format!("horizon: {} too large", file.horizon)]))?;
    let scenario = Scenario {
        name: file.name,
        buildings: file
            .buildings
            .into_iter()
            .map(|b| Building::new(b.x, b.y, b.kind, b.cost))
            .collect(),
        zones: file.zones.into_iter().map(|[x, y]| RestrictedZone::new(x, y)).collect(),
        d_min: file.d_min,
        drone_starts: file.drone_starts.into_iter().map(|[x, y]| Point::new(x, y)).collect(),
        a: from_rows(file.a),
        b: from_rows(file.b),
        horizon,
        lambda: file.lambda,
    };
    ensure_valid(&scenario)?;
    Ok(scenario)
}

/// Serializes a scenario as pretty-printed JSON. Floats are written in
/// shortest round-trip form, so `load_scenario(save_scenario(s)) == s`.
pub fn save_scenario(s: &Scenario) -> String {
    let file = ScenarioFile {
        name: s.name.clone(),
        d_min: s.d_min,
        lambda: s.lambda,
        horizon: s.horizon as u64,
        a: to_rows(&s.a),
        b: to_rows(&s.b),
        drone_starts: s.drone_starts.iter().map(|p| [p.x, p.y]).collect(),
        buildings: s
            .buildings
            .iter()
            .map(|b| BuildingEntry {
                x: b.position.x,
                y: b.position.y,
                kind: b.kind,
                cost: b.cost,
            })
            .collect(),
        zones: s.zones.iter().map(|z| [z.position.x, z.position.y]).collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("scenario serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{builtin_scenario, ScenarioId};
    use proptest::prelude::*;

    const MINIMAL: &str = r#"{
        "name": "minimal", "d_min": 1, "lambda": 0, "horizon": 3,
        "A": [[1, 0], [0, 1]], "B": [[1, 0], [0, 1]],
        "drone_starts": [[0, 0]],
        "buildings": [{"x": 1, "y": 2, "kind": "custom", "cost": 0.5}],
        "zones": []
    }"#;

    #[test]
    fn minimal_file() {
        let s = load_scenario(MINIMAL).unwrap();
        assert_eq!(s.buildings.len(), 1);
        assert_eq!(s.zones.len(), 0);
        assert_eq!(s.num_drones(), 1);
        assert_eq!(s.buildings[0].kind, BuildingKind::Custom);
    }

    #[test]
    fn negative_cost_rejected_by_name() {
        let text = MINIMAL.replace("\"cost\": 0.5", "\"cost\": -2");
        let err = load_scenario(&text).unwrap_err();
        assert!(err.to_string().contains("buildings[0].cost"), "{err}");
    }

    #[test]
    fn unknown_key_rejected_with_position() {
        let text = MINIMAL.replace("\"zones\": []", "\"zones\": [], \"wind\": 3");
        match load_scenario(&text).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 6);
                assert!(message.contains("wind"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fractional_horizon_rejected() {
        let text = MINIMAL.replace("\"horizon\": 3", "\"horizon\": 3.5");
        assert!(matches!(load_scenario(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn builtins_round_trip() {
        for id in ScenarioId::ALL {
            let s = builtin_scenario(id);
            let back = load_scenario(&save_scenario(&s)).unwrap();
            assert_eq!(back, s);
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            coords in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6, 0f64..100.0), 1..8),
            a in prop::array::uniform4(-10f64..10.0),
            lambda in 0f64..50.0,
            horizon in 1usize..100,
        ) {
            let s = Scenario {
                name: "prop".into(),
                buildings: coords.iter().map(|&(x, y, c)| Building::new(x, y, BuildingKind::Office, c)).collect(),
                zones: vec![],
                d_min: 0.25,
                drone_starts: vec![Point::new(coords[0].0, coords[0].1)],
                a: Mat2::new(a[0], a[1], a[2], a[3]),
                b: Mat2::identity(),
                horizon,
                lambda,
            };
            let back = load_scenario(&save_scenario(&s)).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
