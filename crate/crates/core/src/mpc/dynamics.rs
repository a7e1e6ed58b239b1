use crate::{Mat2, Point};

/// State and control sequences of one drone over the horizon.
///
/// `states` has one more entry than `controls`: `states[0]` is the start
/// and `states[t + 1]` follows from `states[t]` and `controls[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DroneTrajectory {
    pub states: Vec<Point>,
    pub controls: Vec<Point>,
}

impl DroneTrajectory {
    pub fn horizon(&self) -> usize {
        self.controls.len()
    }

    pub fn start(&self) -> Point {
        self.states[0]
    }

    pub fn final_state(&self) -> Point {
        *self.states.last().expect("trajectory has at least one state")
    }
}

/// One step of the discrete dynamics, `Aᵀx + Bᵀu`. The transposes are
/// deliberate and only matter for asymmetric matrices.
pub fn step_dynamics(a: &Mat2, b: &Mat2, x: &Point, u: &Point) -> Point {
    a.transpose() * x + b.transpose() * u
}

/// Integrates `controls` forward from `x0`.
pub fn rollout(a: &Mat2, b: &Mat2, x0: Point, controls: &[Point]) -> DroneTrajectory {
    let mut states = Vec::with_capacity(controls.len() + 1);
    states.push(x0);
    let mut x = x0;
    for u in controls {
        x = step_dynamics(a, b, &x, u);
        states.push(x);
    }
    DroneTrajectory {
        states,
        controls: controls.to_vec(),
    }
}
