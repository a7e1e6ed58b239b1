//! Analytic gradients of the total trajectory cost.
//!
//! [`grad_total_cost`] treats every state and control as an independent
//! variable. [`reduced_control_gradient`] differentiates through the
//! dynamics instead (states are functions of the controls), which is the
//! direction the optimizer descends along.

use super::DroneTrajectory;
use crate::environment::Scenario;
use crate::Point;

/// Counts of points where a norm was not differentiable and the zero
/// subgradient was used instead.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GradientDiagnostics {
    /// A final state exactly on a building.
    pub building_coincidences: usize,
    /// A state exactly on a zone centre while d_min > 0.
    pub zone_coincidences: usize,
}

impl GradientDiagnostics {
    pub fn any(&self) -> bool {
        self.building_coincidences + self.zone_coincidences > 0
    }

    fn absorb(&mut self, other: GradientDiagnostics) {
        self.building_coincidences += other.building_coincidences;
        self.zone_coincidences += other.zone_coincidences;
    }
}

/// Per-drone partial derivatives. `states[i][0]` is always zero because the
/// start state is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub states: Vec<Vec<Point>>,
    pub controls: Vec<Vec<Point>>,
    pub diagnostics: GradientDiagnostics,
}

fn state_partials(scenario: &Scenario, traj: &DroneTrajectory, diag: &mut GradientDiagnostics) -> Vec<Point> {
    let n = traj.horizon();
    let mut g = vec![Point::zeros(); n + 1];

    let end = traj.final_state();
    for b in &scenario.buildings {
        let diff = end - b.position;
        let dist = diff.norm();
        if dist > 0.0 {
            g[n] += diff * (b.cost / dist);
        } else {
            diag.building_coincidences += 1;
        }
    }

    for (t, x) in traj.states.iter().enumerate().skip(1) {
        for z in &scenario.zones {
            let diff = x - z.position;
            let dist = diff.norm();
            if dist < scenario.d_min {
                if dist > 0.0 {
                    g[t] -= diff / dist;
                } else {
                    diag.zone_coincidences += 1;
                }
            }
        }
    }
    g
}

fn control_partials(traj: &DroneTrajectory, lambda_ctrl: f64) -> Vec<Point> {
    traj.controls
        .iter()
        .enumerate()
        .map(|(t, u)| {
            if t == 0 {
                Point::zeros()
            } else {
                u * (2.0 * lambda_ctrl)
            }
        })
        .collect()
}

pub fn grad_total_cost(scenario: &Scenario, trajectories: &[DroneTrajectory], lambda_ctrl: f64) -> Gradients {
    let mut diagnostics = GradientDiagnostics::default();
    let mut states = Vec::with_capacity(trajectories.len());
    let mut controls = Vec::with_capacity(trajectories.len());
    for traj in trajectories {
        states.push(state_partials(scenario, traj, &mut diagnostics));
        controls.push(control_partials(traj, lambda_ctrl));
    }
    Gradients {
        states,
        controls,
        diagnostics,
    }
}

/// Gradient of the cost with respect to each control when the states are
/// the rollout of those controls.
///
/// Uses the adjoint recursion `p(N) = ∂J/∂x(N)`,
/// `p(t) = ∂J/∂x(t) + A·p(t+1)`, and `dJ/du(t) = ∂J/∂u(t) + B·p(t+1)`.
pub fn reduced_control_gradient(
    scenario: &Scenario,
    trajectories: &[DroneTrajectory],
    lambda_ctrl: f64,
) -> (Vec<Vec<Point>>, GradientDiagnostics) {
    let partial = grad_total_cost(scenario, trajectories, lambda_ctrl);
    let mut diagnostics = GradientDiagnostics::default();
    diagnostics.absorb(partial.diagnostics);

    let out = partial
        .states
        .iter()
        .zip(&partial.controls)
        .map(|(gx, gu)| {
            let n = gu.len();
            let mut reduced = vec![Point::zeros(); n];
            let mut adjoint = gx[n];
            for t in (0..n).rev() {
                reduced[t] = gu[t] + scenario.b * adjoint;
                if t > 0 {
                    adjoint = gx[t] + scenario.a * adjoint;
                }
            }
            reduced
        })
        .collect();
    (out, diagnostics)
}
