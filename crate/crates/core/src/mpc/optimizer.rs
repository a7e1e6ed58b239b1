use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{reduced_control_gradient, rollout, total_cost, CostBreakdown, DroneTrajectory, GradientDiagnostics};
use crate::environment::{ensure_valid, Scenario};
use crate::{Error, Point, Result};

/// Amplitude of the uniform noise added to the initial (zero) controls.
pub const INIT_NOISE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Step size α, in `[0, 1]`.
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop once `|J_t - J_{t-1}|` drops below this.
    pub convergence_epsilon: f64,
    pub lambda_ctrl: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn for_scenario(scenario: &Scenario) -> Self {
        Self {
            lambda_ctrl: scenario.lambda,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.learning_rate) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} outside [0, 1]",
                self.learning_rate
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if self.convergence_epsilon.is_nan() || self.convergence_epsilon < 0.0 {
            return Err(Error::InvalidConfig("convergence epsilon must be non-negative".into()));
        }
        if !(self.lambda_ctrl >= 0.0 && self.lambda_ctrl.is_finite()) {
            return Err(Error::InvalidConfig(
                "lambda_ctrl must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            max_iterations: 20_000,
            convergence_epsilon: 1e-6,
            lambda_ctrl: 0.0,
            seed: 0,
        }
    }
}

/// A final state closer than d_min to a zone centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneViolation {
    pub drone: usize,
    pub t: usize,
    pub zone: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub trajectories: Vec<DroneTrajectory>,
    pub cost_history: Vec<CostBreakdown>,
    pub final_cost: CostBreakdown,
    pub iterations_used: usize,
    pub converged: bool,
    /// Non-differentiable points met during descent, summed over iterations.
    pub gradient_events: GradientDiagnostics,
    /// Keep-out breaches left in the final trajectories (the zone term is a
    /// soft penalty, so these can remain).
    pub zone_violations: Vec<ZoneViolation>,
}

fn initial_controls(scenario: &Scenario, rng: &mut ChaCha8Rng) -> Vec<Vec<Point>> {
    (0..scenario.num_drones())
        .map(|_| {
            (0..scenario.horizon)
                .map(|_| {
                    let x = rng.random_range(-INIT_NOISE..=INIT_NOISE);
                    let y = rng.random_range(-INIT_NOISE..=INIT_NOISE);
                    Point::new(x, y)
                })
                .collect()
        })
        .collect()
}

fn roll_all(scenario: &Scenario, controls: &[Vec<Point>]) -> Vec<DroneTrajectory> {
    scenario
        .drone_starts
        .iter()
        .zip(controls)
        .map(|(x0, u)| rollout(&scenario.a, &scenario.b, *x0, u))
        .collect()
}

fn zone_violations(scenario: &Scenario, trajectories: &[DroneTrajectory]) -> Vec<ZoneViolation> {
    let mut out = Vec::new();
    for (drone, traj) in trajectories.iter().enumerate() {
        for (t, x) in traj.states.iter().enumerate().skip(1) {
            for (zone, z) in scenario.zones.iter().enumerate() {
                let distance = (x - z.position).norm();
                if distance < scenario.d_min {
                    out.push(ZoneViolation {
                        drone,
                        t,
                        zone,
                        distance,
                    });
                }
            }
        }
    }
    out
}

/// Runs the descent loop: evaluate the three cost terms, step every control
/// along the gradient of the total cost taken through the dynamics, and
/// re-roll the states so the dynamics hold exactly at every iterate.
///
/// The loop ends when the cost is exactly zero, when successive totals
/// differ by less than `convergence_epsilon`, or after `max_iterations`
/// cost evaluations. A non-finite cost is reported as [`Error::Diverged`].
pub fn optimize(scenario: &Scenario, config: &OptimizerConfig) -> Result<OptimizationResult> {
    ensure_valid(scenario)?;
    config.check()?;

    // Zero controls that already achieve J = 0 cannot be improved on.
    let still = roll_all(
        scenario,
        &vec![vec![Point::zeros(); scenario.horizon]; scenario.num_drones()],
    );
    let at_rest = total_cost(scenario, &still, config.lambda_ctrl);
    if at_rest.total == 0.0 {
        return Ok(OptimizationResult {
            zone_violations: zone_violations(scenario, &still),
            trajectories: still,
            cost_history: vec![at_rest],
            final_cost: at_rest,
            iterations_used: 1,
            converged: true,
            gradient_events: GradientDiagnostics::default(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut controls = initial_controls(scenario, &mut rng);
    let mut trajectories = roll_all(scenario, &controls);
    let mut history: Vec<CostBreakdown> = Vec::new();
    let mut events = GradientDiagnostics::default();
    let mut converged = false;

    for iteration in 1..=config.max_iterations {
        let cost = total_cost(scenario, &trajectories, config.lambda_ctrl);
        if !cost.total.is_finite() {
            return Err(Error::Diverged {
                iteration,
                last_finite: history.last().map_or(f64::NAN, |c| c.total),
            });
        }
        history.push(cost);
        if cost.total == 0.0 {
            converged = true;
            break;
        }
        if let [.., prev, last] = history.as_slice() {
            if (last.total - prev.total).abs() < config.convergence_epsilon {
                converged = true;
                break;
            }
        }
        if iteration == config.max_iterations {
            break;
        }

        let (grads, diag) = reduced_control_gradient(scenario, &trajectories, config.lambda_ctrl);
        events.building_coincidences += diag.building_coincidences;
        events.zone_coincidences += diag.zone_coincidences;
        for (u, g) in controls.iter_mut().zip(&grads) {
            for (ut, gt) in u.iter_mut().zip(g) {
                *ut -= gt * config.learning_rate;
            }
        }
        trajectories = roll_all(scenario, &controls);
    }

    let final_cost = *history.last().expect("at least one evaluation");
    Ok(OptimizationResult {
        zone_violations: zone_violations(scenario, &trajectories),
        iterations_used: history.len(),
        trajectories,
        cost_history: history,
        final_cost,
        converged,
        gradient_events: events,
    })
}

/// Halves `config.learning_rate` until a full run is finite, converges
/// within `config.max_iterations`, and has non-increasing totals (within
/// `tolerance`) over its first `probe_iterations`. Returns the rate with its
/// run, or `None` once the rate drops below `min_rate`.
pub fn find_stable_learning_rate(
    scenario: &Scenario,
    config: &OptimizerConfig,
    probe_iterations: usize,
    tolerance: f64,
    min_rate: f64,
) -> Option<(f64, OptimizationResult)> {
    let mut rate = config.learning_rate;
    while rate >= min_rate {
        let trial = OptimizerConfig {
            learning_rate: rate,
            ..config.clone()
        };
        if let Ok(result) = optimize(scenario, &trial) {
            let head = &result.cost_history[..result.cost_history.len().min(probe_iterations + 1)];
            let monotone = head.windows(2).all(|w| w[1].total <= w[0].total + tolerance);
            if monotone && result.converged {
                return Some((rate, result));
            }
        }
        rate *= 0.5;
    }
    None
}
