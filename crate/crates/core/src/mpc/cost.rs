use super::DroneTrajectory;
use crate::environment::{Building, RestrictedZone, Scenario};

/// The three trajectory cost terms and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub delivery: f64,
    pub restricted: f64,
    pub penalty: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(delivery: f64, restricted: f64, penalty: f64) -> Self {
        Self {
            delivery,
            restricted,
            penalty,
            total: delivery + restricted + penalty,
        }
    }
}

/// Cost-weighted distance from each drone's final state to every building.
pub fn delivery_cost(trajectories: &[DroneTrajectory], buildings: &[Building]) -> f64 {
    let mut sum = 0.0;
    for traj in trajectories {
        let end = traj.final_state();
        for b in buildings {
            sum += b.cost * (end - b.position).norm();
        }
    }
    sum
}

/// Hinge penalty `max(d_min - dist, 0)` over drones, steps `1..=N`, and
/// zones. The start state is not charged.
pub fn restricted_cost(trajectories: &[DroneTrajectory], zones: &[RestrictedZone], d_min: f64) -> f64 {
    let mut sum = 0.0;
    for traj in trajectories {
        for x in &traj.states[1..] {
            for z in zones {
                let gap = d_min - (x - z.position).norm();
                if gap > 0.0 {
                    sum += gap;
                }
            }
        }
    }
    sum
}

/// `λ Σ_i Σ_{t=1}^{N-1} |u_i(t)|²`. The first control `u_i(0)` is not in
/// the sum.
pub fn control_penalty(trajectories: &[DroneTrajectory], lambda_ctrl: f64) -> f64 {
    let mut sum = 0.0;
    for traj in trajectories {
        for u in traj.controls.iter().skip(1) {
            sum += u.norm_squared();
        }
    }
    lambda_ctrl * sum
}

pub fn total_cost(scenario: &Scenario, trajectories: &[DroneTrajectory], lambda_ctrl: f64) -> CostBreakdown {
    CostBreakdown::new(
        delivery_cost(trajectories, &scenario.buildings),
        restricted_cost(trajectories, &scenario.zones, scenario.d_min),
        control_penalty(trajectories, lambda_ctrl),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{builtin_scenario, BuildingKind, ScenarioId};
    use crate::mpc::rollout;
    use crate::{Mat2, Point};

    fn still(x: f64, y: f64, n: usize) -> DroneTrajectory {
        rollout(
            &Mat2::identity(),
            &Mat2::identity(),
            Point::new(x, y),
            &vec![Point::zeros(); n],
        )
    }

    fn home(x: f64, y: f64, c: f64) -> Building {
        Building::new(x, y, BuildingKind::Home, c)
    }

    #[test]
    fn delivery_examples() {
        assert_eq!(delivery_cost(&[still(3., 4., 2)], &[home(0., 0., 1.)]), 5.0);
        assert_eq!(delivery_cost(&[still(3., 4., 2)], &[home(3., 4., 1.)]), 0.0);
        let two = [still(0., 0., 1), still(1., 0., 1)];
        let bs = [home(0., 0., 2.), home(1., 0., 1.5)];
        assert_eq!(delivery_cost(&two, &bs), 3.5);
    }

    #[test]
    fn restricted_examples() {
        let i = Mat2::identity();
        // Passes 0.4 from the zone at t = 1 only.
        let t = rollout(&i, &i, Point::new(-3., 0.), &[Point::new(3., 0.4), Point::new(-3., 0.)]);
        let zone = [RestrictedZone::new(0., 0.)];
        assert!((restricted_cost(&[t], &zone, 1.0) - 0.6).abs() < 1e-12);
        assert_eq!(restricted_cost(&[still(5., 5., 4)], &zone, 1.0), 0.0);

        // Sits on the zone for t = 1..3; the start is not charged.
        assert_eq!(restricted_cost(&[still(0., 0., 3)], &zone, 1.0), 3.0);
    }

    #[test]
    fn penalty_examples() {
        let i = Mat2::identity();
        let t = rollout(&i, &i, Point::zeros(), &[Point::new(7., 7.), Point::new(3., 4.)]);
        assert_eq!(control_penalty(std::slice::from_ref(&t), 1.0), 25.0);
        assert_eq!(control_penalty(&[t], 0.0), 0.0);
        let ones = vec![Point::new(1., 1.); 3];
        let d = rollout(&i, &i, Point::zeros(), &ones);
        assert_eq!(control_penalty(&[d.clone(), d], 0.5), 4.0);
    }

    #[test]
    fn total_is_sum_of_parts() {
        let c = CostBreakdown::new(5.0, 0.6, 25.0);
        assert_eq!(c.total, 30.6);

        let s = crate::environment::Scenario {
            name: "zero".into(),
            buildings: vec![home(1., 1., 3.)],
            zones: vec![RestrictedZone::new(9., 9.)],
            d_min: 1.0,
            drone_starts: vec![Point::new(1., 1.)],
            a: Mat2::identity(),
            b: Mat2::identity(),
            horizon: 4,
            lambda: 0.0,
        };
        let c = total_cost(&s, &[still(1., 1., 4)], 0.0);
        assert_eq!(
            c,
            CostBreakdown {
                delivery: 0.0,
                restricted: 0.0,
                penalty: 0.0,
                total: 0.0
            }
        );
    }

    #[test]
    fn env1_stationary_matches_loops() {
        let s = builtin_scenario(ScenarioId::Env1);
        let trajs: Vec<_> = s.drone_starts.iter().map(|p| still(p.x, p.y, s.horizon)).collect();
        let c = total_cost(&s, &trajs, s.lambda);

        let mut delivery = 0.0;
        let mut restricted = 0.0;
        for p in &s.drone_starts {
            for b in &s.buildings {
                let (dx, dy) = (p.x - b.position.x, p.y - b.position.y);
                delivery += b.cost * (dx * dx + dy * dy).sqrt();
            }
            for z in &s.zones {
                let (dx, dy) = (p.x - z.position.x, p.y - z.position.y);
                let gap = s.d_min - (dx * dx + dy * dy).sqrt();
                restricted += s.horizon as f64 * gap.max(0.0);
            }
        }
        assert!((c.delivery - delivery).abs() <= 1e-12 * delivery);
        // (1,1) sits exactly d_min from zone (1,2); no start is strictly inside.
        assert_eq!(restricted, 0.0);
        assert_eq!(c.restricted, 0.0);
        assert_eq!(c.penalty, 0.0);
        assert_eq!(c.total, c.delivery);
    }
}
