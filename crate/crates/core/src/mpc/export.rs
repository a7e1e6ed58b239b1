//! CSV renderings of optimizer output and fleet plans.

use super::{FleetPlan, OptimizationResult};
use crate::environment::Scenario;
use crate::io::csv_string as finish;
use crate::Result;

/// `iteration,J_delivery,J_restricted,J_penalty,J_total`, iterations from 1.
pub fn cost_history_csv(result: &OptimizationResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "J_delivery", "J_restricted", "J_penalty", "J_total"])?;
    for (k, c) in result.cost_history.iter().enumerate() {
        w.write_record([
            (k + 1).to_string(),
            c.delivery.to_string(),
            c.restricted.to_string(),
            c.penalty.to_string(),
            c.total.to_string(),
        ])?;
    }
    finish(w)
}

/// `drone,t,x,y,u_x,u_y`; the control columns are empty at `t = N`.
pub fn trajectory_csv(result: &OptimizationResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["drone", "t", "x", "y", "u_x", "u_y"])?;
    for (i, traj) in result.trajectories.iter().enumerate() {
        for (t, x) in traj.states.iter().enumerate() {
            let (ux, uy) = match traj.controls.get(t) {
                Some(u) => (u.x.to_string(), u.y.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([i.to_string(), t.to_string(), x.x.to_string(), x.y.to_string(), ux, uy])?;
        }
    }
    finish(w)
}

/// `drone,visit_order,building_x,building_y,kind,cost`, one row per visit.
pub fn fleet_plan_csv(plan: &FleetPlan, scenario: &Scenario) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["drone", "visit_order", "building_x", "building_y", "kind", "cost"])?;
    for (drone, tour) in &plan.per_drone_tours {
        for (k, &j) in tour.iter().enumerate() {
            let b = &scenario.buildings[j];
            w.write_record([
                drone.to_string(),
                k.to_string(),
                b.position.x.to_string(),
                b.position.y.to_string(),
                b.kind.to_string(),
                b.cost.to_string(),
            ])?;
        }
    }
    finish(w)
}
