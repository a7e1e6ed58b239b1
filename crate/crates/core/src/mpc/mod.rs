//! Gradient-based model predictive control for the delivery fleet: drone
//! dynamics, the three-term trajectory cost with its gradients, the descent
//! loop, fleet-size selection, and visit-order extraction.

mod cost;
mod dynamics;
pub mod export;
mod fleet;
mod gradient;
mod median;
mod optimizer;
mod tour;

pub use cost::{control_penalty, delivery_cost, restricted_cost, total_cost, CostBreakdown};
pub use dynamics::{rollout, step_dynamics, DroneTrajectory};
pub use fleet::{
    nearest_assignment, select_fleet, subset_objectives, DeliveryCostEvaluator, FleetPlan, IndicatorCost,
    MedianTransitCost, StartDistanceCost, SubsetObjective, MAX_FLEET_DRONES,
};
pub use gradient::{grad_total_cost, reduced_control_gradient, GradientDiagnostics, Gradients};
pub use median::weighted_geometric_median;
pub use optimizer::{find_stable_learning_rate, optimize, OptimizationResult, OptimizerConfig, ZoneViolation};
pub use tour::extract_tour;
