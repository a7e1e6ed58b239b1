//! Fleet-size selection: choose the subset of drones to fly and which
//! drone serves each building, trading per-drone delivery cost against a
//! fixed charge per active drone.

use std::collections::{BTreeMap, HashMap};

use super::{extract_tour, weighted_geometric_median};
use crate::environment::Scenario;
use crate::{Error, Point, Result};

/// Exhaustive subset search bound.
pub const MAX_FLEET_DRONES: usize = 16;

/// Cost of one drone serving a set of buildings.
pub trait DeliveryCostEvaluator {
    fn drone_cost(&self, scenario: &Scenario, drone: usize, buildings: &[usize]) -> f64;
}

impl<F> DeliveryCostEvaluator for F
where
    F: Fn(&Scenario, usize, &[usize]) -> f64,
{
    fn drone_cost(&self, scenario: &Scenario, drone: usize, buildings: &[usize]) -> f64 {
        self(scenario, drone, buildings)
    }
}

/// Sum of the assigned buildings' delivery costs, independent of geometry.
#[derive(Debug, Clone, Copy, Default)]
pub struct IndicatorCost;

impl DeliveryCostEvaluator for IndicatorCost {
    fn drone_cost(&self, scenario: &Scenario, _drone: usize, buildings: &[usize]) -> f64 {
        buildings.iter().map(|&j| scenario.buildings[j].cost).sum()
    }
}

/// Cost-weighted straight-line distance from the drone's start to each
/// assigned building.
#[derive(Debug, Clone, Copy, Default)]
pub struct StartDistanceCost;

impl DeliveryCostEvaluator for StartDistanceCost {
    fn drone_cost(&self, scenario: &Scenario, drone: usize, buildings: &[usize]) -> f64 {
        let start = scenario.drone_starts[drone];
        buildings
            .iter()
            .map(|&j| {
                let b = &scenario.buildings[j];
                b.cost * (start - b.position).norm()
            })
            .sum()
    }
}

/// Default evaluator: the converged final-state delivery cost of a drone
/// serving only its assigned buildings (their cost-weighted geometric
/// median) plus the straight-line transit from the drone's start to that
/// median.
#[derive(Debug, Clone, Copy, Default)]
pub struct MedianTransitCost;

impl DeliveryCostEvaluator for MedianTransitCost {
    fn drone_cost(&self, scenario: &Scenario, drone: usize, buildings: &[usize]) -> f64 {
        let pts: Vec<(Point, f64)> = buildings
            .iter()
            .map(|&j| (scenario.buildings[j].position, scenario.buildings[j].cost))
            .collect();
        let Some(median) = weighted_geometric_median(&pts) else {
            return 0.0;
        };
        let delivery: f64 = pts.iter().map(|(p, w)| w * (median - p).norm()).sum();
        delivery + (median - scenario.drone_starts[drone]).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetPlan {
    /// Ascending drone indices.
    pub active_drones: Vec<usize>,
    /// `assignment[j]` is the drone delivering to building `j`.
    pub assignment: Vec<usize>,
    pub objective: f64,
    /// Visit order for each active drone (building indices).
    pub per_drone_tours: BTreeMap<usize, Vec<usize>>,
}

impl FleetPlan {
    pub fn buildings_of(&self, drone: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == drone)
            .map(|(j, _)| j)
            .collect()
    }
}

/// One row of the exhaustive subset table.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetObjective {
    pub subset: Vec<usize>,
    pub assignment: Vec<usize>,
    pub delivery: f64,
    pub objective: f64,
}

/// Assigns each building to the drone in `subset` whose start is nearest;
/// exact ties go to the lower drone index.
pub fn nearest_assignment(scenario: &Scenario, subset: &[usize]) -> Vec<usize> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    scenario
        .buildings
        .iter()
        .map(|b| {
            let mut best = sorted[0];
            let mut best_d = (scenario.drone_starts[best] - b.position).norm();
            for &i in &sorted[1..] {
                let d = (scenario.drone_starts[i] - b.position).norm();
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

fn check_size(scenario: &Scenario) -> Result<()> {
    if scenario.buildings.is_empty() {
        return Err(Error::NoBuildings);
    }
    let n = scenario.num_drones();
    if n == 0 || n > MAX_FLEET_DRONES {
        return Err(Error::TooManyDrones {
            got: n,
            max: MAX_FLEET_DRONES,
        });
    }
    Ok(())
}

/// Objective of every non-empty drone subset, in bitmask order.
pub fn subset_objectives(
    scenario: &Scenario,
    lambda_fleet: f64,
    evaluator: &dyn DeliveryCostEvaluator,
) -> Result<Vec<SubsetObjective>> {
    check_size(scenario)?;
    let n = scenario.num_drones();
    let mut cache: HashMap<(usize, Vec<usize>), f64> = HashMap::new();
    let mut rows = Vec::with_capacity((1usize << n) - 1);

    for mask in 1u32..(1u32 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let assignment = nearest_assignment(scenario, &subset);
        let mut delivery = 0.0;
        for &i in &subset {
            let mine: Vec<usize> = (0..assignment.len()).filter(|&j| assignment[j] == i).collect();
            let cost = *cache
                .entry((i, mine))
                .or_insert_with_key(|(i, mine)| evaluator.drone_cost(scenario, *i, mine));
            delivery += cost;
        }
        let objective = delivery + lambda_fleet * subset.len() as f64;
        rows.push(SubsetObjective {
            subset,
            assignment,
            delivery,
            objective,
        });
    }
    Ok(rows)
}

/// Picks the drone subset minimizing `Σ_{i∈S} cost_i(assigned_i) + λ·|S|`
/// over all non-empty subsets, with nearest-start assignment inside each
/// subset. Ties prefer fewer drones, then the lexicographically smaller
/// subset.
pub fn select_fleet(
    scenario: &Scenario,
    lambda_fleet: f64,
    evaluator: &dyn DeliveryCostEvaluator,
) -> Result<FleetPlan> {
    let rows = subset_objectives(scenario, lambda_fleet, evaluator)?;
    let best = rows
        .into_iter()
        .min_by(|a, b| {
            a.objective
                .total_cmp(&b.objective)
                .then(a.subset.len().cmp(&b.subset.len()))
                .then_with(|| a.subset.cmp(&b.subset))
        })
        .expect("at least one subset");

    let mut plan = FleetPlan {
        active_drones: best.subset,
        assignment: best.assignment,
        objective: best.objective,
        per_drone_tours: BTreeMap::new(),
    };
    plan.per_drone_tours = extract_tour(&plan, scenario);
    Ok(plan)
}
