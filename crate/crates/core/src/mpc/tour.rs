use std::collections::BTreeMap;

use super::FleetPlan;
use crate::environment::Scenario;

/// Nearest-neighbour visit order over each active drone's buildings,
/// starting from the drone's start position. Equidistant candidates go to
/// the lower building index. This is a reporting layer on top of the fleet
/// plan; the trajectory cost itself only looks at final states.
pub fn extract_tour(plan: &FleetPlan, scenario: &Scenario) -> BTreeMap<usize, Vec<usize>> {
    let mut tours = BTreeMap::new();
    for &drone in &plan.active_drones {
        let mut remaining = plan.buildings_of(drone);
        let mut here = scenario.drone_starts[drone];
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let mut pick = 0;
            let mut pick_d = f64::INFINITY;
            for (slot, &j) in remaining.iter().enumerate() {
                let d = (scenario.buildings[j].position - here).norm();
                if d < pick_d {
                    pick = slot;
                    pick_d = d;
                }
            }
            let j = remaining.remove(pick);
            here = scenario.buildings[j].position;
            order.push(j);
        }
        tours.insert(drone, order);
    }
    tours
}
