use super::{Building, BuildingKind, RestrictedZone, Scenario, ScenarioId};
use crate::{Mat2, Point};

const HOME_COST: f64 = 1.0;
const OFFICE_COST: f64 = 2.0;
const SHOP_COST: f64 = 1.5;

const ENV1_HOMES: [(f64, f64); 5] = [(2., 3.), (5., 7.), (9., 2.), (12., 5.), (15., 8.)];
const ENV1_OFFICES: [(f64, f64); 4] = [(8., 6.), (3., 8.), (10., 10.), (14., 3.)];
const ENV1_SHOPS: [(f64, f64); 4] = [(4., 5.), (7., 4.), (11., 7.), (13., 6.)];
const ENV1_ZONES: [(f64, f64); 6] = [(3., 4.), (6., 6.), (1., 2.), (7., 3.), (10., 5.), (12., 9.)];

const ENV2_HOMES: [(f64, f64); 9] = [
    (2., 3.),
    (5., 7.),
    (9., 2.),
    (12., 5.),
    (15., 8.),
    (18., 10.),
    (20., 4.),
    (22., 7.),
    (25., 9.),
];
const ENV2_OFFICES: [(f64, f64); 8] = [
    (8., 6.),
    (3., 8.),
    (10., 10.),
    (14., 3.),
    (17., 5.),
    (19., 8.),
    (21., 2.),
    (24., 6.),
];
const ENV2_SHOPS: [(f64, f64); 8] = [
    (4., 5.),
    (7., 4.),
    (11., 7.),
    (13., 6.),
    (16., 9.),
    (20., 3.),
    (23., 5.),
    (26., 8.),
];
const ENV2_ZONES: [(f64, f64); 17] = [
    (3., 4.),
    (6., 6.),
    (1., 2.),
    (7., 3.),
    (10., 5.),
    (12., 9.),
    (15., 2.),
    (18., 7.),
    (20., 5.),
    (22., 3.),
    (24., 8.),
    (26., 4.),
    (28., 6.),
    (30., 3.),
    (32., 7.),
    (34., 5.),
    (36., 9.),
];

fn buildings(homes: &[(f64, f64)], offices: &[(f64, f64)], shops: &[(f64, f64)]) -> Vec<Building> {
    let tag = |list: &[(f64, f64)], kind, cost| {
        list.iter()
            .map(move |&(x, y)| Building::new(x, y, kind, cost))
            .collect::<Vec<_>>()
    };
    let mut out = tag(homes, BuildingKind::Home, HOME_COST);
    out.extend(tag(offices, BuildingKind::Office, OFFICE_COST));
    out.extend(tag(shops, BuildingKind::Shop, SHOP_COST));
    out
}

fn diagonal_starts(n: usize) -> Vec<Point> {
    (0..n).map(|i| Point::new(i as f64, i as f64)).collect()
}

/// Returns one of the two built-in delivery environments.
///
/// `env1` is the small world (13 buildings, 6 zones, 3 drones, N = 20,
/// λ = 30); `env2` extends it to 25 buildings, 17 zones, 5 drones with
/// N = 30 and λ = 10. Both use identity system matrices and d_min = 1.
pub fn builtin_scenario(id: ScenarioId) -> Scenario {
    match id {
        ScenarioId::Env1 => Scenario {
            name: "env1".into(),
            buildings: buildings(&ENV1_HOMES, &ENV1_OFFICES, &ENV1_SHOPS),
            zones: ENV1_ZONES.iter().map(|&(x, y)| RestrictedZone::new(x, y)).collect(),
            d_min: 1.0,
            drone_starts: diagonal_starts(3),
            a: Mat2::identity(),
            b: Mat2::identity(),
            horizon: 20,
            lambda: 30.0,
        },
        ScenarioId::Env2 => Scenario {
            name: "env2".into(),
            buildings: buildings(&ENV2_HOMES, &ENV2_OFFICES, &ENV2_SHOPS),
            zones: ENV2_ZONES.iter().map(|&(x, y)| RestrictedZone::new(x, y)).collect(),
            d_min: 1.0,
            drone_starts: diagonal_starts(5),
            a: Mat2::identity(),
            b: Mat2::identity(),
            horizon: 30,
            lambda: 10.0,
        },
    }
}
