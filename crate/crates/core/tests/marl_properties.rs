use std::collections::BTreeSet;

use drone_mpc::environment::{builtin_scenario, Building, BuildingKind, ScenarioId};
use drone_mpc::marl::{
    discretize, greedy_rollout, td_loss, train, train_observed, Action, GridBuilding, GridMdp, Method, QTable,
    RewardConfig, StateKey, TrainConfig, TrainingObserver, Transition,
};
use drone_mpc::Error;
use proptest::prelude::*;

fn corridor() -> GridMdp {
    GridMdp::new(
        2,
        1,
        vec![GridBuilding {
            cell: (1, 0),
            cost: 1.0,
        }],
        BTreeSet::new(),
        vec![(0, 0)],
        vec![vec![0]],
        RewardConfig::default(),
    )
    .unwrap()
}

#[test]
fn corridor_matches_value_iteration() {
    // Optimal: step right and deliver. V(start) = 10 - 0.1; every other
    // action idles one step first.
    let rw = RewardConfig::default();
    let v = rw.delivery_reward_scale - rw.step_penalty;
    let idle = -rw.step_penalty + 0.95 * v;
    let expected = [idle, idle, idle, v, idle];

    let mdp = corridor();
    for method in Method::ALL {
        let cfg = TrainConfig {
            episodes: 200,
            alpha: 1.0,
            gamma: 0.95,
            ..TrainConfig::default()
        };
        let out = train(&mdp, method, &cfg).unwrap();
        let key = match method {
            Method::Jal => mdp.joint_key(&mdp.initial_state()).unwrap(),
            _ => mdp.agent_key(0, &mdp.initial_state()),
        };
        for (a, want) in expected.iter().enumerate() {
            let got = out.tables[0].get(key, a);
            assert!((got - want).abs() < 1e-12, "{method} action {a}: {got} vs {want}");
        }
        let r = greedy_rollout(&mdp, &out).unwrap();
        assert_eq!(r.paths[0], vec![(0, 0), (1, 0)]);
        assert_eq!(r.actions[0], vec![Action::Right]);
    }
}

#[test]
fn untrained_rollout_runs_to_the_limit() {
    let mdp = GridMdp::new(
        3,
        3,
        vec![GridBuilding {
            cell: (2, 0),
            cost: 1.0,
        }],
        BTreeSet::new(),
        vec![(0, 0)],
        vec![vec![0]],
        RewardConfig {
            max_steps: 9,
            ..Default::default()
        },
    )
    .unwrap();
    let out = train(
        &mdp,
        Method::Vdn,
        &TrainConfig {
            episodes: 0,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(out.tables.iter().all(QTable::is_empty));
    let r = greedy_rollout(&mdp, &out).unwrap();
    assert_eq!(r.steps, 9);
    assert!(r.actions[0].iter().all(|&a| a == Action::Up));
    assert_eq!(*r.paths[0].last().unwrap(), (0, 2));
}

#[test]
fn rollout_stops_once_everything_is_delivered() {
    let s = builtin_scenario(ScenarioId::Env1);
    let mdp = discretize(&s, None, RewardConfig::default()).unwrap();
    let out = train(
        &mdp,
        Method::Iql,
        &TrainConfig {
            episodes: 1500,
            ..Default::default()
        },
    )
    .unwrap();
    let r = greedy_rollout(&mdp, &out).unwrap();
    assert!(r.completed);
    assert!(r.steps < mdp.rewards.max_steps);
    assert!(r.delivered_by.iter().all(Option::is_some));
}

#[test]
fn discretized_grids() {
    let env1 = discretize(&builtin_scenario(ScenarioId::Env1), None, RewardConfig::default()).unwrap();
    assert_eq!((env1.width, env1.height), (16, 11));
    assert_eq!(env1.buildings.len(), 13);
    assert_eq!(env1.zone_cells.len(), 6);
    let env2 = discretize(&builtin_scenario(ScenarioId::Env2), None, RewardConfig::default()).unwrap();
    assert_eq!((env2.width, env2.height), (37, 11));

    let mut s = builtin_scenario(ScenarioId::Env1);
    s.buildings = vec![Building::new(0.4, 0.6, BuildingKind::Home, 1.0)];
    let g = discretize(&s, None, RewardConfig::default()).unwrap();
    assert_eq!(g.buildings[0].cell, (0, 1));

    s.buildings.push(Building::new(0.0, 1.2, BuildingKind::Shop, 1.0));
    match discretize(&s, None, RewardConfig::default()) {
        Err(Error::CellCollision {
            first: 0, second: 1, ..
        }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn jal_budget_error_names_the_bound() {
    let s = builtin_scenario(ScenarioId::Env2);
    let mdp = discretize(&s, None, RewardConfig::default()).unwrap();
    let err = train(&mdp, Method::Jal, &TrainConfig::default()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("3125") && msg.contains("1024"), "{msg}");
}

#[test]
fn td_loss_reference_values() {
    let q = vec![QTable::new(5, 0.0), QTable::new(5, 0.0)];
    let t = Transition {
        components: vec![0],
        states: vec![StateKey(0)],
        actions: vec![0],
        reward: 1.0,
        next_states: vec![None],
    };
    assert_eq!(td_loss(std::slice::from_ref(&t), &q, 0.9, Method::Iql), Some(1.0));
    let zero = Transition { reward: 0.0, ..t };
    assert_eq!(td_loss(&[zero], &q, 0.9, Method::Jal), Some(0.0));
    assert_eq!(td_loss(&[], &q, 0.9, Method::Vdn), None);

    let mut q = q;
    q[0].set(StateKey(0), 0, 1.0);
    q[1].set(StateKey(0), 0, 2.0);
    let joint = Transition {
        components: vec![0, 1],
        states: vec![StateKey(0), StateKey(0)],
        actions: vec![0, 0],
        reward: 3.0,
        next_states: vec![None, None],
    };
    assert_eq!(td_loss(&[joint], &q, 0.9, Method::Vdn), Some(0.0));
}

#[derive(Default)]
struct Replay {
    log: Vec<(usize, StateKey, usize, f64)>,
}

impl TrainingObserver for Replay {
    fn update(&mut self, table: usize, state: StateKey, action: usize, increment: f64) {
        self.log.push((table, state, action, increment));
    }
}

#[test]
fn vdn_start_value_matches_replayed_updates() {
    // Two agents facing mirror-image tasks.
    let mdp = GridMdp::new(
        5,
        1,
        vec![
            GridBuilding {
                cell: (0, 0),
                cost: 1.0,
            },
            GridBuilding {
                cell: (4, 0),
                cost: 1.0,
            },
        ],
        BTreeSet::new(),
        vec![(2, 0), (2, 0)],
        vec![vec![0], vec![1]],
        RewardConfig::default(),
    )
    .unwrap();
    let cfg = TrainConfig {
        episodes: 400,
        seed: 17,
        ..Default::default()
    };
    let mut replay = Replay::default();
    let out = train_observed(&mdp, Method::Vdn, &cfg, &mut replay).unwrap();

    let mut tables = vec![QTable::new(5, 0.0); 2];
    for &(k, s, a, inc) in &replay.log {
        let v = tables[k].get(s, a);
        tables[k].set(s, a, v + inc);
    }
    let s0 = mdp.initial_state();
    let sum = |t: &[QTable]| -> f64 { (0..2).map(|i| t[i].max(mdp.agent_key(i, &s0))).sum() };
    assert!((sum(&out.tables) - sum(&tables)).abs() <= 1e-9);
    let r = greedy_rollout(&mdp, &out).unwrap();
    assert!(r.completed);
    assert_eq!(r.delivered_by, vec![Some(0), Some(1)]);
}

fn small_grid() -> impl Strategy<Value = GridMdp> {
    (2usize..6, 1usize..5, 1usize..4, 1usize..3, any::<u64>(), 1usize..40).prop_map(
        |(w, h, m, agents, pick, max_steps)| {
            let cells: Vec<(usize, usize)> = (0..w).flat_map(|c| (0..h).map(move |r| (c, r))).collect();
            let mut order = cells.clone();
            let mut x = pick;
            for i in (1..order.len()).rev() {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (x >> 33) as usize % (i + 1));
            }
            let m = m.min(order.len());
            let buildings: Vec<GridBuilding> = order[..m]
                .iter()
                .enumerate()
                .map(|(j, &cell)| GridBuilding {
                    cell,
                    cost: 1.0 + j as f64,
                })
                .collect();
            let zones: BTreeSet<(usize, usize)> = order[m..].iter().take(2).copied().collect();
            let starts: Vec<(usize, usize)> = (0..agents).map(|i| cells[(i * 7) % cells.len()]).collect();
            let tasks: Vec<Vec<usize>> = (0..agents)
                .map(|i| (0..m).filter(|j| j % agents == i).collect())
                .collect();
            GridMdp::new(
                w,
                h,
                buildings,
                zones,
                starts,
                tasks,
                RewardConfig {
                    max_steps,
                    ..Default::default()
                },
            )
            .unwrap()
        },
    )
}

fn method() -> impl Strategy<Value = Method> {
    prop::sample::select(Method::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn returns_stay_in_bounds(mdp in small_grid(), m in method(), seed in any::<u64>()) {
        let cfg = TrainConfig { episodes: 30, seed, ..Default::default() };
        let out = train(&mdp, m, &cfg).unwrap();
        let rw = mdp.rewards;
        let n = mdp.num_agents() as f64;
        let lo = -(rw.max_steps as f64) * n * (rw.step_penalty + rw.zone_penalty);
        let hi = rw.delivery_reward_scale * mdp.buildings.iter().map(|b| b.cost).sum::<f64>();
        for r in &out.returns {
            prop_assert!(*r >= lo - 1e-9 && *r <= hi + 1e-9, "{} not in [{}, {}]", r, lo, hi);
        }
        prop_assert_eq!(out.returns.len(), 30);
    }

    #[test]
    fn training_is_seed_deterministic(mdp in small_grid(), m in method(), seed in any::<u64>()) {
        let cfg = TrainConfig { episodes: 20, seed, ..Default::default() };
        let a = train(&mdp, m, &cfg).unwrap();
        let b = train(&mdp, m, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(greedy_rollout(&mdp, &a).unwrap(), greedy_rollout(&mdp, &b).unwrap());
    }

    #[test]
    fn rollout_shapes_are_consistent(mdp in small_grid(), m in method()) {
        let out = train(&mdp, m, &TrainConfig { episodes: 10, ..Default::default() }).unwrap();
        let r = greedy_rollout(&mdp, &out).unwrap();
        prop_assert!(r.steps <= mdp.rewards.max_steps);
        for i in 0..mdp.num_agents() {
            prop_assert_eq!(r.paths[i].len(), r.steps + 1);
            prop_assert_eq!(r.actions[i].len(), r.steps);
            for w in r.paths[i].windows(2) {
                let d = w[0].0.abs_diff(w[1].0) + w[0].1.abs_diff(w[1].1);
                prop_assert!(d <= 1);
            }
        }
        let total: f64 = r.rewards.iter().flatten().sum();
        prop_assert!((total - r.episode_return).abs() < 1e-9);
        prop_assert_eq!(r.completed, r.delivered_by.iter().all(Option::is_some));
    }
}
