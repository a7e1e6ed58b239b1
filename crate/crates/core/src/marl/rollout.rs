use super::{Action, Cell, GridMdp, Method, TrainOutput};
use crate::{Error, Result};

/// One greedy episode. Every agent has `steps + 1` path cells and `steps`
/// actions and rewards; parked agents repeat their cell with `Stay`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub paths: Vec<Vec<Cell>>,
    pub actions: Vec<Vec<Action>>,
    pub rewards: Vec<Vec<f64>>,
    pub episode_return: f64,
    /// Delivering agent per building.
    pub delivered_by: Vec<Option<usize>>,
    /// Step and zone penalties paid, as a positive total.
    pub penalties: f64,
    pub steps: usize,
    pub completed: bool,
}

impl Rollout {
    pub fn delivering_agents(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.delivered_by.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Runs the trained policy with no exploration until every task is
/// delivered or the step limit is hit.
pub fn greedy_rollout(mdp: &GridMdp, policy: &TrainOutput) -> Result<Rollout> {
    let n = mdp.num_agents();
    let expected_tables = match policy.method {
        Method::Jal => 1,
        _ => policy.agents.len(),
    };
    if policy.agents != mdp.active_agents() || policy.tables.len() != expected_tables {
        return Err(Error::InvalidConfig("policy was trained on a different grid".into()));
    }
    let mut state = mdp.initial_state();
    let mut paths: Vec<Vec<Cell>> = state.cells.iter().map(|&c| vec![c]).collect();
    let mut actions_log = vec![Vec::new(); n];
    let mut rewards_log = vec![Vec::new(); n];
    let mut delivered_by = vec![None; mdp.buildings.len()];
    let mut episode_return = 0.0;
    let mut penalties = 0.0;
    let mut steps = 0;
    let mut actions = vec![Action::Stay; n];

    while steps < mdp.rewards.max_steps && !mdp.is_terminal(&state) {
        actions.fill(Action::Stay);
        match policy.method {
            Method::Iql | Method::Vdn => {
                for (k, &i) in policy.agents.iter().enumerate() {
                    if !mdp.agent_done(i, &state) {
                        actions[i] = Action::from_index(policy.tables[k].argmax(mdp.agent_key(i, &state)));
                    }
                }
            }
            Method::Jal => {
                let mut idx = policy.tables[0].argmax(mdp.joint_key(&state)?);
                for &i in &policy.agents {
                    actions[i] = Action::from_index(idx % Action::COUNT);
                    idx /= Action::COUNT;
                }
            }
        }
        for (i, a) in actions.iter_mut().enumerate() {
            if mdp.agent_done(i, &state) {
                *a = Action::Stay;
            } else {
                penalties += mdp.rewards.step_penalty;
            }
        }
        let out = mdp.step(&state, &actions);
        for (i, &hit) in out.zone_hits.iter().enumerate() {
            if hit {
                penalties += mdp.rewards.zone_penalty;
            }
            paths[i].push(out.next.cells[i]);
            actions_log[i].push(actions[i]);
            rewards_log[i].push(out.rewards[i]);
            episode_return += out.rewards[i];
        }
        for &(i, j) in &out.deliveries {
            delivered_by[j] = Some(i);
        }
        state = out.next;
        steps += 1;
    }

    Ok(Rollout {
        paths,
        actions: actions_log,
        rewards: rewards_log,
        episode_return,
        delivered_by,
        penalties,
        steps,
        completed: mdp.is_terminal(&state),
    })
}
