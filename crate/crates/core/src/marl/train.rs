//! ε-greedy training loops for IQL, JAL and VDN.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{q_update, Action, GridMdp, GridState, Method, QTable, StateKey};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub episodes: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub seed: u64,
    /// Value of unseen state-action pairs.
    pub initial_value: f64,
    /// Largest joint-action count a JAL table may have.
    pub joint_action_budget: u128,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            episodes: 3000,
            alpha: 0.1,
            gamma: 0.95,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            seed: 0,
            initial_value: 0.0,
            joint_action_budget: 1024,
        }
    }
}

impl TrainConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        if !(self.epsilon_end >= 0.0 && self.epsilon_start >= self.epsilon_end && self.epsilon_start <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 1 >= epsilon_start ({}) >= epsilon_end ({}) >= 0",
                self.epsilon_start, self.epsilon_end
            )));
        }
        Ok(())
    }

    /// Linear decay from `epsilon_start` at the first episode to
    /// `epsilon_end` at the last.
    pub fn epsilon(&self, episode: usize) -> f64 {
        if self.episodes <= 1 {
            return self.epsilon_start;
        }
        let frac = episode as f64 / (self.episodes - 1) as f64;
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub method: Method,
    /// Agents covered by the learner, in table order. A JAL run has a
    /// single table keyed by the joint action of all of them.
    pub agents: Vec<usize>,
    pub tables: Vec<QTable>,
    pub returns: Vec<f64>,
    pub td_losses: Vec<f64>,
    pub epsilons: Vec<f64>,
}

/// A joint value formed from per-agent table reads. `actions` is `None`
/// when each agent's greedy maximum was read.
#[derive(Debug)]
pub struct JointLookup<'a> {
    pub tables: &'a [usize],
    pub states: &'a [StateKey],
    pub actions: Option<&'a [usize]>,
    pub per_agent: &'a [f64],
    pub joint: f64,
}

/// Hooks into training, used for logging and replay checks.
pub trait TrainingObserver {
    fn joint_lookup(&mut self, _lookup: &JointLookup<'_>) {}
    fn update(&mut self, _table: usize, _state: StateKey, _action: usize, _increment: f64) {}
}

pub struct NoObserver;

impl TrainingObserver for NoObserver {}

pub fn train(mdp: &GridMdp, method: Method, config: &TrainConfig) -> Result<TrainOutput> {
    train_observed(mdp, method, config, &mut NoObserver)
}

fn joint_action_count(agents: usize, budget: u128) -> Result<usize> {
    let needed = (Action::COUNT as u128).checked_pow(agents as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::TableBudget {
            needed,
            actions: Action::COUNT,
            agents,
            budget,
        });
    }
    Ok(needed as usize)
}

fn decode_joint(mut index: usize, agents: &[usize], out: &mut [Action]) {
    for &i in agents {
        out[i] = Action::from_index(index % Action::COUNT);
        index /= Action::COUNT;
    }
}

fn additive(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v)
}

struct Episode<'a> {
    mdp: &'a GridMdp,
    agents: &'a [usize],
    tables: &'a mut [QTable],
    config: &'a TrainConfig,
    sq_err: f64,
    updates: usize,
}

impl Episode<'_> {
    fn record(&mut self, delta: f64) {
        self.sq_err += delta * delta;
        self.updates += 1;
    }

    fn iql(
        &mut self,
        state: &GridState,
        next: &GridState,
        actions: &[Action],
        rewards: &[f64],
        obs: &mut impl TrainingObserver,
    ) {
        for (k, &i) in self.agents.iter().enumerate() {
            if self.mdp.agent_done(i, state) {
                continue;
            }
            let s = self.mdp.agent_key(i, state);
            let a = actions[i].index();
            let max_next = if self.mdp.agent_done(i, next) {
                0.0
            } else {
                self.tables[k].max(self.mdp.agent_key(i, next))
            };
            let q = self.tables[k].get(s, a);
            self.record(rewards[i] + self.config.gamma * max_next - q);
            let new = q_update(q, rewards[i], max_next, self.config.alpha, self.config.gamma);
            self.tables[k].set(s, a, new);
            obs.update(k, s, a, new - q);
        }
    }

    fn jal(
        &mut self,
        s: StateKey,
        joint_action: usize,
        next: &GridState,
        reward: f64,
        obs: &mut impl TrainingObserver,
    ) -> Result<()> {
        let max_next = if self.mdp.is_terminal(next) {
            0.0
        } else {
            self.tables[0].max(self.mdp.joint_key(next)?)
        };
        let q = self.tables[0].get(s, joint_action);
        self.record(reward + self.config.gamma * max_next - q);
        let new = q_update(q, reward, max_next, self.config.alpha, self.config.gamma);
        self.tables[0].set(s, joint_action, new);
        obs.update(0, s, joint_action, new - q);
        Ok(())
    }

    fn vdn(
        &mut self,
        state: &GridState,
        next: &GridState,
        actions: &[Action],
        reward: f64,
        obs: &mut impl TrainingObserver,
    ) {
        let mut live = Vec::new();
        let mut states = Vec::new();
        let mut acts = Vec::new();
        let mut pred = Vec::new();
        let mut next_live = Vec::new();
        let mut next_states = Vec::new();
        let mut next_max = Vec::new();
        for (k, &i) in self.agents.iter().enumerate() {
            if self.mdp.agent_done(i, state) {
                continue;
            }
            let s = self.mdp.agent_key(i, state);
            let a = actions[i].index();
            live.push(k);
            states.push(s);
            acts.push(a);
            pred.push(self.tables[k].get(s, a));
            if !self.mdp.agent_done(i, next) {
                let s2 = self.mdp.agent_key(i, next);
                next_live.push(k);
                next_states.push(s2);
                next_max.push(self.tables[k].max(s2));
            }
        }
        if live.is_empty() {
            return;
        }
        let joint_pred = additive(&pred);
        obs.joint_lookup(&JointLookup {
            tables: &live,
            states: &states,
            actions: Some(&acts),
            per_agent: &pred,
            joint: joint_pred,
        });
        let joint_next = additive(&next_max);
        obs.joint_lookup(&JointLookup {
            tables: &next_live,
            states: &next_states,
            actions: None,
            per_agent: &next_max,
            joint: joint_next,
        });
        let delta = reward + self.config.gamma * joint_next - joint_pred;
        self.record(delta);
        let step = self.config.alpha * delta;
        for ((&k, &s), &a) in live.iter().zip(&states).zip(&acts) {
            let q = self.tables[k].get(s, a);
            self.tables[k].set(s, a, q + step);
            obs.update(k, s, a, step);
        }
    }
}

/// Trains `method` on `mdp` and reports per-episode team return, mean
/// squared TD error, and exploration rate. Identical inputs give identical
/// tables and curves.
pub fn train_observed(
    mdp: &GridMdp,
    method: Method,
    config: &TrainConfig,
    obs: &mut impl TrainingObserver,
) -> Result<TrainOutput> {
    config.check()?;
    let agents = mdp.active_agents();
    let joint_actions = match method {
        Method::Jal => {
            let count = joint_action_count(agents.len(), config.joint_action_budget)?;
            mdp.joint_key(&mdp.initial_state())?;
            count
        }
        _ => Action::COUNT,
    };
    let mut tables = match method {
        Method::Jal => vec![QTable::new(joint_actions, config.initial_value)],
        _ => vec![QTable::new(Action::COUNT, config.initial_value); agents.len()],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = mdp.num_agents();
    let mut returns = Vec::with_capacity(config.episodes);
    let mut td_losses = Vec::with_capacity(config.episodes);
    let mut epsilons = Vec::with_capacity(config.episodes);
    let mut actions = vec![Action::Stay; n];

    for episode in 0..config.episodes {
        let eps = config.epsilon(episode);
        let mut state = mdp.initial_state();
        let mut ep_return = 0.0;
        let mut ep = Episode {
            mdp,
            agents: &agents,
            tables: &mut tables,
            config,
            sq_err: 0.0,
            updates: 0,
        };

        for _ in 0..mdp.rewards.max_steps {
            if mdp.is_terminal(&state) {
                break;
            }
            actions.fill(Action::Stay);
            let mut joint = (StateKey(0), 0usize);
            match method {
                Method::Iql | Method::Vdn => {
                    for (k, &i) in agents.iter().enumerate() {
                        if mdp.agent_done(i, &state) {
                            continue;
                        }
                        let a = if rng.random::<f64>() < eps {
                            rng.random_range(0..Action::COUNT)
                        } else {
                            ep.tables[k].argmax(mdp.agent_key(i, &state))
                        };
                        actions[i] = Action::from_index(a);
                    }
                }
                Method::Jal => {
                    let s = mdp.joint_key(&state)?;
                    let a = if rng.random::<f64>() < eps {
                        rng.random_range(0..joint_actions)
                    } else {
                        ep.tables[0].argmax(s)
                    };
                    decode_joint(a, &agents, &mut actions);
                    joint = (s, a);
                }
            }

            let outcome = mdp.step(&state, &actions);
            let team: f64 = outcome.rewards.iter().sum();
            ep_return += team;
            match method {
                Method::Iql => ep.iql(&state, &outcome.next, &actions, &outcome.rewards, obs),
                Method::Jal => ep.jal(joint.0, joint.1, &outcome.next, team, obs)?,
                Method::Vdn => ep.vdn(&state, &outcome.next, &actions, team, obs),
            }
            state = outcome.next;
        }

        let loss = if ep.updates == 0 {
            0.0
        } else {
            ep.sq_err / ep.updates as f64
        };
        returns.push(ep_return);
        td_losses.push(loss);
        epsilons.push(eps);
    }

    Ok(TrainOutput {
        method,
        agents,
        tables,
        returns,
        td_losses,
        epsilons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{builtin_scenario, ScenarioId};
    use crate::marl::{discretize, GridBuilding, RewardConfig};

    fn corridor() -> GridMdp {
        GridMdp::new(
            2,
            1,
            vec![GridBuilding {
                cell: (1, 0),
                cost: 1.0,
            }],
            Default::default(),
            vec![(0, 0)],
            vec![vec![0]],
            RewardConfig {
                max_steps: 10,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_episodes_leave_tables_empty() {
        let cfg = TrainConfig {
            episodes: 0,
            ..Default::default()
        };
        let out = train(&corridor(), Method::Iql, &cfg).unwrap();
        assert!(out.tables.iter().all(|t| t.is_empty()));
        assert!(out.returns.is_empty());
    }

    #[test]
    fn curves_have_one_entry_per_episode() {
        let cfg = TrainConfig {
            episodes: 37,
            ..Default::default()
        };
        for m in Method::ALL {
            let out = train(&corridor(), m, &cfg).unwrap();
            assert_eq!(out.returns.len(), 37);
            assert_eq!(out.td_losses.len(), 37);
            assert_eq!(out.epsilons.len(), 37);
            assert_eq!(out.epsilons[0], 1.0);
            assert!((out.epsilons[36] - 0.05).abs() < 1e-15);
        }
    }

    #[test]
    fn seed_determinism() {
        let s = builtin_scenario(ScenarioId::Env1);
        let mdp = discretize(&s, None, RewardConfig::default()).unwrap();
        let cfg = TrainConfig {
            episodes: 40,
            seed: 3,
            ..Default::default()
        };
        for m in Method::ALL {
            let a = train(&mdp, m, &cfg).unwrap();
            let b = train(&mdp, m, &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn jal_budget() {
        let s = builtin_scenario(ScenarioId::Env2);
        let mdp = discretize(&s, None, RewardConfig::default()).unwrap();
        let err = train(
            &mdp,
            Method::Jal,
            &TrainConfig {
                episodes: 1,
                ..Default::default()
            },
        )
        .unwrap_err();
        match err {
            Error::TableBudget { needed, agents, .. } => assert_eq!((needed, agents), (3125, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_checks() {
        let mdp = corridor();
        for bad in [
            TrainConfig {
                alpha: 0.0,
                ..Default::default()
            },
            TrainConfig {
                gamma: 1.0,
                ..Default::default()
            },
            TrainConfig {
                epsilon_start: 0.1,
                epsilon_end: 0.2,
                ..Default::default()
            },
        ] {
            assert!(matches!(train(&mdp, Method::Iql, &bad), Err(Error::InvalidConfig(_))));
        }
    }
}
