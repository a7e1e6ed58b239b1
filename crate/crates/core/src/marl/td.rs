//! One-step temporal-difference quantities shared by the three learners.

use super::{Method, QTable, StateKey};

/// Tabular Q-learning step: `q + α·(r + γ·max_next − q)`.
pub fn q_update(q: f64, r: f64, max_next: f64, alpha: f64, gamma: f64) -> f64 {
    q + alpha * (r + gamma * max_next - q)
}

/// Read access to one or more Q-tables, indexed by component.
pub trait QLookup {
    fn q(&self, component: usize, state: StateKey, action: usize) -> f64;
    fn max_q(&self, component: usize, state: StateKey) -> f64;
}

impl QLookup for [QTable] {
    fn q(&self, component: usize, state: StateKey, action: usize) -> f64 {
        self[component].get(state, action)
    }

    fn max_q(&self, component: usize, state: StateKey) -> f64 {
        self[component].max(state)
    }
}

impl QLookup for Vec<QTable> {
    fn q(&self, component: usize, state: StateKey, action: usize) -> f64 {
        self.as_slice().q(component, state, action)
    }

    fn max_q(&self, component: usize, state: StateKey) -> f64 {
        self.as_slice().max_q(component, state)
    }
}

/// A recorded step. IQL and JAL transitions have exactly one component
/// (an agent's local view, or the joint state with the joint action index);
/// VDN transitions have one component per agent in the decomposition.
/// A `None` next state marks a component that has terminated.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub components: Vec<usize>,
    pub states: Vec<StateKey>,
    pub actions: Vec<usize>,
    pub reward: f64,
    pub next_states: Vec<Option<StateKey>>,
}

fn sum_q(q: &(impl QLookup + ?Sized), t: &Transition) -> f64 {
    let mut total = 0.0;
    for ((&c, &s), &a) in t.components.iter().zip(&t.states).zip(&t.actions) {
        total += q.q(c, s, a);
    }
    total
}

fn sum_max_next(q: &(impl QLookup + ?Sized), t: &Transition) -> f64 {
    let mut total = 0.0;
    for (&c, next) in t.components.iter().zip(&t.next_states) {
        if let Some(s) = next {
            total += q.max_q(c, *s);
        }
    }
    total
}

/// `r + γ·max Q(s', ·) − Q(s, a)`. For VDN both Q terms are sums over the
/// per-agent tables, and the max of the sum is the sum of per-agent maxima.
pub fn td_error(t: &Transition, q: &(impl QLookup + ?Sized), gamma: f64, mode: Method) -> f64 {
    match mode {
        Method::Iql | Method::Jal => {
            debug_assert_eq!(t.components.len(), 1, "{mode} transitions have one component");
        }
        Method::Vdn => {}
    }
    t.reward + gamma * sum_max_next(q, t) - sum_q(q, t)
}

/// Mean squared TD error over `batch`; `None` for an empty batch.
pub fn td_loss(batch: &[Transition], q: &(impl QLookup + ?Sized), gamma: f64, mode: Method) -> Option<f64> {
    if batch.is_empty() {
        return None;
    }
    let sum: f64 = batch
        .iter()
        .map(|t| {
            let e = td_error(t, q, gamma, mode);
            e * e
        })
        .sum();
    Some(sum / batch.len() as f64)
}
