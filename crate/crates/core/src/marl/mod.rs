//! Tabular multi-agent Q-learning baselines on a discretized delivery grid:
//! independent learners (IQL), a joint-action learner (JAL), and additive
//! value decomposition (VDN).

pub mod export;
mod grid;
mod qtable;
mod rollout;
mod td;
mod train;

use std::fmt;
use std::str::FromStr;

pub use grid::{discretize, Action, Cell, GridBuilding, GridMdp, GridState, RewardConfig, StepOutcome};
pub use qtable::{QTable, StateKey};
pub use rollout::{greedy_rollout, Rollout};
pub use td::{q_update, td_error, td_loss, QLookup, Transition};
pub use train::{train, train_observed, JointLookup, NoObserver, TrainConfig, TrainOutput, TrainingObserver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Iql,
    Jal,
    Vdn,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Iql, Method::Jal, Method::Vdn];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Iql => "iql",
            Method::Jal => "jal",
            Method::Vdn => "vdn",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "iql" => Ok(Method::Iql),
            "jal" => Ok(Method::Jal),
            "vdn" => Ok(Method::Vdn),
            other => Err(format!("unknown MARL method `{other}` (expected iql, jal or vdn)")),
        }
    }
}
