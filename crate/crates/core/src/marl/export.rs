//! CSV renderings of learning curves and greedy paths.

use super::{Rollout, TrainOutput};
use crate::io::csv_string;
use crate::Result;

/// `episode,return,td_loss,epsilon`, episodes from 1.
pub fn learning_curve_csv(out: &TrainOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["episode", "return", "td_loss", "epsilon"])?;
    for (k, ((r, l), e)) in out.returns.iter().zip(&out.td_losses).zip(&out.epsilons).enumerate() {
        w.write_record([(k + 1).to_string(), r.to_string(), l.to_string(), e.to_string()])?;
    }
    csv_string(w)
}

/// `agent,step,col,row,action,reward`. Step 0 is the start cell and has
/// empty action and reward fields.
pub fn policy_path_csv(rollout: &Rollout) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["agent", "step", "col", "row", "action", "reward"])?;
    for (i, path) in rollout.paths.iter().enumerate() {
        for (t, &(col, row)) in path.iter().enumerate() {
            let (action, reward) = match t.checked_sub(1) {
                Some(k) => (
                    rollout.actions[i][k].as_str().to_string(),
                    rollout.rewards[i][k].to_string(),
                ),
                None => (String::new(), String::new()),
            };
            w.write_record([
                i.to_string(),
                t.to_string(),
                col.to_string(),
                row.to_string(),
                action,
                reward,
            ])?;
        }
    }
    csv_string(w)
}
