//! Runs MPC and the MARL baselines on one scenario and collects drone
//! count, cost, and wall time per run.

mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

pub use report::{emit_report, parse_report_csv, ReportFormat};

use crate::environment::{ensure_valid, Scenario};
use crate::marl::{self, discretize, greedy_rollout, train, RewardConfig, TrainConfig};
use crate::mpc::{nearest_assignment, optimize, select_fleet, MedianTransitCost, OptimizerConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchMethod {
    Mpc,
    Iql,
    Jal,
    Vdn,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 4] = [BenchMethod::Mpc, BenchMethod::Iql, BenchMethod::Jal, BenchMethod::Vdn];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchMethod::Mpc => "mpc",
            BenchMethod::Iql => "iql",
            BenchMethod::Jal => "jal",
            BenchMethod::Vdn => "vdn",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BenchMethod::Mpc => "MPC",
            BenchMethod::Iql => "IQL",
            BenchMethod::Jal => "JAL",
            BenchMethod::Vdn => "VDN",
        }
    }

    fn marl(self) -> Option<marl::Method> {
        match self {
            BenchMethod::Mpc => None,
            BenchMethod::Iql => Some(marl::Method::Iql),
            BenchMethod::Jal => Some(marl::Method::Jal),
            BenchMethod::Vdn => Some(marl::Method::Vdn),
        }
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mpc" => Ok(BenchMethod::Mpc),
            "iql" => Ok(BenchMethod::Iql),
            "jal" => Ok(BenchMethod::Jal),
            "vdn" => Ok(BenchMethod::Vdn),
            other => Err(format!("unknown method `{other}` (expected mpc, iql, jal or vdn)")),
        }
    }
}

/// Settings shared by every run of a comparison. The per-run seed replaces
/// the seeds stored here.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub optimizer: OptimizerConfig,
    pub lambda_fleet: f64,
    pub train: TrainConfig,
    pub rewards: RewardConfig,
    /// Let every MARL agent deliver every building instead of using the
    /// nearest-drone split.
    pub shared_tasks: bool,
    /// Compute rows on the rayon pool. Wall times then include contention.
    pub parallel: bool,
}

impl BenchConfig {
    pub fn for_scenario(scenario: &Scenario) -> Self {
        Self {
            optimizer: OptimizerConfig::for_scenario(scenario),
            lambda_fleet: scenario.lambda,
            train: TrainConfig::default(),
            rewards: RewardConfig::default(),
            shared_tasks: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub method: BenchMethod,
    pub seed: u64,
    pub optimal_drones: usize,
    pub min_total_cost: f64,
    pub wall_time_seconds: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportRow {
    Completed(RunMetrics),
    Failed {
        method: BenchMethod,
        seed: u64,
        error: String,
    },
}

impl ReportRow {
    pub fn method(&self) -> BenchMethod {
        match self {
            ReportRow::Completed(m) => m.method,
            ReportRow::Failed { method, .. } => *method,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ReportRow::Completed(m) => m.seed,
            ReportRow::Failed { seed, .. } => *seed,
        }
    }

    pub fn metrics(&self) -> Option<&RunMetrics> {
        match self {
            ReportRow::Completed(m) => Some(m),
            ReportRow::Failed { .. } => None,
        }
    }
}

/// Median over completed runs of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodAggregate {
    pub method: BenchMethod,
    pub runs: usize,
    pub completed: usize,
    pub converged: usize,
    pub optimal_drones: Option<f64>,
    pub min_total_cost: Option<f64>,
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub scenario: String,
    pub host: String,
    pub rows: Vec<ReportRow>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

impl ComparisonReport {
    /// Methods present in the report, in column order.
    pub fn methods(&self) -> Vec<BenchMethod> {
        let mut m: Vec<BenchMethod> = self.rows.iter().map(ReportRow::method).collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    pub fn aggregate(&self) -> Vec<MethodAggregate> {
        self.methods()
            .into_iter()
            .map(|method| {
                let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.method() == method).collect();
                let done: Vec<&RunMetrics> = rows.iter().filter_map(|r| r.metrics()).collect();
                MethodAggregate {
                    method,
                    runs: rows.len(),
                    completed: done.len(),
                    converged: done.iter().filter(|m| m.converged).count(),
                    optimal_drones: median(done.iter().map(|m| m.optimal_drones as f64).collect()),
                    min_total_cost: median(done.iter().map(|m| m.min_total_cost).collect()),
                    wall_time_seconds: median(done.iter().map(|m| m.wall_time_seconds).collect()),
                }
            })
            .collect()
    }
}

/// OS, architecture and logical CPU count of this machine.
pub fn host_description() -> String {
    let cpus = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!("{} {} {} cpus", std::env::consts::OS, std::env::consts::ARCH, cpus)
}

/// One timed run. MPC reports the fleet-selection objective and the size of
/// the chosen fleet; a MARL method reports
/// `Σ c_j over delivered buildings + step and zone penalties paid` and the
/// number of agents that delivered anything in the greedy rollout.
pub fn run_method(scenario: &Scenario, method: BenchMethod, config: &BenchConfig, seed: u64) -> Result<RunMetrics> {
    ensure_valid(scenario)?;
    let tag = |e: Error| Error::Method {
        method: method.to_string(),
        source: Box::new(e),
    };
    let start = Instant::now();
    let (optimal_drones, min_total_cost, converged) = match method.marl() {
        None => {
            let opt = OptimizerConfig {
                seed,
                ..config.optimizer.clone()
            };
            let result = optimize(scenario, &opt).map_err(tag)?;
            let plan = select_fleet(scenario, config.lambda_fleet, &MedianTransitCost).map_err(tag)?;
            (plan.active_drones.len(), plan.objective, result.converged)
        }
        Some(m) => {
            let assignment = if config.shared_tasks {
                None
            } else {
                let all: Vec<usize> = (0..scenario.num_drones()).collect();
                Some(nearest_assignment(scenario, &all))
            };
            let mdp = discretize(scenario, assignment.as_deref(), config.rewards).map_err(tag)?;
            let tc = TrainConfig {
                seed,
                ..config.train.clone()
            };
            let trained = train(&mdp, m, &tc).map_err(tag)?;
            let rollout = greedy_rollout(&mdp, &trained).map_err(tag)?;
            let delivered: f64 = rollout
                .delivered_by
                .iter()
                .zip(&mdp.buildings)
                .filter(|(d, _)| d.is_some())
                .map(|(_, b)| b.cost)
                .sum();
            (
                rollout.delivering_agents().len(),
                delivered + rollout.penalties,
                rollout.completed,
            )
        }
    };
    Ok(RunMetrics {
        method,
        seed,
        optimal_drones,
        min_total_cost,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        converged,
    })
}

/// Every (method, seed) pair, ordered by method then seed. Failed runs
/// become failed rows.
pub fn run_comparison(
    scenario: &Scenario,
    methods: &[BenchMethod],
    seeds: &[u64],
    config: &BenchConfig,
) -> Result<ComparisonReport> {
    if methods.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidConfig(
            "comparison needs at least one method and one seed".into(),
        ));
    }
    ensure_valid(scenario)?;
    let mut methods = methods.to_vec();
    methods.sort_unstable();
    methods.dedup();
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    let jobs: Vec<(BenchMethod, u64)> = methods
        .iter()
        .flat_map(|&m| seeds.iter().map(move |&s| (m, s)))
        .collect();
    let run = |&(method, seed): &(BenchMethod, u64)| match run_method(scenario, method, config, seed) {
        Ok(m) => ReportRow::Completed(m),
        Err(e) => ReportRow::Failed {
            method,
            seed,
            error: e.to_string(),
        },
    };
    let rows = if config.parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    Ok(ComparisonReport {
        scenario: scenario.name.clone(),
        host: host_description(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{builtin_scenario, Building, BuildingKind, ScenarioId};
    use crate::Point;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(vec![]), None);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn method_parsing() {
        for m in BenchMethod::ALL {
            assert_eq!(m.as_str().parse::<BenchMethod>().unwrap(), m);
        }
        assert!("qmix".parse::<BenchMethod>().is_err());
    }

    #[test]
    fn degenerate_building_on_start() {
        let mut s = builtin_scenario(ScenarioId::Env1);
        s.buildings = vec![Building::new(0.0, 0.0, BuildingKind::Home, 3.0)];
        s.drone_starts = vec![Point::new(0.0, 0.0), Point::new(5.0, 5.0)];
        s.zones.clear();
        let cfg = BenchConfig {
            lambda_fleet: 7.0,
            ..BenchConfig::for_scenario(&s)
        };
        let m = run_method(&s, BenchMethod::Mpc, &cfg, 0).unwrap();
        assert_eq!(m.optimal_drones, 1);
        assert_eq!(m.min_total_cost, 7.0);
    }

    #[test]
    fn failures_become_rows() {
        let s = builtin_scenario(ScenarioId::Env2);
        let mut cfg = BenchConfig::for_scenario(&s);
        cfg.shared_tasks = true;
        cfg.train.episodes = 1;
        let r = run_comparison(&s, &[BenchMethod::Jal], &[0, 1], &cfg).unwrap();
        assert_eq!(r.rows.len(), 2);
        for row in &r.rows {
            match row {
                ReportRow::Failed { error, .. } => assert!(error.contains("jal"), "{error}"),
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(r.aggregate()[0].completed, 0);
    }

    #[test]
    fn rows_sorted_by_method_then_seed() {
        let s = builtin_scenario(ScenarioId::Env1);
        let mut cfg = BenchConfig::for_scenario(&s);
        cfg.train.episodes = 2;
        cfg.optimizer.max_iterations = 3;
        cfg.parallel = true;
        let r = run_comparison(&s, &[BenchMethod::Vdn, BenchMethod::Mpc], &[5, 2], &cfg).unwrap();
        let keys: Vec<(BenchMethod, u64)> = r.rows.iter().map(|r| (r.method(), r.seed())).collect();
        assert_eq!(
            keys,
            vec![
                (BenchMethod::Mpc, 2),
                (BenchMethod::Mpc, 5),
                (BenchMethod::Vdn, 2),
                (BenchMethod::Vdn, 5)
            ]
        );
    }
}
