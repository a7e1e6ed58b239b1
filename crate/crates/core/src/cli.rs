//! `drone-mpc` command line. Exit codes: 0 success, 1 bad input (usage,
//! parse or validation), 2 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{emit_report, parse_report_csv, run_comparison, BenchConfig, BenchMethod, ReportFormat};
use crate::environment::{builtin_scenario, ensure_valid, load_scenario, Scenario, ScenarioId};
use crate::io::write_atomic;
use crate::marl::{self, discretize, greedy_rollout, train, RewardConfig, TrainConfig};
use crate::mpc::{
    self, find_stable_learning_rate, nearest_assignment, optimize, select_fleet, MedianTransitCost, OptimizerConfig,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "drone-mpc",
    version,
    about = "Multi-drone delivery planning: MPC, MARL baselines, benchmarks"
)]
struct Cli {
    /// Directory for data files.
    #[arg(long, global = true, env = "DRONE_MPC_OUT", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in scenarios.
    Scenarios,
    /// Check a scenario and print any violations.
    Validate(SourceArgs),
    /// Optimize trajectories, select the fleet, write cost history,
    /// trajectories and fleet plan.
    RunMpc {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        mpc: MpcArgs,
    },
    /// Train one MARL method, write its learning curve and greedy path.
    TrainMarl {
        #[command(flatten)]
        source: SourceArgs,
        /// iql, jal or vdn.
        #[arg(long, default_value = "iql")]
        method: marl::Method,
        #[command(flatten)]
        marl: MarlArgs,
    },
    /// Run methods × seeds and write the comparison report.
    Compare {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_delimiter = ',', default_value = "mpc,iql,jal,vdn")]
        methods: Vec<BenchMethod>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        /// Run rows on all cores; wall times then include contention.
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        mpc: MpcArgs,
        #[command(flatten)]
        marl: MarlArgs,
    },
    /// Re-render a stored comparison report.
    Emit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Write here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Built-in scenario id (env1, env2).
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioOverrides {
    /// Lookahead horizon N [default: scenario value].
    #[arg(long)]
    horizon: Option<usize>,
    /// Keep-out radius around restricted zones [default: scenario value].
    #[arg(long)]
    d_min: Option<f64>,
    /// Per-drone fleet penalty [default: scenario λ].
    #[arg(long)]
    lambda_fleet: Option<f64>,
}

#[derive(Debug, Args)]
struct MpcArgs {
    #[command(flatten)]
    overrides: ScenarioOverrides,
    /// Gradient step size.
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    /// Halve --alpha until the run converges with 50 non-increasing
    /// leading iterations.
    #[arg(long)]
    auto_alpha: bool,
    /// Control-effort weight [default: scenario λ].
    #[arg(long)]
    lambda_ctrl: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Stop once |ΔJ| falls below this.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct MarlArgs {
    #[arg(long, default_value_t = 3000)]
    episodes: usize,
    /// Q-learning rate.
    #[arg(long, default_value_t = 0.1)]
    marl_alpha: f64,
    #[arg(long, default_value_t = 0.95)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    eps_start: f64,
    #[arg(long, default_value_t = 0.05)]
    eps_end: f64,
    /// Largest joint-action table JAL may build.
    #[arg(long, default_value_t = 1024)]
    jal_budget: u128,
    #[arg(long, default_value_t = 200)]
    max_steps: usize,
    #[arg(long, default_value_t = 0.1)]
    step_penalty: f64,
    #[arg(long, default_value_t = 5.0)]
    zone_penalty: f64,
    #[arg(long, default_value_t = 10.0)]
    delivery_scale: f64,
    /// Let every agent deliver every building.
    #[arg(long)]
    shared_tasks: bool,
    /// Seed for train-marl; compare uses --seeds.
    #[arg(long, default_value_t = 0)]
    marl_seed: u64,
}

impl MarlArgs {
    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            episodes: self.episodes,
            alpha: self.marl_alpha,
            gamma: self.gamma,
            epsilon_start: self.eps_start,
            epsilon_end: self.eps_end,
            seed: self.marl_seed,
            joint_action_budget: self.jal_budget,
            ..TrainConfig::default()
        }
    }

    fn rewards(&self) -> RewardConfig {
        RewardConfig {
            step_penalty: self.step_penalty,
            zone_penalty: self.zone_penalty,
            delivery_reward_scale: self.delivery_scale,
            max_steps: self.max_steps,
        }
    }
}

impl MpcArgs {
    fn optimizer_config(&self, scenario: &Scenario) -> OptimizerConfig {
        OptimizerConfig {
            learning_rate: self.alpha,
            max_iterations: self.max_iters,
            convergence_epsilon: self.epsilon,
            lambda_ctrl: self.lambda_ctrl.unwrap_or(scenario.lambda),
            seed: self.seed,
        }
    }
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Method { source, .. } => exit_code(source),
        Error::Diverged { .. } | Error::TableBudget { .. } | Error::StateKeyOverflow(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

fn bad_input(message: String) -> Failure {
    Failure { code: 1, message }
}

fn load_source(src: &SourceArgs) -> std::result::Result<Scenario, Failure> {
    match (&src.scenario, &src.file) {
        (Some(id), None) => Ok(builtin_scenario(id.parse::<ScenarioId>()?)),
        (None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| bad_input(format!("cannot read {}: {e}", path.display())))?;
            Ok(load_scenario(&text)?)
        }
        _ => Err(bad_input("give exactly one of --scenario or --file".into())),
    }
}

fn apply_overrides(mut s: Scenario, o: &ScenarioOverrides) -> Result<Scenario> {
    if let Some(h) = o.horizon {
        s.horizon = h;
    }
    if let Some(d) = o.d_min {
        s.d_min = d;
    }
    if let Some(l) = o.lambda_fleet {
        s.lambda = l;
    }
    ensure_valid(&s)?;
    Ok(s)
}

fn write_file(dir: &Path, name: &str, contents: &str, out: &mut dyn Write) -> Result<()> {
    let path = dir.join(name);
    write_atomic(&path, contents.as_bytes())?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(())
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Scenarios => {
            let _ = writeln!(
                out,
                "{:<6} {:>3} {:>3} {:>3} {:>4} {:>6}",
                "id", "M", "K", "n", "N", "lambda"
            );
            for id in ScenarioId::ALL {
                let s = builtin_scenario(id);
                let _ = writeln!(
                    out,
                    "{:<6} {:>3} {:>3} {:>3} {:>4} {:>6}",
                    id.to_string(),
                    s.buildings.len(),
                    s.zones.len(),
                    s.num_drones(),
                    s.horizon,
                    s.lambda
                );
            }
            Ok(())
        }
        Command::Validate(src) => {
            let scenario = load_source(&src)?;
            let _ = writeln!(out, "{}: ok", scenario.name);
            Ok(())
        }
        Command::RunMpc { source, mpc } => run_mpc(&cli.out, &source, &mpc, out),
        Command::TrainMarl { source, method, marl } => train_marl(&cli.out, &source, method, &marl, out),
        Command::Compare {
            source,
            methods,
            seeds,
            parallel,
            mpc,
            marl,
        } => {
            let scenario = apply_overrides(load_source(&source)?, &mpc.overrides)?;
            let config = BenchConfig {
                optimizer: mpc.optimizer_config(&scenario),
                lambda_fleet: scenario.lambda,
                train: marl.train_config(),
                rewards: marl.rewards(),
                shared_tasks: marl.shared_tasks,
                parallel,
            };
            config.optimizer.check()?;
            config.train.check()?;
            let report = run_comparison(&scenario, &methods, &seeds, &config)?;
            let csv = emit_report(&report, ReportFormat::Csv)?;
            write_file(&cli.out, &format!("{}_comparison.csv", scenario.name), &csv, out)?;
            let _ = write!(out, "{}", emit_report(&report, ReportFormat::Text)?);
            Ok(())
        }
        Command::Emit { input, format, output } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| bad_input(format!("cannot read {}: {e}", input.display())))?;
            let report = parse_report_csv(&text)?;
            let format = match format {
                FormatArg::Text => ReportFormat::Text,
                FormatArg::Csv => ReportFormat::Csv,
            };
            let rendered = emit_report(&report, format)?;
            match output {
                Some(path) => {
                    write_atomic(&path, rendered.as_bytes())?;
                    let _ = writeln!(out, "wrote {}", path.display());
                }
                None => {
                    let _ = write!(out, "{rendered}");
                }
            }
            Ok(())
        }
    }
}

fn run_mpc(dir: &Path, source: &SourceArgs, args: &MpcArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let scenario = apply_overrides(load_source(source)?, &args.overrides)?;
    let mut config = args.optimizer_config(&scenario);
    config.check()?;
    let result = if args.auto_alpha {
        let (rate, result) = find_stable_learning_rate(&scenario, &config, 50, 1e-9, 1e-12).ok_or(Failure {
            code: 2,
            message: format!("no stable step size at or below {}", args.alpha),
        })?;
        config.learning_rate = rate;
        result
    } else {
        optimize(&scenario, &config)?
    };
    let plan = select_fleet(&scenario, scenario.lambda, &MedianTransitCost)?;
    let name = &scenario.name;
    write_file(
        dir,
        &format!("{name}_mpc_cost_history.csv"),
        &mpc::export::cost_history_csv(&result)?,
        out,
    )?;
    write_file(
        dir,
        &format!("{name}_mpc_trajectory.csv"),
        &mpc::export::trajectory_csv(&result)?,
        out,
    )?;
    write_file(
        dir,
        &format!("{name}_mpc_fleet_plan.csv"),
        &mpc::export::fleet_plan_csv(&plan, &scenario)?,
        out,
    )?;
    let c = &result.final_cost;
    let _ = writeln!(
        out,
        "alpha {} iterations {} converged {} J {} (delivery {}, restricted {}, penalty {})",
        config.learning_rate, result.iterations_used, result.converged, c.total, c.delivery, c.restricted, c.penalty
    );
    let _ = writeln!(
        out,
        "active drones {:?} ({} of {}), fleet objective {}",
        plan.active_drones,
        plan.active_drones.len(),
        scenario.num_drones(),
        plan.objective
    );
    for v in &result.zone_violations {
        let _ = writeln!(
            out,
            "warning: drone {} at t={} is {:.4} from zone {}",
            v.drone, v.t, v.distance, v.zone
        );
    }
    Ok(())
}

fn train_marl(
    dir: &Path,
    source: &SourceArgs,
    method: marl::Method,
    args: &MarlArgs,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let scenario = load_source(source)?;
    let assignment = if args.shared_tasks {
        None
    } else {
        let all: Vec<usize> = (0..scenario.num_drones()).collect();
        Some(nearest_assignment(&scenario, &all))
    };
    let mdp = discretize(&scenario, assignment.as_deref(), args.rewards())?;
    let trained = train(&mdp, method, &args.train_config())?;
    let rollout = greedy_rollout(&mdp, &trained)?;
    let prefix = format!("{}_{}", scenario.name, method);
    write_file(
        dir,
        &format!("{prefix}_learning_curve.csv"),
        &marl::export::learning_curve_csv(&trained)?,
        out,
    )?;
    write_file(
        dir,
        &format!("{prefix}_policy_path.csv"),
        &marl::export::policy_path_csv(&rollout)?,
        out,
    )?;
    let delivered = rollout.delivered_by.iter().filter(|d| d.is_some()).count();
    let _ = writeln!(
        out,
        "{method}: greedy return {} in {} steps, delivered {delivered}/{} by agents {:?}",
        rollout.episode_return,
        rollout.steps,
        mdp.buildings.len(),
        rollout.delivering_agents()
    );
    Ok(())
}
