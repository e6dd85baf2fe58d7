//! Command-line simulator and verifier for game-theoretic task allocation.
//!
//! Exit codes: 0 when the run converged / the check verified, 1 when the
//! round budget ran out or a check failed, 2 on invalid input or an
//! assumption violation that prevents the run.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use taskalloc::dpbrag::derive_constant_params;
use taskalloc::nash::enumerate_optimal_partitions_with_cap;
use taskalloc::{finite_time_bound, RewardMatrix, StepSizeMatrix, WeightMatrix};
use taskalloc_cli::builtin::{builtin, NAMES};
use taskalloc_cli::report::{allocation_to_lists, encode_f64, ne_verdicts, read_trajectory_final};
use taskalloc_cli::run::run_scenario;
use taskalloc_cli::scenario::{parse_matrix_csv, Overrides, Scenario};

#[derive(Parser)]
#[command(name = "taskalloc", version, about = "Task-allocation games: simulate, verify, enumerate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file: simulate, verify, and write CSV + report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Run a built-in scenario by name (see --list).
    Replicate {
        name: Option<String>,
        /// List the built-in scenario names.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Check both equilibrium characterizations for a weight matrix.
    VerifyNe {
        /// Weight matrix CSV, or a trajectory CSV with --trajectory.
        #[arg(long)]
        weights: PathBuf,
        /// Treat --weights as a trajectory and use its final round.
        #[arg(long)]
        trajectory: bool,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Tolerance for the weight-game check.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Tolerance for reading the translated support.
        #[arg(long, default_value_t = 1e-9)]
        support_tolerance: f64,
    },
    /// Enumerate every optimal partition of an instance.
    Enumerate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Cap on the n^m search space.
        #[arg(long, default_value_t = taskalloc::nash::DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Worst-case rounds until the centralized dynamics is stationary.
    Bound {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Uniform step size.
        #[arg(long, conflicts_with = "gamma_file")]
        gamma: Option<f64>,
        /// Per-agent, per-task step-size matrix CSV.
        #[arg(long)]
        gamma_file: Option<PathBuf>,
    },
    /// Derive admissible constant step sizes and the injection period.
    DeriveParams {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Graph-diameter surrogate (true diameter, or the agent count).
        #[arg(long)]
        diameter: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        nu: f64,
    },
}

#[derive(Args)]
struct CommonRunArgs {
    /// Output directory for the trajectory CSV and report.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Replaces every seed the scenario carries.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Equilibrium-check tolerance for trajectory endpoints.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct ProblemArgs {
    /// Reward matrix CSV (rows = agents, columns = tasks).
    #[arg(long, conflicts_with = "scenario")]
    rewards: Option<PathBuf>,
    /// Scenario file whose problem table supplies the rewards.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

impl ProblemArgs {
    fn load(&self) -> Result<RewardMatrix> {
        match (&self.rewards, &self.scenario) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(RewardMatrix::from_rows(&parse_matrix_csv(&text)?)?)
            }
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Scenario::from_toml(&text)?.problem.build(None)
            }
            _ => bail!("supply exactly one of --rewards or --scenario"),
        }
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, common } => {
            let text = fs::read_to_string(&scenario)
                .with_context(|| format!("reading {}", scenario.display()))?;
            run_and_report(&text, &common)
        }
        Command::Replicate { name, list, common } => {
            if list {
                for name in NAMES {
                    println!("{name}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let name = name.ok_or_else(|| anyhow!("give a scenario name or --list"))?;
            let text = builtin(&name)
                .ok_or_else(|| anyhow!("no built-in scenario {name:?}; try --list"))?;
            run_and_report(text, &common)
        }
        Command::VerifyNe {
            weights,
            trajectory,
            problem,
            tolerance,
            support_tolerance,
        } => {
            let rewards = problem.load()?;
            let matrix = if trajectory {
                read_trajectory_final(&weights)?.1
            } else {
                let text = fs::read_to_string(&weights)
                    .with_context(|| format!("reading {}", weights.display()))?;
                WeightMatrix::from_rows(&parse_matrix_csv(&text)?)?
            };
            let (weight_ne, partition_ne, support) =
                ne_verdicts(&matrix, &rewards, tolerance, support_tolerance)?;
            println!("weight-game ne: {weight_ne}");
            println!("partition-game ne of support: {partition_ne}");
            println!("support: {support}");
            Ok(exit_flag(weight_ne && partition_ne))
        }
        Command::Enumerate { problem, cap } => {
            let rewards = problem.load()?;
            let set = enumerate_optimal_partitions_with_cap(&rewards, cap)?;
            println!("optimal value: {}", encode_f64(set.optimal_value));
            println!("optimal partitions: {}", set.partitions.len());
            for partition in &set.partitions {
                println!("{}", render_allocation(&allocation_to_lists(partition.profile())));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound {
            problem,
            gamma,
            gamma_file,
        } => {
            let rewards = problem.load()?;
            let steps = match (gamma, gamma_file) {
                (Some(g), None) => StepSizeMatrix::uniform(rewards.agents(), rewards.tasks(), g)?,
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    StepSizeMatrix::from_rows(&parse_matrix_csv(&text)?)?
                }
                _ => bail!("supply exactly one of --gamma or --gamma-file"),
            };
            let bound = finite_time_bound(&rewards, &steps)?;
            println!("stationary after at most {bound} rounds");
            Ok(ExitCode::SUCCESS)
        }
        Command::DeriveParams {
            problem,
            diameter,
            epsilon,
            nu,
        } => {
            let rewards = problem.load()?;
            let derived = derive_constant_params(&rewards, diameter, epsilon, nu)?;
            println!("mu: {}", encode_f64(derived.mu));
            println!("alpha_min: {}", encode_f64(derived.alpha_min));
            println!("minimal period: {}", derived.period);
            for task in 1..=rewards.tasks() {
                println!(
                    "task {task}: spread {} half-gap {} alpha {}",
                    encode_f64(derived.spread[task - 1]),
                    encode_f64(derived.half_gap[task - 1]),
                    encode_f64(derived.alpha.value(1, task)),
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_and_report(scenario_text: &str, common: &CommonRunArgs) -> Result<ExitCode> {
    let scenario = Scenario::from_toml(scenario_text)?;
    let overrides = Overrides {
        seed: common.seed,
        max_rounds: common.max_rounds,
        tolerance: common.tolerance,
    };
    let resolved = scenario.resolve(&overrides)?;
    let output = run_scenario(&resolved, &common.out)?;
    let report = &output.report;

    println!("scenario: {} ({})", report.scenario, report.algorithm);
    println!("rounds: {}", report.rounds_run);
    if let Some(t) = report.converged_at {
        println!("fixed point at round {t}");
    }
    if let Some(t) = report.settled_at {
        println!("settled (per-round change at threshold) at round {t}");
    }
    if let Some(t) = report.settle_round {
        println!("settle round: {t}");
    }
    println!("allocation: {}", render_allocation(&report.final_allocation));
    println!(
        "weight-game ne: {} | partition-game ne: {}",
        report.weights_are_ne, report.allocation_is_partition_ne
    );
    if let (Some(bound), Some(t)) = (report.finite_time_bound, report.converged_at) {
        println!("finite-time bound {bound}, reached in {t}");
    }
    if !report.assumption_violations.is_empty() {
        println!(
            "assumption violations on tasks {:?}",
            report.assumption_violations
        );
    }
    println!("report: {}", output.report_path.display());
    println!("trajectory: {}", output.trajectory_path.display());
    Ok(exit_flag(report.converged))
}

fn render_allocation(subsets: &[Vec<usize>]) -> String {
    let parts: Vec<String> = subsets
        .iter()
        .enumerate()
        .map(|(idx, tasks)| {
            let inner: Vec<String> = tasks.iter().map(usize::to_string).collect();
            format!("V{}={{{}}}", idx + 1, inner.join(","))
        })
        .collect();
    parts.join(" ")
}

fn exit_flag(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
