//! Scenario execution: dispatch to the dynamics, verify the outcome, and
//! emit the trajectory CSV plus the report.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use taskalloc::nash::enumerate_optimal_partitions;
use taskalloc::pbrag::run_pbrag_settle;
use taskalloc::{check_assumptions, finite_time_bound, run_dpbrag};

use crate::report::{
    allocation_to_lists, ne_verdicts, support_objective, write_dpbrag_trajectory,
    write_pbrag_trajectory, DerivedSummary, RunReport,
};
use crate::scenario::{Algorithm, Resolved};

pub struct RunOutput {
    pub report: RunReport,
    pub trajectory_path: PathBuf,
    pub report_path: PathBuf,
}

/// Stable support must persist for this many injection periods to count as
/// a converged distributed run.
const STABLE_PERIODS: usize = 2;

pub fn run_scenario(resolved: &Resolved, out_dir: &Path) -> Result<RunOutput> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let rewards = &resolved.rewards;
    let assumptions = check_assumptions(rewards);
    let optimal = enumerate_optimal_partitions(rewards).ok();

    let trajectory_path = out_dir.join(format!("{}-trajectory.csv", resolved.name));
    let report_path = out_dir.join(format!("{}-report.toml", resolved.name));

    let mut report = RunReport {
        scenario: resolved.name.clone(),
        algorithm: resolved.algorithm.name().to_string(),
        agents: rewards.agents(),
        tasks: rewards.tasks(),
        rounds_run: 0,
        converged: false,
        converged_at: None,
        settled_at: None,
        settle_round: None,
        allocation_stable_from: None,
        final_allocation: Vec::new(),
        allocation_is_partition_ne: false,
        weights_are_ne: false,
        ne_tolerance: resolved.ne_tolerance,
        support_tolerance: resolved.support_tolerance,
        objective: None,
        optimal_value: optimal.as_ref().map(|set| set.optimal_value),
        optimal_partitions: optimal.as_ref().map(|set| {
            set.partitions
                .iter()
                .map(|p| allocation_to_lists(p.profile()))
                .collect()
        }),
        allocation_is_optimal: None,
        finite_time_bound: None,
        bound_satisfied: None,
        derived_params: None,
        within_guarantees: assumptions.violations().is_empty(),
        assumption_violations: assumptions.violations(),
        unique_dominating: assumptions.all_unique_dominating(),
        scalars_per_round: 0,
    };

    let final_weights = match resolved.algorithm {
        Algorithm::Pbrag => {
            let cfg = resolved.pbrag.as_ref().expect("resolved pbrag scenario");
            let trajectory = run_pbrag_settle(
                &resolved.initial,
                rewards,
                &cfg.steps,
                resolved.max_rounds,
                cfg.settle_tolerance,
            )?;
            report.rounds_run = trajectory.rounds();
            report.converged_at = trajectory.converged_at;
            report.settled_at = trajectory.stalled_at;
            report.converged = trajectory.converged_at.is_some() || trajectory.stalled_at.is_some();
            report.finite_time_bound = finite_time_bound(rewards, &cfg.steps).ok();
            report.bound_satisfied = match (report.converged_at, report.finite_time_bound) {
                (Some(t), Some(bound)) => Some(t <= bound),
                _ => None,
            };
            write_pbrag_trajectory(&trajectory_path, &trajectory)?;
            trajectory.final_state().clone()
        }
        Algorithm::Dpbrag => {
            let cfg = resolved.dpbrag.as_ref().expect("resolved dpbrag scenario");
            let run = run_dpbrag(
                &resolved.initial,
                &cfg.graph,
                &cfg.sequence,
                &cfg.params,
                resolved.max_rounds,
                resolved.support_tolerance,
            )?;
            report.rounds_run = run.rounds();
            report.settle_round = run.settle_round;
            report.allocation_stable_from = Some(run.allocation_stable_from);
            report.converged = run.stabilized(STABLE_PERIODS * cfg.params.period);
            report.scalars_per_round = run.scalars_per_round;
            report.within_guarantees &= cfg.within_guarantees;
            report.derived_params = cfg.derivation.as_ref().map(|d| DerivedSummary {
                alpha_min: d.alpha_min,
                mu: d.mu,
                minimal_period: d.period,
                epsilon: d.epsilon,
                nu: d.nu,
                diameter_bound: d.diameter_bound,
            });
            write_dpbrag_trajectory(&trajectory_path, &run, &cfg.sequence)?;
            run.final_state().weights.clone()
        }
    };

    let (weight_ne, partition_ne, support) = ne_verdicts(
        &final_weights,
        rewards,
        resolved.ne_tolerance,
        resolved.support_tolerance,
    )?;
    report.weights_are_ne = weight_ne;
    report.allocation_is_partition_ne = partition_ne;
    report.objective = support_objective(&support, rewards);
    report.final_allocation = allocation_to_lists(&support);
    if let Some(set) = &optimal {
        report.allocation_is_optimal = Some(
            set.partitions
                .iter()
                .any(|p| p.profile().subsets() == support.subsets()),
        );
    }

    fs::write(&report_path, report.to_toml()?)
        .with_context(|| format!("writing {}", report_path.display()))?;
    Ok(RunOutput {
        report,
        trajectory_path,
        report_path,
    })
}
