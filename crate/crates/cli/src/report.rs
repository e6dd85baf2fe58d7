//! Run reports and trajectory CSV files.
//!
//! The trajectory format is one row per (round, agent, task) with header
//! `t,agent,task,w,M,S,e,z`; the register columns stay empty for
//! centralized runs. Floats are written with 17 significant digits so a
//! re-read reproduces every value exactly.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use taskalloc::dpbrag::{DpbragRun, RewardSequence};
use taskalloc::pbrag::Trajectory;
use taskalloc::{
    check_partition_ne, check_weight_ne, objective_value, translated_support_tol,
    AllocationProfile, Partition, RewardMatrix, WeightMatrix,
};

/// Round-trip exact float encoding (17 significant digits).
pub fn encode_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub algorithm: String,
    pub agents: usize,
    pub tasks: usize,
    pub rounds_run: usize,
    /// Overall verdict: the dynamics reached a fixed point / settled, or
    /// the allocation stabilized, within the round budget.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settled_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settle_round: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allocation_stable_from: Option<usize>,
    pub final_allocation: Vec<Vec<usize>>,
    pub allocation_is_partition_ne: bool,
    pub weights_are_ne: bool,
    pub ne_tolerance: f64,
    pub support_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_partitions: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allocation_is_optimal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_time_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_satisfied: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_params: Option<DerivedSummary>,
    /// Tasks where every agent is dominating.
    pub assumption_violations: Vec<usize>,
    pub unique_dominating: bool,
    /// False when the run's parameters fall outside the convergence
    /// guarantees (degenerate gaps, too-small period, oversized steps).
    pub within_guarantees: bool,
    /// Scalars crossing the network per round (0 for centralized runs,
    /// which need no message counting).
    pub scalars_per_round: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DerivedSummary {
    pub alpha_min: f64,
    pub mu: f64,
    pub minimal_period: usize,
    pub epsilon: f64,
    pub nu: f64,
    pub diameter_bound: usize,
}

impl RunReport {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).context("serializing report")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing report")
    }
}

/// Subset rendering for reports: 1-based task ids per agent.
pub fn allocation_to_lists(profile: &AllocationProfile) -> Vec<Vec<usize>> {
    profile
        .subsets()
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect()
}

/// Both equilibrium verdicts for a weight matrix: the relaxed game at
/// `ne_tol` and the combinatorial game on the translated support at
/// `support_tol`.
pub fn ne_verdicts(
    weights: &WeightMatrix,
    rewards: &RewardMatrix,
    ne_tol: f64,
    support_tol: f64,
) -> Result<(bool, bool, AllocationProfile)> {
    let weight_ne = check_weight_ne(weights, rewards, ne_tol)?.is_ne();
    let support = translated_support_tol(weights, support_tol);
    let partition_ne = check_partition_ne(&support, rewards)?.is_ne();
    Ok((weight_ne, partition_ne, support))
}

/// Objective of the support when it happens to be a valid partition.
pub fn support_objective(support: &AllocationProfile, rewards: &RewardMatrix) -> Option<f64> {
    Partition::new(support.clone())
        .ok()
        .and_then(|p| objective_value(&p, rewards).ok())
}

/// Write a centralized trajectory (register columns empty).
pub fn write_pbrag_trajectory(path: &Path, trajectory: &Trajectory) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writer.write_record(["t", "agent", "task", "w", "M", "S", "e", "z"])?;
    for (t, state) in trajectory.states.iter().enumerate() {
        for agent in 1..=state.agents() {
            for task in 1..=state.tasks() {
                writer.write_record([
                    t.to_string(),
                    agent.to_string(),
                    task.to_string(),
                    encode_f64(state.value(agent, task)),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ])?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

/// Write a distributed trajectory including the per-agent registers and the
/// reward sample of each round.
pub fn write_dpbrag_trajectory(
    path: &Path,
    run: &DpbragRun,
    sequence: &RewardSequence,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writer.write_record(["t", "agent", "task", "w", "M", "S", "e", "z"])?;
    for state in &run.log {
        let t = state.round;
        for agent in 1..=state.weights.agents() {
            for task in 1..=state.weights.tasks() {
                writer.write_record([
                    t.to_string(),
                    agent.to_string(),
                    task.to_string(),
                    encode_f64(state.weights.value(agent, task)),
                    encode_f64(state.max_estimate(agent, task)),
                    encode_f64(state.submax_estimate(agent, task)),
                    encode_f64(state.injected(agent, task)),
                    encode_f64(sequence.sample(agent, task, t)),
                ])?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

/// Read back the final-round weight matrix of a trajectory CSV.
pub fn read_trajectory_final(path: &Path) -> Result<(usize, WeightMatrix)> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rounds = 0usize;
    let mut agents = 0usize;
    let mut tasks = 0usize;
    let mut cells: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let t: usize = record[0].parse()?;
        let agent: usize = record[1].parse()?;
        let task: usize = record[2].parse()?;
        let w: f64 = record[3].parse()?;
        rounds = rounds.max(t);
        agents = agents.max(agent);
        tasks = tasks.max(task);
        cells.insert((t, agent, task), w);
    }
    if cells.is_empty() {
        bail!("trajectory file has no rows");
    }
    let mut values = vec![0.0; agents * tasks];
    for agent in 1..=agents {
        for task in 1..=tasks {
            values[(agent - 1) * tasks + (task - 1)] = *cells
                .get(&(rounds, agent, task))
                .with_context(|| format!("row missing for t={rounds} agent={agent} task={task}"))?;
        }
    }
    Ok((rounds, WeightMatrix::new(agents, tasks, values)?))
}
