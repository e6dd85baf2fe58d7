//! Equilibrium characterizations for both games and exhaustive optimal-
//! partition enumeration.
//!
//! Both games share the same equilibrium structure: every task must be
//! claimed at full strength by some dominating agent, and no non-dominating
//! agent may claim it. The checkers here test those two properties directly
//! in `O(nm)`; the brute-force deviation search equivalent lives in
//! [`crate::oracle`] and is used by the test suites.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{
    check_weight_sizes, dominating_agents, objective_value, AgentId, AllocationProfile, Partition,
    RewardMatrix, TaskId, WeightMatrix,
};

/// Which of the two equilibrium properties a profile violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeProperty {
    /// No dominating agent claims the task at full strength.
    DominatingCoverage,
    /// A non-dominating agent claims the task.
    NonDominatingClaim,
}

/// One equilibrium violation. `agent` is absent for coverage violations,
/// which are a property of the whole task column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeViolation {
    pub agent: Option<AgentId>,
    pub task: TaskId,
    pub property: NeProperty,
}

/// Outcome of an equilibrium check; the profile is an equilibrium exactly
/// when no violations were found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeReport {
    pub violations: Vec<NeViolation>,
}

impl NeReport {
    pub fn is_ne(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the combinatorial game's equilibrium characterization: every task
/// is held by some dominating agent and by no non-dominating agent.
pub fn check_partition_ne(profile: &AllocationProfile, rewards: &RewardMatrix) -> Result<NeReport> {
    if profile.agents() != rewards.agents() || profile.tasks() != rewards.tasks() {
        return Err(Error::SizeMismatch {
            expected_rows: rewards.agents(),
            expected_cols: rewards.tasks(),
            rows: profile.agents(),
            cols: profile.tasks(),
        });
    }
    let mut violations = Vec::new();
    for task in 1..=rewards.tasks() {
        let dominating = dominating_agents(task, rewards)?;
        if !dominating.iter().any(|&i| profile.holds(i, task)) {
            violations.push(NeViolation {
                agent: None,
                task,
                property: NeProperty::DominatingCoverage,
            });
        }
        for agent in 1..=rewards.agents() {
            if !dominating.contains(&agent) && profile.holds(agent, task) {
                violations.push(NeViolation {
                    agent: Some(agent),
                    task,
                    property: NeProperty::NonDominatingClaim,
                });
            }
        }
    }
    Ok(NeReport { violations })
}

/// Check the relaxed game's equilibrium characterization within `tol`:
/// some dominating agent's weight is 1 on every task, and non-dominating
/// agents' weights are 0. Weights of dominating agents below 1 are
/// unconstrained.
pub fn check_weight_ne(
    weights: &WeightMatrix,
    rewards: &RewardMatrix,
    tol: f64,
) -> Result<NeReport> {
    check_weight_sizes(weights, rewards)?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            requirement: "finite and >= 0",
        });
    }
    let mut violations = Vec::new();
    for task in 1..=rewards.tasks() {
        let dominating = dominating_agents(task, rewards)?;
        if !dominating
            .iter()
            .any(|&i| (weights.value(i, task) - 1.0).abs() <= tol)
        {
            violations.push(NeViolation {
                agent: None,
                task,
                property: NeProperty::DominatingCoverage,
            });
        }
        for agent in 1..=rewards.agents() {
            if !dominating.contains(&agent) && weights.value(agent, task).abs() > tol {
                violations.push(NeViolation {
                    agent: Some(agent),
                    task,
                    property: NeProperty::NonDominatingClaim,
                });
            }
        }
    }
    Ok(NeReport { violations })
}

/// All partitions attaining the optimal objective value, plus that value.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSet {
    pub partitions: Vec<Partition>,
    pub optimal_value: f64,
}

/// Default guard on the `n^m` search space of [`enumerate_optimal_partitions`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Enumerate every objective-maximizing partition.
///
/// Tasks decouple in the objective, so the optimal partitions are exactly
/// the products of per-task argmax choices; the full `n^m` space is never
/// materialized but still bounds the work via `cap`.
pub fn enumerate_optimal_partitions_with_cap(
    rewards: &RewardMatrix,
    cap: u64,
) -> Result<OptimalSet> {
    let n = rewards.agents();
    let m = rewards.tasks();
    if (n as f64).powi(m as i32) > cap as f64 {
        return Err(Error::EnumerationCap {
            agents: n,
            tasks: m,
            cap,
        });
    }
    let per_task: Vec<Vec<AgentId>> = (1..=m)
        .map(|task| Ok(dominating_agents(task, rewards)?.into_iter().collect()))
        .collect::<Result<_>>()?;
    let optimal_value = (1..=m)
        .map(|task| rewards.value(per_task[task - 1][0], task))
        .sum();

    let mut partitions = Vec::new();
    let mut owners = vec![0usize; m];
    let mut choice = vec![0usize; m];
    loop {
        for task in 0..m {
            owners[task] = per_task[task][choice[task]];
        }
        partitions.push(Partition::from_owners(n, &owners)?);
        // Odometer over the per-task argmax sets, last task fastest.
        let mut pos = m;
        loop {
            if pos == 0 {
                partitions.sort();
                // Strict increase doubles as a duplicate-freeness check.
                debug_assert!(partitions.windows(2).all(|w| w[0] < w[1]));
                return Ok(OptimalSet {
                    partitions,
                    optimal_value,
                });
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < per_task[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// [`enumerate_optimal_partitions_with_cap`] with the default cap.
pub fn enumerate_optimal_partitions(rewards: &RewardMatrix) -> Result<OptimalSet> {
    enumerate_optimal_partitions_with_cap(rewards, DEFAULT_ENUMERATION_CAP)
}

/// True when every optimal partition is an equilibrium of the combinatorial
/// game.
pub fn verify_inclusion(rewards: &RewardMatrix) -> Result<bool> {
    let optimal = enumerate_optimal_partitions(rewards)?;
    for partition in &optimal.partitions {
        if !check_partition_ne(partition.profile(), rewards)?.is_ne() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique equilibrium weight matrix when every task has a unique
/// dominating agent: 1 on each task's dominating agent, 0 elsewhere.
/// Absent whenever any task has a tie at the top.
pub fn unique_ne(rewards: &RewardMatrix) -> Option<WeightMatrix> {
    let n = rewards.agents();
    let m = rewards.tasks();
    let mut values = vec![0.0; n * m];
    for task in 1..=m {
        let dominating = dominating_agents(task, rewards).ok()?;
        if dominating.len() != 1 {
            return None;
        }
        let agent = *dominating.iter().next()?;
        values[(agent - 1) * m + (task - 1)] = 1.0;
    }
    WeightMatrix::new(n, m, values).ok()
}

/// Objective value of the best partition (helper for reports).
pub fn optimal_value(rewards: &RewardMatrix) -> f64 {
    (1..=rewards.tasks())
        .map(|task| {
            (1..=rewards.agents())
                .map(|agent| rewards.value(agent, task))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

/// Check that a partition attains the enumerated optimal value (used by the
/// test suites to cross-validate enumeration output).
pub fn attains_value(partition: &Partition, rewards: &RewardMatrix, value: f64, tol: f64) -> bool {
    objective_value(partition, rewards)
        .map(|j| (j - value).abs() <= tol)
        .unwrap_or(false)
}

/// Membership helper: exact set of subsets comparison against an optimal set.
pub fn contains_partition(set: &OptimalSet, subsets: &[BTreeSet<TaskId>]) -> bool {
    set.partitions
        .iter()
        .any(|p| p.profile().subsets() == subsets)
}
