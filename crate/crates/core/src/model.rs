//! Problem data and the primitive quantities of both allocation games.
//!
//! An instance is a nonnegative reward matrix over `n` agents and `m` tasks.
//! Agents either claim task subsets (the combinatorial game) or assign each
//! task a weight in `[0, 1]` (the continuous relaxation). This module holds
//! the matrix types, the two utility functions, the per-coordinate utility
//! gradient, and the dominating-agent structure that drives everything else.
//!
//! Agent ids run `1..=n` and task ids `1..=m` throughout the crate.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Agent identifier, `1..=n`.
pub type AgentId = usize;
/// Task identifier, `1..=m`.
pub type TaskId = usize;

/// Number of agents and tasks in an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemSize {
    pub agents: usize,
    pub tasks: usize,
}

impl ProblemSize {
    pub fn new(agents: usize, tasks: usize) -> Result<Self> {
        if agents == 0 || tasks == 0 {
            return Err(Error::EmptyDimension { agents, tasks });
        }
        Ok(Self { agents, tasks })
    }

    /// Iterate agent ids `1..=n`.
    pub fn agents_iter(&self) -> impl Iterator<Item = AgentId> {
        1..=self.agents
    }

    /// Iterate task ids `1..=m`.
    pub fn tasks_iter(&self) -> impl Iterator<Item = TaskId> {
        1..=self.tasks
    }
}

/// Dense row-major `n x m` grid with 1-based (agent, task) accessors.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Grid {
    size: ProblemSize,
    values: Vec<f64>,
}

impl Grid {
    pub(crate) fn new(size: ProblemSize, values: Vec<f64>) -> Result<Self> {
        if values.len() != size.agents * size.tasks {
            return Err(Error::SizeMismatch {
                expected_rows: size.agents,
                expected_cols: size.tasks,
                rows: values.len() / size.tasks.max(1),
                cols: size.tasks,
            });
        }
        Ok(Self { size, values })
    }

    pub(crate) fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let size = ProblemSize::new(n, m)?;
        for row in rows {
            if row.len() != m {
                return Err(Error::SizeMismatch {
                    expected_rows: n,
                    expected_cols: m,
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        let values = rows.iter().flatten().copied().collect();
        Ok(Self { size, values })
    }

    pub(crate) fn constant(size: ProblemSize, value: f64) -> Self {
        Self {
            values: vec![value; size.agents * size.tasks],
            size,
        }
    }

    pub(crate) fn size(&self) -> ProblemSize {
        self.size
    }

    #[inline]
    pub(crate) fn get(&self, agent: AgentId, task: TaskId) -> f64 {
        debug_assert!(agent >= 1 && agent <= self.size.agents);
        debug_assert!(task >= 1 && task <= self.size.tasks);
        self.values[(agent - 1) * self.size.tasks + (task - 1)]
    }

    #[inline]
    pub(crate) fn set(&mut self, agent: AgentId, task: TaskId, value: f64) {
        self.values[(agent - 1) * self.size.tasks + (task - 1)] = value;
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn check_agent(&self, agent: AgentId) -> Result<()> {
        if agent == 0 || agent > self.size.agents {
            return Err(Error::InvalidAgent {
                id: agent,
                max: self.size.agents,
            });
        }
        Ok(())
    }

    pub(crate) fn check_task(&self, task: TaskId) -> Result<()> {
        if task == 0 || task > self.size.tasks {
            return Err(Error::InvalidTask {
                id: task,
                max: self.size.tasks,
            });
        }
        Ok(())
    }

    /// Validate every entry, reporting the first offending coordinate.
    pub(crate) fn validate(
        &self,
        requirement: &'static str,
        ok: impl Fn(f64) -> bool,
    ) -> Result<()> {
        for agent in self.size.agents_iter() {
            for task in self.size.tasks_iter() {
                let value = self.get(agent, task);
                if !ok(value) {
                    return Err(Error::InvalidEntry {
                        agent,
                        task,
                        value,
                        requirement,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Nonnegative per-agent, per-task rewards: the ground truth of both games.
///
/// Rewards may be given directly or as the elementwise product of a raw
/// reward factor and an importance factor; the product is taken once at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardMatrix {
    grid: Grid,
}

impl RewardMatrix {
    /// Build from per-agent rows of task rewards.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let grid = Grid::from_rows(rows)?;
        grid.validate("finite and >= 0", |v| v.is_finite() && v >= 0.0)?;
        Ok(Self { grid })
    }

    /// Build from flat row-major values.
    pub fn new(agents: usize, tasks: usize, values: Vec<f64>) -> Result<Self> {
        let grid = Grid::new(ProblemSize::new(agents, tasks)?, values)?;
        grid.validate("finite and >= 0", |v| v.is_finite() && v >= 0.0)?;
        Ok(Self { grid })
    }

    /// Build as the elementwise product of a reward factor and an importance
    /// factor, both nonnegative.
    pub fn from_factors(reward: &[Vec<f64>], importance: &[Vec<f64>]) -> Result<Self> {
        let r = Grid::from_rows(reward)?;
        let phi = Grid::from_rows(importance)?;
        if r.size() != phi.size() {
            return Err(Error::SizeMismatch {
                expected_rows: r.size().agents,
                expected_cols: r.size().tasks,
                rows: phi.size().agents,
                cols: phi.size().tasks,
            });
        }
        r.validate("finite and >= 0", |v| v.is_finite() && v >= 0.0)?;
        phi.validate("finite and >= 0", |v| v.is_finite() && v >= 0.0)?;
        let values = r
            .values()
            .iter()
            .zip(phi.values())
            .map(|(a, b)| a * b)
            .collect();
        let grid = Grid::new(r.size(), values)?;
        Ok(Self { grid })
    }

    pub fn size(&self) -> ProblemSize {
        self.grid.size()
    }

    pub fn agents(&self) -> usize {
        self.grid.size().agents
    }

    pub fn tasks(&self) -> usize {
        self.grid.size().tasks
    }

    /// Reward of `agent` for `task`.
    #[inline]
    pub fn value(&self, agent: AgentId, task: TaskId) -> f64 {
        self.grid.get(agent, task)
    }

    pub fn values(&self) -> &[f64] {
        self.grid.values()
    }

    pub(crate) fn check_agent(&self, agent: AgentId) -> Result<()> {
        self.grid.check_agent(agent)
    }

    pub(crate) fn check_task(&self, task: TaskId) -> Result<()> {
        self.grid.check_task(task)
    }
}

/// Per-agent, per-task weights in `[0, 1]`: the strategy profile of the
/// relaxed game and the state of the weight dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    grid: Grid,
}

impl WeightMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let grid = Grid::from_rows(rows)?;
        grid.validate("in [0, 1]", |v| (0.0..=1.0).contains(&v))?;
        Ok(Self { grid })
    }

    pub fn new(agents: usize, tasks: usize, values: Vec<f64>) -> Result<Self> {
        let grid = Grid::new(ProblemSize::new(agents, tasks)?, values)?;
        grid.validate("in [0, 1]", |v| (0.0..=1.0).contains(&v))?;
        Ok(Self { grid })
    }

    pub fn zeros(agents: usize, tasks: usize) -> Result<Self> {
        Ok(Self {
            grid: Grid::constant(ProblemSize::new(agents, tasks)?, 0.0),
        })
    }

    pub fn ones(agents: usize, tasks: usize) -> Result<Self> {
        Ok(Self {
            grid: Grid::constant(ProblemSize::new(agents, tasks)?, 1.0),
        })
    }

    pub fn size(&self) -> ProblemSize {
        self.grid.size()
    }

    pub fn agents(&self) -> usize {
        self.grid.size().agents
    }

    pub fn tasks(&self) -> usize {
        self.grid.size().tasks
    }

    /// Weight `agent` puts on `task`.
    #[inline]
    pub fn value(&self, agent: AgentId, task: TaskId) -> f64 {
        self.grid.get(agent, task)
    }

    pub fn values(&self) -> &[f64] {
        self.grid.values()
    }

    /// Copy with a single entry replaced (validated).
    pub fn with_entry(&self, agent: AgentId, task: TaskId, value: f64) -> Result<Self> {
        self.grid.check_agent(agent)?;
        self.grid.check_task(task)?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidEntry {
                agent,
                task,
                value,
                requirement: "in [0, 1]",
            });
        }
        let mut grid = self.grid.clone();
        grid.set(agent, task, value);
        Ok(Self { grid })
    }

    /// Largest absolute entry difference against another matrix.
    pub fn max_abs_diff(&self, other: &WeightMatrix) -> Result<f64> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                expected_rows: self.agents(),
                expected_cols: self.tasks(),
                rows: other.agents(),
                cols: other.tasks(),
            });
        }
        Ok(self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn grid(&self) -> &Grid {
        &self.grid
    }

    pub(crate) fn from_grid(grid: Grid) -> Self {
        Self { grid }
    }
}

/// Ordered tuple of task subsets, one per agent. Subsets may overlap or
/// leave tasks unassigned; this is the strategy profile of the combinatorial
/// game.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AllocationProfile {
    tasks: usize,
    subsets: Vec<BTreeSet<TaskId>>,
}

impl AllocationProfile {
    pub fn new(tasks: usize, subsets: Vec<BTreeSet<TaskId>>) -> Result<Self> {
        if subsets.is_empty() || tasks == 0 {
            return Err(Error::EmptyDimension {
                agents: subsets.len(),
                tasks,
            });
        }
        for subset in &subsets {
            for &task in subset {
                if task == 0 || task > tasks {
                    return Err(Error::InvalidTask {
                        id: task,
                        max: tasks,
                    });
                }
            }
        }
        Ok(Self { tasks, subsets })
    }

    /// Profile with every subset empty.
    pub fn empty(agents: usize, tasks: usize) -> Result<Self> {
        Self::new(tasks, vec![BTreeSet::new(); agents])
    }

    pub fn agents(&self) -> usize {
        self.subsets.len()
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn subset(&self, agent: AgentId) -> Result<&BTreeSet<TaskId>> {
        self.subsets
            .get(agent.wrapping_sub(1))
            .ok_or(Error::InvalidAgent {
                id: agent,
                max: self.subsets.len(),
            })
    }

    pub fn subsets(&self) -> &[BTreeSet<TaskId>] {
        &self.subsets
    }

    pub fn holds(&self, agent: AgentId, task: TaskId) -> bool {
        self.subsets
            .get(agent.wrapping_sub(1))
            .is_some_and(|s| s.contains(&task))
    }

    /// Copy with one agent's subset replaced.
    pub fn with_subset(&self, agent: AgentId, subset: BTreeSet<TaskId>) -> Result<Self> {
        let mut subsets = self.subsets.clone();
        *subsets
            .get_mut(agent.wrapping_sub(1))
            .ok_or(Error::InvalidAgent {
                id: agent,
                max: self.subsets.len(),
            })? = subset;
        Self::new(self.tasks, subsets)
    }
}

impl fmt::Display for AllocationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, subset) in self.subsets.iter().enumerate() {
            if idx > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (k, task) in subset.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{task}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, ")")
    }
}

/// An allocation profile whose subsets are pairwise disjoint and cover every
/// task: each task is held by exactly one agent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(AllocationProfile);

impl Partition {
    pub fn new(profile: AllocationProfile) -> Result<Self> {
        let mut owner = vec![None::<AgentId>; profile.tasks()];
        for agent in 1..=profile.agents() {
            for &task in profile.subset(agent)? {
                match owner[task - 1] {
                    Some(other) => {
                        return Err(Error::NotAPartition {
                            reason: format!("task {task} held by agents {other} and {agent}"),
                        });
                    }
                    None => owner[task - 1] = Some(agent),
                }
            }
        }
        if let Some(task) = owner.iter().position(Option::is_none) {
            return Err(Error::NotAPartition {
                reason: format!("task {} not held by any agent", task + 1),
            });
        }
        Ok(Self(profile))
    }

    /// Build from a per-task owner list: `owners[q - 1]` is the agent that
    /// holds task `q`.
    pub fn from_owners(agents: usize, owners: &[AgentId]) -> Result<Self> {
        let tasks = owners.len();
        let mut subsets = vec![BTreeSet::new(); agents];
        for (idx, &agent) in owners.iter().enumerate() {
            if agent == 0 || agent > agents {
                return Err(Error::InvalidAgent {
                    id: agent,
                    max: agents,
                });
            }
            subsets[agent - 1].insert(idx + 1);
        }
        Self::new(AllocationProfile::new(tasks, subsets)?)
    }

    /// Everything assigned to a single agent (`n = 1`).
    pub fn single_agent(tasks: usize) -> Result<Self> {
        Self::from_owners(1, &vec![1; tasks])
    }

    pub fn profile(&self) -> &AllocationProfile {
        &self.0
    }

    pub fn into_profile(self) -> AllocationProfile {
        self.0
    }

    pub fn agents(&self) -> usize {
        self.0.agents()
    }

    pub fn tasks(&self) -> usize {
        self.0.tasks()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_profile_sizes(profile: &AllocationProfile, rewards: &RewardMatrix) -> Result<()> {
    if profile.agents() != rewards.agents() || profile.tasks() != rewards.tasks() {
        return Err(Error::SizeMismatch {
            expected_rows: rewards.agents(),
            expected_cols: rewards.tasks(),
            rows: profile.agents(),
            cols: profile.tasks(),
        });
    }
    Ok(())
}

pub(crate) fn check_weight_sizes(weights: &WeightMatrix, rewards: &RewardMatrix) -> Result<()> {
    if weights.size() != rewards.size() {
        return Err(Error::SizeMismatch {
            expected_rows: rewards.agents(),
            expected_cols: rewards.tasks(),
            rows: weights.agents(),
            cols: weights.tasks(),
        });
    }
    Ok(())
}

/// Total reward collected by a valid partition: the planner's objective.
pub fn objective_value(partition: &Partition, rewards: &RewardMatrix) -> Result<f64> {
    check_profile_sizes(partition.profile(), rewards)?;
    let mut total = 0.0;
    for agent in 1..=partition.agents() {
        for &task in partition.profile().subset(agent)? {
            total += rewards.value(agent, task);
        }
    }
    Ok(total)
}

/// Utility of `agent` in the combinatorial game: own reward on each held
/// task minus the best reward among the competitors that also hold it. The
/// competitor maximum over an empty set is 0, so uncontested tasks count as
/// pure gain.
pub fn partition_utility(
    agent: AgentId,
    profile: &AllocationProfile,
    rewards: &RewardMatrix,
) -> Result<f64> {
    check_profile_sizes(profile, rewards)?;
    rewards.check_agent(agent)?;
    let mut total = 0.0;
    for &task in profile.subset(agent)? {
        let best_competitor = (1..=rewards.agents())
            .filter(|&j| j != agent && profile.holds(j, task))
            .map(|j| rewards.value(j, task))
            .fold(0.0, f64::max);
        total += rewards.value(agent, task) - best_competitor;
    }
    Ok(total)
}

/// Utility of `agent` in the relaxed game: for every task, the weighted own
/// reward minus the best opposing weighted reward scaled by the own weight.
/// The opposing maximum is 0 when there are no other agents.
pub fn weight_utility(agent: AgentId, weights: &WeightMatrix, rewards: &RewardMatrix) -> Result<f64> {
    check_weight_sizes(weights, rewards)?;
    rewards.check_agent(agent)?;
    let mut total = 0.0;
    for task in 1..=rewards.tasks() {
        let own = rewards.value(agent, task) * weights.value(agent, task);
        let best_opposing = (1..=rewards.agents())
            .filter(|&j| j != agent)
            .map(|j| rewards.value(j, task) * weights.value(j, task))
            .fold(0.0, f64::max);
        total += own - best_opposing * weights.value(agent, task);
    }
    Ok(total)
}

/// Partial derivative of `agent`'s relaxed-game utility in its weight on
/// `task`: own reward minus the best opposing weighted reward.
pub fn utility_gradient(
    agent: AgentId,
    task: TaskId,
    weights: &WeightMatrix,
    rewards: &RewardMatrix,
) -> Result<f64> {
    check_weight_sizes(weights, rewards)?;
    rewards.check_agent(agent)?;
    rewards.check_task(task)?;
    let best_opposing = (1..=rewards.agents())
        .filter(|&j| j != agent)
        .map(|j| rewards.value(j, task) * weights.value(j, task))
        .fold(0.0, f64::max);
    Ok(rewards.value(agent, task) - best_opposing)
}

/// Agents whose reward for `task` is maximal. Never empty; ties are kept as
/// sets and no tie-breaking is applied.
pub fn dominating_agents(task: TaskId, rewards: &RewardMatrix) -> Result<BTreeSet<AgentId>> {
    rewards.check_task(task)?;
    let best = (1..=rewards.agents())
        .map(|i| rewards.value(i, task))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((1..=rewards.agents())
        .filter(|&i| rewards.value(i, task) >= best)
        .collect())
}

/// Per-agent sets of tasks whose weight equals 1 within `tol`; maps weight
/// profiles to allocation profiles.
pub fn translated_support_tol(weights: &WeightMatrix, tol: f64) -> AllocationProfile {
    let subsets = (1..=weights.agents())
        .map(|agent| {
            (1..=weights.tasks())
                .filter(|&task| (weights.value(agent, task) - 1.0).abs() <= tol)
                .collect()
        })
        .collect();
    AllocationProfile::new(weights.tasks(), subsets)
        .expect("support of a valid weight matrix is a valid profile")
}

/// Exact translated support: tasks whose weight equals 1.
pub fn translated_support(weights: &WeightMatrix) -> AllocationProfile {
    translated_support_tol(weights, 0.0)
}

/// Per-task gap structure of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskAssumption {
    pub task: TaskId,
    pub dominating: BTreeSet<AgentId>,
    /// Every agent is dominating: the degenerate case the theory excludes.
    pub all_dominating: bool,
    pub unique_dominating: bool,
    /// Largest minus smallest reward in the task column.
    pub spread: f64,
    /// Best reward minus best non-argmax agent's reward; 0 under a tie at
    /// the top.
    pub dominance_margin: f64,
    /// Half the gap between the largest and the largest strictly smaller
    /// reward value; 0 only when the whole column is one value.
    pub half_gap: f64,
}

/// Instance health report: one record per task.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub tasks: Vec<TaskAssumption>,
}

impl AssumptionReport {
    /// Tasks where every agent is dominating.
    pub fn violations(&self) -> Vec<TaskId> {
        self.tasks
            .iter()
            .filter(|t| t.all_dominating)
            .map(|t| t.task)
            .collect()
    }

    pub fn all_unique_dominating(&self) -> bool {
        self.tasks.iter().all(|t| t.unique_dominating)
    }

    /// Smallest per-task dominance margin (meaningful when all unique).
    pub fn min_dominance_margin(&self) -> f64 {
        self.tasks
            .iter()
            .map(|t| t.dominance_margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_half_gap(&self) -> f64 {
        self.tasks
            .iter()
            .map(|t| t.half_gap)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Report each task's dominating set, tie structure, and gap quantities.
pub fn check_assumptions(rewards: &RewardMatrix) -> AssumptionReport {
    let n = rewards.agents();
    let tasks = (1..=rewards.tasks())
        .map(|task| {
            let dominating =
                dominating_agents(task, rewards).expect("task id is in range by construction");
            let column: Vec<f64> = (1..=n).map(|i| rewards.value(i, task)).collect();
            let best = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let worst = column.iter().copied().fold(f64::INFINITY, f64::min);
            // Best among agents outside the argmax set (per-agent margin).
            let best_non_argmax = column
                .iter()
                .copied()
                .filter(|&v| v < best)
                .fold(f64::NEG_INFINITY, f64::max);
            let dominance_margin = if dominating.len() == 1 && best_non_argmax.is_finite() {
                best - best_non_argmax
            } else if dominating.len() > 1 {
                0.0
            } else {
                // Unique dominating agent with n = 1: no competitor.
                best
            };
            // Largest value strictly below the maximum; the whole column may
            // be a single value.
            let half_gap = if best_non_argmax.is_finite() {
                0.5 * (best - best_non_argmax)
            } else {
                0.0
            };
            TaskAssumption {
                task,
                all_dominating: dominating.len() == n,
                unique_dominating: dominating.len() == 1,
                dominating,
                spread: best - worst,
                dominance_margin,
                half_gap,
            }
        })
        .collect();
    AssumptionReport { tasks }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two agents, two tasks; both agents tie on the first task.
    pub(crate) fn demo_rewards() -> RewardMatrix {
        RewardMatrix::from_rows(&[vec![0.5, 0.7], vec![0.5, 0.3]]).unwrap()
    }

    fn profile(subsets: &[&[TaskId]]) -> AllocationProfile {
        AllocationProfile::new(
            2,
            subsets
                .iter()
                .map(|s| s.iter().copied().collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn objective_sums_rewards_over_partition() {
        let f = demo_rewards();
        let p = Partition::new(profile(&[&[1, 2], &[]])).unwrap();
        let j = objective_value(&p, &f).unwrap();
        assert!((j - 1.2).abs() < 1e-12);
    }

    #[test]
    fn all_empty_subsets_is_not_a_partition() {
        let p = AllocationProfile::empty(2, 2).unwrap();
        assert!(matches!(
            Partition::new(p),
            Err(Error::NotAPartition { .. })
        ));
    }

    #[test]
    fn overlapping_subsets_are_not_a_partition() {
        let p = profile(&[&[1], &[1, 2]]);
        assert!(matches!(
            Partition::new(p),
            Err(Error::NotAPartition { .. })
        ));
    }

    #[test]
    fn single_agent_objective_is_row_sum() {
        let f = RewardMatrix::from_rows(&[vec![0.2, 0.3, 0.4]]).unwrap();
        let p = Partition::single_agent(3).unwrap();
        let j = objective_value(&p, &f).unwrap();
        assert!((j - 0.9).abs() < 1e-12);
    }

    #[test]
    fn partition_utility_penalizes_contested_tasks() {
        let f = demo_rewards();
        let a = profile(&[&[1, 2], &[1]]);
        // Task 1 contested at equal value, task 2 uncontested.
        assert!((partition_utility(1, &a, &f).unwrap() - 0.7).abs() < 1e-12);
        assert!((partition_utility(2, &a, &f).unwrap() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn partition_utility_of_empty_subset_is_zero() {
        let f = demo_rewards();
        let a = profile(&[&[1, 2], &[]]);
        assert_eq!(partition_utility(2, &a, &f).unwrap(), 0.0);
    }

    #[test]
    fn partition_utility_rejects_bad_agent() {
        let f = demo_rewards();
        let a = profile(&[&[1], &[2]]);
        assert!(matches!(
            partition_utility(3, &a, &f),
            Err(Error::InvalidAgent { .. })
        ));
    }

    #[test]
    fn weight_utility_on_binary_profile() {
        let f = demo_rewards();
        let w = WeightMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((weight_utility(1, &w, &f).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn weight_utility_zero_for_zero_weights() {
        let f = demo_rewards();
        let w = WeightMatrix::zeros(2, 2).unwrap();
        assert_eq!(weight_utility(1, &w, &f).unwrap(), 0.0);
        assert_eq!(weight_utility(2, &w, &f).unwrap(), 0.0);
    }

    #[test]
    fn binary_weight_utility_matches_partition_utility() {
        // Binary, partition-valid weights give both games the same payoff.
        let f = RewardMatrix::from_rows(&[
            vec![0.9, 0.1, 0.5],
            vec![0.2, 0.8, 0.3],
            vec![0.4, 0.6, 0.7],
        ])
        .unwrap();
        let w =
            WeightMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
                .unwrap();
        let c = translated_support(&w);
        for agent in 1..=3 {
            let wu = weight_utility(agent, &w, &f).unwrap();
            let pu = partition_utility(agent, &c, &f).unwrap();
            assert!((wu - pu).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_examples() {
        let f = demo_rewards();
        // Competitor at weight 1 on the tied task: zero slope.
        let w = WeightMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(utility_gradient(1, 1, &w, &f).unwrap(), 0.0);
        // Dominated on task 2 against a full-weight leader.
        let w = WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((utility_gradient(2, 2, &w, &f).unwrap() - (-0.4)).abs() < 1e-12);
        // No competition: gradient is the own reward.
        let w = WeightMatrix::zeros(2, 2).unwrap();
        assert_eq!(utility_gradient(1, 2, &w, &f).unwrap(), 0.7);
    }

    #[test]
    fn dominating_agents_examples() {
        let f = demo_rewards();
        assert_eq!(
            dominating_agents(1, &f).unwrap(),
            BTreeSet::from([1, 2])
        );
        assert_eq!(dominating_agents(2, &f).unwrap(), BTreeSet::from([1]));

        let equal = RewardMatrix::from_rows(&[vec![0.4], vec![0.4], vec![0.4]]).unwrap();
        assert_eq!(
            dominating_agents(1, &equal).unwrap(),
            BTreeSet::from([1, 2, 3])
        );
    }

    #[test]
    fn dominating_agents_scale_invariant() {
        let f = RewardMatrix::from_rows(&[vec![0.3, 0.9], vec![0.6, 0.2]]).unwrap();
        let scaled = RewardMatrix::from_rows(&[vec![0.3 * 7.0, 0.9], vec![0.6 * 7.0, 0.2]]).unwrap();
        assert_eq!(
            dominating_agents(1, &f).unwrap(),
            dominating_agents(1, &scaled).unwrap()
        );
    }

    #[test]
    fn translated_support_examples() {
        let w = WeightMatrix::from_rows(&[vec![1.0, 1.0], vec![0.4, 0.0]]).unwrap();
        let c = translated_support(&w);
        assert_eq!(c.subset(1).unwrap(), &BTreeSet::from([1, 2]));
        assert!(c.subset(2).unwrap().is_empty());

        let zero = translated_support(&WeightMatrix::zeros(2, 3).unwrap());
        assert!(zero.subsets().iter().all(BTreeSet::is_empty));

        let full = translated_support(&WeightMatrix::ones(2, 3).unwrap());
        assert!(full
            .subsets()
            .iter()
            .all(|s| s == &BTreeSet::from([1, 2, 3])));
    }

    #[test]
    fn translated_support_is_idempotent() {
        let w = WeightMatrix::from_rows(&[vec![1.0, 0.3], vec![0.999999999, 1.0]]).unwrap();
        let c = translated_support(&w);
        let reencoded = WeightMatrix::from_rows(
            &(1..=2)
                .map(|agent| {
                    (1..=2)
                        .map(|task| if c.holds(agent, task) { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(translated_support(&reencoded), c);
    }

    #[test]
    fn factored_rewards_multiply() {
        let f = RewardMatrix::from_factors(&[vec![0.5, 2.0]], &[vec![0.4, 0.25]]).unwrap();
        assert!((f.value(1, 1) - 0.2).abs() < 1e-15);
        assert!((f.value(1, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_and_non_finite_rewards() {
        assert!(RewardMatrix::from_rows(&[vec![-0.1]]).is_err());
        assert!(RewardMatrix::from_rows(&[vec![f64::NAN]]).is_err());
        assert!(RewardMatrix::from_rows(&[vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn rejects_out_of_range_weights() {
        assert!(WeightMatrix::from_rows(&[vec![1.1]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![-0.0001]]).is_err());
    }

    #[test]
    fn assumption_report_flags_ties_and_violations() {
        let f = demo_rewards();
        let report = check_assumptions(&f);
        // Both agents tie on task 1: everyone dominates, not unique.
        assert_eq!(report.violations(), vec![1]);
        assert!(!report.tasks[0].unique_dominating);
        assert!(report.tasks[1].unique_dominating);
        assert_eq!(report.tasks[0].dominance_margin, 0.0);
        assert!((report.tasks[1].dominance_margin - 0.4).abs() < 1e-12);
        assert!((report.tasks[1].half_gap - 0.2).abs() < 1e-12);

        let identical = RewardMatrix::from_rows(&[vec![0.3, 0.6], vec![0.3, 0.6]]).unwrap();
        assert_eq!(check_assumptions(&identical).violations(), vec![1, 2]);
    }

    #[test]
    fn partition_utilities_sum_to_objective() {
        let f = RewardMatrix::from_rows(&[vec![0.9, 0.1, 0.5], vec![0.2, 0.8, 0.3]]).unwrap();
        let p = Partition::from_owners(2, &[1, 2, 1]).unwrap();
        let total: f64 = (1..=2)
            .map(|i| partition_utility(i, p.profile(), &f).unwrap())
            .sum();
        assert!((total - objective_value(&p, &f).unwrap()).abs() < 1e-12);
    }
}
