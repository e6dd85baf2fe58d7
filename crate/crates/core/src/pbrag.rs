//! Centralized projected best-response gradient dynamics (PBRAG).
//!
//! Each round, every agent moves each weight along its utility gradient and
//! clamps the result to `[0, 1]`. All gradients are evaluated at the start-
//! of-round state (synchronous update), so task columns evolve independently
//! of each other. Fixed points of the step operator are exactly the relaxed
//! game's equilibria, and with unique dominating agents the dynamics reaches
//! one in a computable finite number of rounds.

use crate::error::{Error, Result};
use crate::model::{
    check_assumptions, check_weight_sizes, utility_gradient, Grid, ProblemSize, RewardMatrix,
    WeightMatrix,
};

/// Strictly positive per-agent, per-task step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSizeMatrix {
    grid: Grid,
}

impl StepSizeMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let grid = Grid::from_rows(rows)?;
        grid.validate("finite and > 0", |v| v.is_finite() && v > 0.0)?;
        Ok(Self { grid })
    }

    /// Same step size everywhere.
    pub fn uniform(agents: usize, tasks: usize, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "step",
                value: step,
                requirement: "finite and > 0",
            });
        }
        Ok(Self {
            grid: Grid::constant(ProblemSize::new(agents, tasks)?, step),
        })
    }

    /// Uniform step size `2 / delta` where `delta` is the smallest dominance
    /// margin of the instance. This makes the finite-time bound equal 2, so
    /// the dynamics settles within two rounds from any start. Requires a
    /// unique dominating agent per task.
    pub fn two_step(rewards: &RewardMatrix) -> Result<Self> {
        let delta = min_dominance_margin(rewards)?;
        Self::uniform(rewards.agents(), rewards.tasks(), 2.0 / delta)
    }

    pub fn size(&self) -> ProblemSize {
        self.grid.size()
    }

    #[inline]
    pub fn value(&self, agent: usize, task: usize) -> f64 {
        self.grid.get(agent, task)
    }

    pub fn min(&self) -> f64 {
        self.grid
            .values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Clamp to the unit interval; rejects NaN and infinities.
pub fn clamp01(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(x.clamp(0.0, 1.0))
}

fn check_step_sizes(steps: &StepSizeMatrix, rewards: &RewardMatrix) -> Result<()> {
    if steps.size() != rewards.size() {
        return Err(Error::SizeMismatch {
            expected_rows: rewards.agents(),
            expected_cols: rewards.tasks(),
            rows: steps.size().agents,
            cols: steps.size().tasks,
        });
    }
    Ok(())
}

/// One synchronous round: every coordinate moves along its gradient at the
/// input state and is clamped to `[0, 1]`.
pub fn pbrag_step(
    weights: &WeightMatrix,
    rewards: &RewardMatrix,
    steps: &StepSizeMatrix,
) -> Result<WeightMatrix> {
    check_weight_sizes(weights, rewards)?;
    check_step_sizes(steps, rewards)?;
    let mut next = weights.grid().clone();
    for agent in 1..=rewards.agents() {
        for task in 1..=rewards.tasks() {
            let slope = utility_gradient(agent, task, weights, rewards)?;
            let moved = weights.value(agent, task) + steps.value(agent, task) * slope;
            next.set(agent, task, clamp01(moved)?);
        }
    }
    Ok(WeightMatrix::from_grid(next))
}

/// True when one step moves no coordinate by more than `tol`.
pub fn is_equilibrium_weight(
    weights: &WeightMatrix,
    rewards: &RewardMatrix,
    steps: &StepSizeMatrix,
    tol: f64,
) -> Result<bool> {
    let next = pbrag_step(weights, rewards, steps)?;
    Ok(next.max_abs_diff(weights)? <= tol)
}

/// Recorded run of the dynamics. `states[0]` is the initial condition and
/// each later state is one application of the step operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<WeightMatrix>,
    /// Round at which the state became an exact fixed point.
    pub converged_at: Option<usize>,
    /// Round at which the per-round change dropped to the settle threshold
    /// without reaching an exact fixed point (asymptotic convergence).
    pub stalled_at: Option<usize>,
}

impl Trajectory {
    pub fn final_state(&self) -> &WeightMatrix {
        self.states.last().expect("trajectory holds >= 1 state")
    }

    pub fn rounds(&self) -> usize {
        self.states.len() - 1
    }
}

/// Default per-round change threshold below which a run is considered
/// settled when no exact fixed point is reached.
pub const DEFAULT_SETTLE_TOL: f64 = 1e-12;

/// Iterate [`pbrag_step`] until an exact fixed point (state repeats), the
/// per-round change drops to `settle_tol`, or `max_rounds` is exhausted.
pub fn run_pbrag_settle(
    start: &WeightMatrix,
    rewards: &RewardMatrix,
    steps: &StepSizeMatrix,
    max_rounds: usize,
    settle_tol: f64,
) -> Result<Trajectory> {
    if max_rounds == 0 {
        return Err(Error::InvalidParameter {
            name: "max_rounds",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    let mut states = vec![start.clone()];
    for round in 0..=max_rounds {
        let current = states.last().expect("non-empty");
        let next = pbrag_step(current, rewards, steps)?;
        if next == *current {
            return Ok(Trajectory {
                states,
                converged_at: Some(round),
                stalled_at: None,
            });
        }
        if round == max_rounds {
            break;
        }
        let change = next.max_abs_diff(current)?;
        states.push(next);
        if change <= settle_tol {
            return Ok(Trajectory {
                states,
                converged_at: None,
                stalled_at: Some(round + 1),
            });
        }
    }
    Ok(Trajectory {
        states,
        converged_at: None,
        stalled_at: None,
    })
}

/// [`run_pbrag_settle`] with the default settle threshold.
pub fn run_pbrag(
    start: &WeightMatrix,
    rewards: &RewardMatrix,
    steps: &StepSizeMatrix,
    max_rounds: usize,
) -> Result<Trajectory> {
    run_pbrag_settle(start, rewards, steps, max_rounds, DEFAULT_SETTLE_TOL)
}

/// Smallest per-task dominance margin; requires a unique dominating agent
/// per task.
pub fn min_dominance_margin(rewards: &RewardMatrix) -> Result<f64> {
    let report = check_assumptions(rewards);
    for task in &report.tasks {
        if !task.unique_dominating {
            return Err(Error::NonUniqueDominating {
                task: task.task,
                count: task.dominating.len(),
            });
        }
    }
    let delta = report.min_dominance_margin();
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::DegenerateGap {
            quantity: "dominance margin",
            tasks: report
                .tasks
                .iter()
                .filter(|t| t.dominance_margin <= 0.0)
                .map(|t| t.task)
                .collect(),
        });
    }
    Ok(delta)
}

/// Worst-case number of rounds until the dynamics is stationary, valid when
/// every task has a unique dominating agent: `2 * ceil(1 / (gamma * delta))`
/// with `gamma` the smallest step size and `delta` the smallest dominance
/// margin.
pub fn finite_time_bound(rewards: &RewardMatrix, steps: &StepSizeMatrix) -> Result<usize> {
    check_step_sizes(steps, rewards)?;
    let delta = min_dominance_margin(rewards)?;
    let gamma = steps.min();
    Ok(2 * (1.0 / (gamma * delta)).ceil() as usize)
}
