//! Distributed best-response dynamics with agreement and periodic input
//! injection (d-PBRAG).
//!
//! Agents no longer see each other's weighted rewards. Instead, each agent
//! keeps per-task registers: a held reward sample `e`, and max/submax
//! agreement estimates `M` and `S` that mix with the closed in-neighborhood
//! every round. Every `T` rounds the registers are overwritten with a fresh
//! local sample, so each injection window runs one agreement sweep over the
//! values sampled at the window start. The weight moves along the surrogate
//! slope `z - (M + S) / 2` and is clamped to `[0, 1]`.
//!
//! Reward samples only need to converge to the true rewards, which lets the
//! same dynamics track instances whose values are revealed online.

use crate::error::{Error, Result};
use crate::graph::{submax_of, DirectedGraph};
use crate::model::{
    check_assumptions, translated_support_tol, AllocationProfile, Grid, RewardMatrix,
    WeightMatrix,
};
use crate::pbrag::{clamp01, StepSizeMatrix};

/// Periodic switch: the fresh value on injection rounds (`t mod period == 0`),
/// the held value otherwise.
pub fn periodic_switch(held: f64, fresh: f64, round: usize, period: usize) -> Result<f64> {
    if period == 0 {
        return Err(Error::InvalidParameter {
            name: "period",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    Ok(if round.is_multiple_of(period) {
        fresh
    } else {
        held
    })
}

/// Rule producing each agent's reward sample for every round.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardSequence {
    /// Samples equal the true rewards at every round.
    Constant(RewardMatrix),
    /// Samples oscillate around the true rewards with exponentially decaying
    /// amplitude: `f + a * cos(b * t) * exp(-c * t)` per (agent, task).
    DampedCosine {
        limit: RewardMatrix,
        amplitude: StepParamGrid,
        frequency: StepParamGrid,
        decay: StepParamGrid,
    },
}

/// Nonnegative per-(agent, task) parameter grid used by reward sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct StepParamGrid {
    grid: Grid,
}

impl StepParamGrid {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let grid = Grid::from_rows(rows)?;
        grid.validate("finite and >= 0", |v| v.is_finite() && v >= 0.0)?;
        Ok(Self { grid })
    }

    pub fn value(&self, agent: usize, task: usize) -> f64 {
        self.grid.get(agent, task)
    }
}

impl RewardSequence {
    pub fn constant(rewards: RewardMatrix) -> Self {
        Self::Constant(rewards)
    }

    /// Damped-cosine samples. Amplitudes may not exceed the limiting reward,
    /// which keeps every sample nonnegative.
    pub fn damped_cosine(
        limit: RewardMatrix,
        amplitude: StepParamGrid,
        frequency: StepParamGrid,
        decay: StepParamGrid,
    ) -> Result<Self> {
        for grid in [&amplitude, &frequency, &decay] {
            if grid.grid.size() != limit.size() {
                return Err(Error::SizeMismatch {
                    expected_rows: limit.agents(),
                    expected_cols: limit.tasks(),
                    rows: grid.grid.size().agents,
                    cols: grid.grid.size().tasks,
                });
            }
        }
        for agent in 1..=limit.agents() {
            for task in 1..=limit.tasks() {
                if amplitude.value(agent, task) > limit.value(agent, task) {
                    return Err(Error::InvalidEntry {
                        agent,
                        task,
                        value: amplitude.value(agent, task),
                        requirement: "amplitude <= limiting reward",
                    });
                }
            }
        }
        Ok(Self::DampedCosine {
            limit,
            amplitude,
            frequency,
            decay,
        })
    }

    /// The rewards the samples converge to.
    pub fn limit(&self) -> &RewardMatrix {
        match self {
            Self::Constant(f) => f,
            Self::DampedCosine { limit, .. } => limit,
        }
    }

    /// Sample for `agent` and `task` at `round`.
    pub fn sample(&self, agent: usize, task: usize, round: usize) -> f64 {
        match self {
            Self::Constant(f) => f.value(agent, task),
            Self::DampedCosine {
                limit,
                amplitude,
                frequency,
                decay,
            } => {
                let t = round as f64;
                limit.value(agent, task)
                    + amplitude.value(agent, task)
                        * (frequency.value(agent, task) * t).cos()
                        * (-decay.value(agent, task) * t).exp()
            }
        }
    }
}

/// Step-size rule of the distributed dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule {
    /// One fixed matrix for every round.
    Constant(StepSizeMatrix),
    /// Per-window two-phase sizes: during the agreement sweep of window `k`
    /// the step is `alpha0 / (k + 1)` (vanishing), afterwards
    /// `beta0 * (k + 1)` (growing without bound).
    TwoPhase { alpha0: f64, beta0: f64 },
}

impl StepSchedule {
    pub fn two_phase(alpha0: f64, beta0: f64) -> Result<Self> {
        for (name, value) in [("alpha0", alpha0), ("beta0", beta0)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "finite and > 0",
                });
            }
        }
        Ok(Self::TwoPhase { alpha0, beta0 })
    }

    /// Step size for `(agent, task)` at `round`, under injection period
    /// `period` and an agreement window of `sweep` rounds per period.
    pub fn rate(&self, agent: usize, task: usize, round: usize, period: usize, sweep: usize) -> f64 {
        match self {
            Self::Constant(steps) => steps.value(agent, task),
            Self::TwoPhase { alpha0, beta0 } => {
                let window = round / period;
                if round % period < sweep {
                    alpha0 / (window + 1) as f64
                } else {
                    beta0 * (window + 1) as f64
                }
            }
        }
    }
}

/// Parameters of one distributed run.
#[derive(Debug, Clone, PartialEq)]
pub struct DpbragParams {
    /// Injection period `T >= 2`.
    pub period: usize,
    /// Tolerated ceiling for non-dominating weights, in (0, 1).
    pub epsilon: f64,
    /// Gap discount used when deriving parameters, in (0, 1).
    pub nu: f64,
    /// Graph-diameter surrogate: the true diameter, or the node count when
    /// the diameter is unknown to the agents.
    pub diameter_bound: usize,
    pub schedule: StepSchedule,
}

impl DpbragParams {
    pub fn new(
        period: usize,
        epsilon: f64,
        nu: f64,
        diameter_bound: usize,
        schedule: StepSchedule,
    ) -> Result<Self> {
        if period < 2 {
            return Err(Error::InvalidParameter {
                name: "period",
                value: period as f64,
                requirement: ">= 2",
            });
        }
        for (name, value) in [("epsilon", epsilon), ("nu", nu)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "in (0, 1)",
                });
            }
        }
        Ok(Self {
            period,
            epsilon,
            nu,
            diameter_bound,
            schedule,
        })
    }

    /// Rounds of each period spent on the agreement sweep.
    pub fn sweep(&self) -> usize {
        2 * self.diameter_bound
    }
}

/// Default ceiling on derived injection periods.
pub const DEFAULT_PERIOD_CAP: u64 = 1_000_000;

/// Gap quantities and admissible constant-schedule parameters derived from
/// an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDerivation {
    /// Per-task spread (largest minus smallest reward).
    pub spread: Vec<f64>,
    /// Per-task half-gap between the two largest distinct reward values.
    pub half_gap: Vec<f64>,
    /// Discounted minimum half-gap.
    pub mu: f64,
    /// Maximal admissible constant step size per (agent, task).
    pub alpha: StepSizeMatrix,
    pub alpha_min: f64,
    /// Minimal admissible injection period.
    pub period: usize,
    pub epsilon: f64,
    pub nu: f64,
    pub diameter_bound: usize,
}

impl ParamDerivation {
    pub fn params(&self) -> Result<DpbragParams> {
        DpbragParams::new(
            self.period,
            self.epsilon,
            self.nu,
            self.diameter_bound,
            StepSchedule::Constant(self.alpha.clone()),
        )
    }
}

/// Derive the largest admissible constant step sizes and the smallest
/// admissible injection period for an instance: per task the step bound is
/// `epsilon / (2 d spread)`, and the period must exceed
/// `2 d + 1 / (alpha * mu) + 1` with `mu` the discounted minimum half-gap.
pub fn derive_constant_params_with_cap(
    rewards: &RewardMatrix,
    diameter_bound: usize,
    epsilon: f64,
    nu: f64,
    period_cap: u64,
) -> Result<ParamDerivation> {
    for (name, value) in [("epsilon", epsilon), ("nu", nu)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::InvalidParameter {
                name,
                value,
                requirement: "in (0, 1)",
            });
        }
    }
    if diameter_bound == 0 {
        return Err(Error::InvalidParameter {
            name: "diameter_bound",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    let report = check_assumptions(rewards);
    let degenerate_spread: Vec<usize> = report
        .tasks
        .iter()
        .filter(|t| t.spread <= 0.0)
        .map(|t| t.task)
        .collect();
    if !degenerate_spread.is_empty() {
        return Err(Error::DegenerateGap {
            quantity: "spread",
            tasks: degenerate_spread,
        });
    }
    let degenerate_gap: Vec<usize> = report
        .tasks
        .iter()
        .filter(|t| t.half_gap <= 0.0)
        .map(|t| t.task)
        .collect();
    if !degenerate_gap.is_empty() {
        return Err(Error::DegenerateGap {
            quantity: "half-gap",
            tasks: degenerate_gap,
        });
    }

    let spread: Vec<f64> = report.tasks.iter().map(|t| t.spread).collect();
    let half_gap: Vec<f64> = report.tasks.iter().map(|t| t.half_gap).collect();
    let mu = (1.0 - nu) * report.min_half_gap();

    let d = diameter_bound as f64;
    let alpha_rows: Vec<Vec<f64>> = (0..rewards.agents())
        .map(|_| spread.iter().map(|&dq| epsilon / (2.0 * d * dq)).collect())
        .collect();
    let alpha = StepSizeMatrix::from_rows(&alpha_rows)?;
    let alpha_min = alpha.min();

    let exact = 2.0 * d + 1.0 / (alpha_min * mu) + 1.0;
    let period = (exact.floor() as u64).saturating_add(1);
    if period > period_cap {
        return Err(Error::PeriodCap {
            period,
            cap: period_cap,
        });
    }

    Ok(ParamDerivation {
        spread,
        half_gap,
        mu,
        alpha,
        alpha_min,
        period: period as usize,
        epsilon,
        nu,
        diameter_bound,
    })
}

/// [`derive_constant_params_with_cap`] with the default period cap.
pub fn derive_constant_params(
    rewards: &RewardMatrix,
    diameter_bound: usize,
    epsilon: f64,
    nu: f64,
) -> Result<ParamDerivation> {
    derive_constant_params_with_cap(rewards, diameter_bound, epsilon, nu, DEFAULT_PERIOD_CAP)
}

/// Full per-agent per-task register state of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct DpbragState {
    pub round: usize,
    pub weights: WeightMatrix,
    /// Agreement estimate of the largest injected sample, per (agent, task).
    max_estimate: Grid,
    /// Agreement estimate of the second-largest injected sample.
    submax_estimate: Grid,
    /// Sample held since the last injection round.
    injected: Grid,
}

impl DpbragState {
    /// Round-0 state: every register holds the agent's own first sample.
    pub fn init(weights: WeightMatrix, sequence: &RewardSequence) -> Result<Self> {
        let f = sequence.limit();
        if weights.size() != f.size() {
            return Err(Error::SizeMismatch {
                expected_rows: f.agents(),
                expected_cols: f.tasks(),
                rows: weights.agents(),
                cols: weights.tasks(),
            });
        }
        let mut registers = Grid::constant(weights.size(), 0.0);
        for agent in 1..=weights.agents() {
            for task in 1..=weights.tasks() {
                registers.set(agent, task, sequence.sample(agent, task, 0));
            }
        }
        Ok(Self {
            round: 0,
            weights,
            max_estimate: registers.clone(),
            submax_estimate: registers.clone(),
            injected: registers,
        })
    }

    pub fn max_estimate(&self, agent: usize, task: usize) -> f64 {
        self.max_estimate.get(agent, task)
    }

    pub fn submax_estimate(&self, agent: usize, task: usize) -> f64 {
        self.submax_estimate.get(agent, task)
    }

    pub fn injected(&self, agent: usize, task: usize) -> f64 {
        self.injected.get(agent, task)
    }
}

/// One synchronous distributed round. All reads come from the input state;
/// the weight moves along the surrogate slope, the estimates run one
/// agreement round, and on injection rounds every register is overwritten
/// with the fresh sample.
pub fn dpbrag_round(
    state: &DpbragState,
    graph: &DirectedGraph,
    sequence: &RewardSequence,
    params: &DpbragParams,
) -> Result<DpbragState> {
    let (n, m) = check_round_inputs(graph, sequence)?;
    let hoods: Vec<Vec<usize>> = (1..=n)
        .map(|agent| {
            graph
                .closed_in_neighbors(agent)
                .map(|set| set.into_iter().collect())
        })
        .collect::<Result<_>>()?;
    step_round(state, &hoods, sequence, params, n, m)
}

fn check_round_inputs(graph: &DirectedGraph, sequence: &RewardSequence) -> Result<(usize, usize)> {
    let f = sequence.limit();
    if graph.node_count() != f.agents() {
        return Err(Error::SizeMismatch {
            expected_rows: f.agents(),
            expected_cols: f.tasks(),
            rows: graph.node_count(),
            cols: f.tasks(),
        });
    }
    if !graph.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    Ok((f.agents(), f.tasks()))
}

fn step_round(
    state: &DpbragState,
    hoods: &[Vec<usize>],
    sequence: &RewardSequence,
    params: &DpbragParams,
    n: usize,
    m: usize,
) -> Result<DpbragState> {
    let f = sequence.limit();
    let t = state.round;
    let next_round = t + 1;
    let period = params.period;
    let sweep = params.sweep();

    let mut weights = state.weights.grid().clone();
    let mut max_next = Grid::constant(f.size(), 0.0);
    let mut submax_next = Grid::constant(f.size(), 0.0);
    let mut injected_next = Grid::constant(f.size(), 0.0);
    let mut pool = Vec::with_capacity(n + 2);

    for agent in 1..=n {
        let hood = &hoods[agent - 1];
        for task in 1..=m {
            let sample_now = sequence.sample(agent, task, t);
            let sample_next = sequence.sample(agent, task, next_round);

            let slope = sample_now
                - 0.5 * (state.max_estimate.get(agent, task) + state.submax_estimate.get(agent, task));
            let rate = params.schedule.rate(agent, task, t, period, sweep);
            weights.set(
                agent,
                task,
                clamp01(state.weights.value(agent, task) + rate * slope)?,
            );

            let agreed_max = hood
                .iter()
                .map(|&j| state.max_estimate.get(j, task))
                .fold(f64::NEG_INFINITY, f64::max);
            // The submax pool sees the freshly aggregated max (see
            // `agreement_round`) and the sample held since the last
            // injection.
            pool.clear();
            pool.extend(hood.iter().map(|&j| state.submax_estimate.get(j, task)));
            pool.push(agreed_max);
            pool.push(state.injected.get(agent, task));
            let agreed_submax = submax_of(&pool)?;

            max_next.set(
                agent,
                task,
                periodic_switch(agreed_max, sample_next, next_round, period)?,
            );
            submax_next.set(
                agent,
                task,
                periodic_switch(agreed_submax, sample_next, next_round, period)?,
            );
            injected_next.set(
                agent,
                task,
                periodic_switch(state.injected.get(agent, task), sample_next, next_round, period)?,
            );
        }
    }

    Ok(DpbragState {
        round: next_round,
        weights: WeightMatrix::from_grid(weights),
        max_estimate: max_next,
        submax_estimate: submax_next,
        injected: injected_next,
    })
}

/// Recorded distributed run.
#[derive(Debug, Clone, PartialEq)]
pub struct DpbragRun {
    /// States for rounds `0..=rounds`.
    pub log: Vec<DpbragState>,
    /// First round from which, through the end of the log, every dominating
    /// agent's weight is exactly 1 and every non-dominating agent's weight
    /// is at most `epsilon`.
    pub settle_round: Option<usize>,
    /// Start of the maximal tail over which the translated support is
    /// constant (the final round alone always qualifies).
    pub allocation_stable_from: usize,
    /// Translated support of the final state.
    pub final_allocation: AllocationProfile,
    /// Scalars crossing the network per round: two registers per task per
    /// arc.
    pub scalars_per_round: usize,
    /// Support tolerance used for the allocation history.
    pub support_tol: f64,
}

impl DpbragRun {
    pub fn rounds(&self) -> usize {
        self.log.len() - 1
    }

    pub fn final_state(&self) -> &DpbragState {
        self.log.last().expect("log holds >= 1 state")
    }

    pub fn allocation_at(&self, round: usize) -> AllocationProfile {
        translated_support_tol(&self.log[round].weights, self.support_tol)
    }

    /// Rounds over which the final translated support has been constant.
    pub fn stable_tail(&self) -> usize {
        self.rounds() - self.allocation_stable_from
    }

    /// True when the translated support has been constant for at least
    /// `min_tail` rounds.
    pub fn stabilized(&self, min_tail: usize) -> bool {
        self.stable_tail() >= min_tail
    }
}

/// Run the distributed dynamics for `max_rounds` rounds and post-process
/// the log: settle round, allocation stability, and communication load.
pub fn run_dpbrag(
    start: &WeightMatrix,
    graph: &DirectedGraph,
    sequence: &RewardSequence,
    params: &DpbragParams,
    max_rounds: usize,
    support_tol: f64,
) -> Result<DpbragRun> {
    if max_rounds == 0 {
        return Err(Error::InvalidParameter {
            name: "max_rounds",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    let (n, m) = check_round_inputs(graph, sequence)?;
    let hoods: Vec<Vec<usize>> = (1..=n)
        .map(|agent| {
            graph
                .closed_in_neighbors(agent)
                .map(|set| set.into_iter().collect())
        })
        .collect::<Result<_>>()?;
    let mut log = vec![DpbragState::init(start.clone(), sequence)?];
    for _ in 0..max_rounds {
        let next = step_round(log.last().expect("non-empty"), &hoods, sequence, params, n, m)?;
        log.push(next);
    }

    let f = sequence.limit();
    let report = check_assumptions(f);
    let dominating: Vec<_> = report.tasks.iter().map(|t| t.dominating.clone()).collect();

    // Scan backward for the first suffix on which the settle properties hold.
    let mut settle_round = None;
    for (round, state) in log.iter().enumerate().rev() {
        let mut ok = true;
        'check: for task in 1..=f.tasks() {
            for agent in 1..=f.agents() {
                let w = state.weights.value(agent, task);
                if dominating[task - 1].contains(&agent) {
                    if w != 1.0 {
                        ok = false;
                        break 'check;
                    }
                } else if w > params.epsilon {
                    ok = false;
                    break 'check;
                }
            }
        }
        if ok {
            settle_round = Some(round);
        } else {
            break;
        }
    }

    let allocations: Vec<AllocationProfile> = log
        .iter()
        .map(|s| translated_support_tol(&s.weights, support_tol))
        .collect();
    let last = allocations.last().expect("non-empty");
    let mut allocation_stable_from = log.len() - 1;
    for (round, allocation) in allocations.iter().enumerate().rev() {
        if allocation == last {
            allocation_stable_from = round;
        } else {
            break;
        }
    }

    let scalars_per_round = 2 * f.tasks() * graph.arc_count();
    Ok(DpbragRun {
        settle_round,
        allocation_stable_from,
        final_allocation: last.clone(),
        scalars_per_round,
        support_tol,
        log,
    })
}
