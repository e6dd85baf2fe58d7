//! Scenario files: a TOML tree describing one experiment, schema-validated
//! and resolved into core objects before anything runs.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use taskalloc::dpbrag::{
    derive_constant_params, DpbragParams, ParamDerivation, RewardSequence, StepParamGrid,
    StepSchedule,
};
use taskalloc::{DirectedGraph, RewardMatrix, StepSizeMatrix, WeightMatrix};

use crate::random::{damped_cosine_from_seed, generate_random_instance};

pub const DEFAULT_NE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_SUPPORT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ROUNDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Pbrag,
    Dpbrag,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Pbrag => "pbrag",
            Algorithm::Dpbrag => "dpbrag",
        }
    }
}

/// Raw scenario file as written on disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    pub algorithm: String,
    pub max_rounds: Option<usize>,
    pub ne_tolerance: Option<f64>,
    pub support_tolerance: Option<f64>,
    pub problem: ProblemSpec,
    pub initial: Option<InitialSpec>,
    pub pbrag: Option<PbragSpec>,
    pub dpbrag: Option<DpbragSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub rewards: Option<Vec<Vec<f64>>>,
    pub random: Option<RandomSpec>,
    pub factors: Option<FactorSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub seed: u64,
    pub agents: usize,
    pub tasks: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub reward: Vec<Vec<f64>>,
    pub importance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub weights: InitialWeights,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InitialWeights {
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PbragSpec {
    pub step: StepSpec,
    pub settle_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StepSpec {
    Preset(String),
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpbragSpec {
    pub graph: GraphSpec,
    pub schedule: String,
    pub epsilon: Option<f64>,
    pub nu: Option<f64>,
    pub period: Option<usize>,
    pub alpha: Option<f64>,
    pub alpha0: Option<f64>,
    pub beta0: Option<f64>,
    pub diameter_mode: Option<String>,
    pub rewards: RewardSeqSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Named(String),
    Explicit { arcs: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RewardSeqSpec {
    Named(String),
    DampedCosine {
        #[serde(rename = "damped-cosine")]
        damped_cosine: DampedSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampedSpec {
    pub seed: Option<u64>,
    pub amplitude: Option<Vec<Vec<f64>>>,
    pub frequency: Option<Vec<Vec<f64>>>,
    pub decay: Option<Vec<Vec<f64>>>,
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_rounds: Option<usize>,
    pub tolerance: Option<f64>,
}

/// Fully validated scenario with core objects constructed.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub algorithm: Algorithm,
    pub rewards: RewardMatrix,
    pub initial: WeightMatrix,
    pub max_rounds: usize,
    pub ne_tolerance: f64,
    pub support_tolerance: f64,
    pub pbrag: Option<ResolvedPbrag>,
    pub dpbrag: Option<ResolvedDpbrag>,
}

#[derive(Debug, Clone)]
pub struct ResolvedPbrag {
    pub steps: StepSizeMatrix,
    pub settle_tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct ResolvedDpbrag {
    pub graph: DirectedGraph,
    pub params: DpbragParams,
    pub sequence: RewardSequence,
    /// Present when the constant-schedule bounds were derivable.
    pub derivation: Option<ParamDerivation>,
    /// True when the run is covered by the convergence guarantees
    /// (instance gaps positive and period/step bounds respected).
    pub within_guarantees: bool,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("scenario file does not match the schema")
    }

    pub fn resolve(&self, overrides: &Overrides) -> Result<Resolved> {
        let algorithm = match self.algorithm.as_str() {
            "pbrag" => Algorithm::Pbrag,
            "dpbrag" => Algorithm::Dpbrag,
            other => bail!("unknown algorithm {other:?} (expected \"pbrag\" or \"dpbrag\")"),
        };
        let rewards = self.problem.build(overrides.seed)?;
        let n = rewards.agents();
        let m = rewards.tasks();

        let initial = match self.initial.as_ref().map(|spec| &spec.weights) {
            None => WeightMatrix::zeros(n, m)?,
            Some(InitialWeights::Named(name)) => match name.as_str() {
                "zeros" => WeightMatrix::zeros(n, m)?,
                "ones" => WeightMatrix::ones(n, m)?,
                other => bail!("unknown initial weights preset {other:?}"),
            },
            Some(InitialWeights::Matrix(rows)) => WeightMatrix::from_rows(rows)?,
        };
        if initial.size() != rewards.size() {
            bail!("initial weights are {}x{}, rewards are {n}x{m}", initial.agents(), initial.tasks());
        }

        let ne_tolerance = overrides
            .tolerance
            .or(self.ne_tolerance)
            .unwrap_or(DEFAULT_NE_TOLERANCE);
        let support_tolerance = self.support_tolerance.unwrap_or(DEFAULT_SUPPORT_TOLERANCE);
        let max_rounds = overrides
            .max_rounds
            .or(self.max_rounds)
            .unwrap_or(DEFAULT_MAX_ROUNDS);

        let pbrag = match (algorithm, &self.pbrag) {
            (Algorithm::Pbrag, Some(spec)) => Some(spec.resolve(&rewards)?),
            (Algorithm::Pbrag, None) => bail!("algorithm \"pbrag\" needs a [pbrag] table"),
            _ => None,
        };
        let dpbrag = match (algorithm, &self.dpbrag) {
            (Algorithm::Dpbrag, Some(spec)) => Some(spec.resolve(&rewards, overrides.seed)?),
            (Algorithm::Dpbrag, None) => bail!("algorithm \"dpbrag\" needs a [dpbrag] table"),
            _ => None,
        };

        Ok(Resolved {
            name: self.name.clone().unwrap_or_else(|| "scenario".to_string()),
            algorithm,
            rewards,
            initial,
            max_rounds,
            ne_tolerance,
            support_tolerance,
            pbrag,
            dpbrag,
        })
    }
}

impl ProblemSpec {
    pub fn build(&self, seed_override: Option<u64>) -> Result<RewardMatrix> {
        let sources = [
            self.rewards.is_some(),
            self.random.is_some(),
            self.factors.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            bail!("[problem] needs exactly one of rewards, random, factors");
        }
        if let Some(rows) = &self.rewards {
            return Ok(RewardMatrix::from_rows(rows)?);
        }
        if let Some(spec) = &self.random {
            let seed = seed_override.unwrap_or(spec.seed);
            return Ok(generate_random_instance(seed, spec.agents, spec.tasks));
        }
        let factors = self.factors.as_ref().expect("checked above");
        Ok(RewardMatrix::from_factors(&factors.reward, &factors.importance)?)
    }
}

impl PbragSpec {
    fn resolve(&self, rewards: &RewardMatrix) -> Result<ResolvedPbrag> {
        let n = rewards.agents();
        let m = rewards.tasks();
        let steps = match &self.step {
            StepSpec::Preset(name) => match name.as_str() {
                "two-step" => StepSizeMatrix::two_step(rewards)
                    .context("the two-step preset needs unique dominating agents")?,
                other => bail!("unknown step preset {other:?}"),
            },
            StepSpec::Uniform(step) => StepSizeMatrix::uniform(n, m, *step)?,
            StepSpec::Matrix(rows) => StepSizeMatrix::from_rows(rows)?,
        };
        if steps.size() != rewards.size() {
            bail!("step sizes do not match the instance shape");
        }
        Ok(ResolvedPbrag {
            steps,
            settle_tolerance: self
                .settle_tolerance
                .unwrap_or(taskalloc::pbrag::DEFAULT_SETTLE_TOL),
        })
    }
}

impl DpbragSpec {
    fn resolve(&self, rewards: &RewardMatrix, seed_override: Option<u64>) -> Result<ResolvedDpbrag> {
        let n = rewards.agents();
        let graph = match &self.graph {
            GraphSpec::Named(name) => match name.as_str() {
                "cycle" => DirectedGraph::cycle(n)?,
                "complete" => DirectedGraph::complete(n)?,
                "line" => DirectedGraph::line(n)?,
                other => bail!("unknown graph preset {other:?}"),
            },
            GraphSpec::Explicit { arcs } => DirectedGraph::new(n, arcs.iter().copied())?,
        };
        if !graph.is_strongly_connected() {
            bail!("communication graph is not strongly connected over {n} agents");
        }
        let diameter = graph.diameter()?;
        let diameter_bound = match self.diameter_mode.as_deref().unwrap_or("exact") {
            "exact" => diameter,
            "node-count" => n,
            other => bail!("unknown diameter mode {other:?} (expected \"exact\" or \"node-count\")"),
        };

        let epsilon = self.epsilon.unwrap_or(0.5);
        let nu = self.nu.unwrap_or(0.1);

        let sequence = match &self.rewards {
            RewardSeqSpec::Named(name) => match name.as_str() {
                "constant" => RewardSequence::constant(rewards.clone()),
                other => bail!("unknown reward sequence {other:?}"),
            },
            RewardSeqSpec::DampedCosine { damped_cosine } => {
                damped_cosine.build(rewards, seed_override)?
            }
        };

        let derivation = derive_constant_params(rewards, diameter_bound, epsilon, nu).ok();

        match self.schedule.as_str() {
            "constant" if self.alpha0.is_some() || self.beta0.is_some() => {
                bail!("alpha0/beta0 belong to the two-phase schedule");
            }
            "two-phase" if self.alpha.is_some() => {
                bail!("alpha belongs to the constant schedule (use alpha0/beta0)");
            }
            _ => {}
        }
        let (schedule, period, within_bounds) = match self.schedule.as_str() {
            "constant" => {
                let (alpha, alpha_min) = match self.alpha {
                    Some(a) => (
                        StepSizeMatrix::uniform(n, rewards.tasks(), a)?,
                        a,
                    ),
                    None => {
                        let derived = derivation.as_ref().ok_or_else(|| {
                            anyhow!(
                                "constant schedule without an explicit alpha needs derivable \
                                 instance gaps (some task column is degenerate)"
                            )
                        })?;
                        (derived.alpha.clone(), derived.alpha_min)
                    }
                };
                let period = match self.period {
                    Some(t) => t,
                    None => {
                        let derived = derivation.as_ref().ok_or_else(|| {
                            anyhow!(
                                "constant schedule without an explicit period needs derivable \
                                 instance gaps (some task column is degenerate)"
                            )
                        })?;
                        // The minimal period for the actual alpha in use.
                        let exact =
                            2.0 * diameter_bound as f64 + 1.0 / (alpha_min * derived.mu) + 1.0;
                        exact.floor() as usize + 1
                    }
                };
                let within = derivation.as_ref().is_some_and(|derived| {
                    let alpha_ok = (1..=n).all(|i| {
                        (1..=rewards.tasks())
                            .all(|q| alpha.value(i, q) <= derived.alpha.value(i, q) + 1e-15)
                    });
                    let period_ok = period as f64
                        > 2.0 * diameter_bound as f64 + 1.0 / (alpha_min * derived.mu) + 1.0;
                    alpha_ok && period_ok
                });
                (StepSchedule::Constant(alpha), period, within)
            }
            "two-phase" => {
                let period = self.period.unwrap_or(2 * diameter_bound + 2);
                let schedule = StepSchedule::two_phase(
                    self.alpha0.unwrap_or(1.0),
                    self.beta0.unwrap_or(1.0),
                )?;
                (schedule, period, period > 2 * diameter_bound + 1)
            }
            other => bail!("unknown schedule {other:?} (expected \"constant\" or \"two-phase\")"),
        };

        let params = DpbragParams::new(period, epsilon, nu, diameter_bound, schedule)?;
        let report = taskalloc::check_assumptions(rewards);
        let within_guarantees = within_bounds && report.violations().is_empty();

        Ok(ResolvedDpbrag {
            graph,
            params,
            sequence,
            derivation,
            within_guarantees,
        })
    }
}

impl DampedSpec {
    fn build(&self, rewards: &RewardMatrix, seed_override: Option<u64>) -> Result<RewardSequence> {
        let explicit = [&self.amplitude, &self.frequency, &self.decay];
        let has_explicit = explicit.iter().any(|f| f.is_some());
        match (self.seed, has_explicit) {
            (Some(_), true) => bail!("damped-cosine takes either a seed or explicit matrices"),
            (Some(seed), false) => Ok(damped_cosine_from_seed(
                rewards,
                seed_override.unwrap_or(seed),
            )),
            (None, true) => {
                let (Some(amplitude), Some(frequency), Some(decay)) =
                    (&self.amplitude, &self.frequency, &self.decay)
                else {
                    bail!("explicit damped-cosine needs amplitude, frequency, and decay")
                };
                Ok(RewardSequence::damped_cosine(
                    rewards.clone(),
                    StepParamGrid::from_rows(amplitude)?,
                    StepParamGrid::from_rows(frequency)?,
                    StepParamGrid::from_rows(decay)?,
                )?)
            }
            (None, false) => bail!("damped-cosine needs a seed or explicit matrices"),
        }
    }
}

/// Parse a plain CSV matrix (rows of comma-separated reals, no header).
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad number {cell:?} on line {}", lineno + 1))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("matrix file is empty");
    }
    Ok(rows)
}
