//! Game-theoretic task allocation among self-interested agents.
//!
//! A group of agents splits a discrete set of tasks. Each agent values each
//! task through a nonnegative reward, and the planner's objective is the
//! total reward of a partition. The crate models this two ways: a
//! combinatorial game where agents claim task subsets, and a continuous
//! relaxation where agents put a weight in `[0, 1]` on every task. Both
//! games have the same equilibrium structure, which contains every optimal
//! partition, and the relaxation admits simple projected gradient dynamics
//! that reach an equilibrium — in finitely many rounds when each task has a
//! unique best agent.
//!
//! Modules:
//! - [`model`]: instance data, both utilities, dominating-agent structure.
//! - [`nash`]: equilibrium checkers and optimal-partition enumeration.
//! - [`pbrag`]: centralized projected best-response gradient dynamics.
//! - [`graph`]: directed communication graphs and max/submax agreement.
//! - [`dpbrag`]: the distributed dynamics with periodic sample injection,
//!   for rewards revealed online.
//! - [`oracle`]: brute-force reference implementations for tests.

pub mod dpbrag;
pub mod error;
pub mod graph;
pub mod model;
pub mod nash;
pub mod oracle;
pub mod pbrag;

pub use error::{Error, Result};
pub use model::{
    check_assumptions, dominating_agents, objective_value, partition_utility,
    translated_support, translated_support_tol, utility_gradient, weight_utility, AgentId,
    AllocationProfile, AssumptionReport, Partition, ProblemSize, RewardMatrix, TaskId,
    WeightMatrix,
};
pub use nash::{
    check_partition_ne, check_weight_ne, enumerate_optimal_partitions,
    enumerate_optimal_partitions_with_cap, unique_ne, verify_inclusion, NeProperty, NeReport,
    NeViolation, OptimalSet,
};
pub use pbrag::{
    clamp01, finite_time_bound, is_equilibrium_weight, pbrag_step, run_pbrag, run_pbrag_settle,
    StepSizeMatrix, Trajectory,
};

pub use dpbrag::{
    derive_constant_params, dpbrag_round, periodic_switch, run_dpbrag, DpbragParams, DpbragRun,
    DpbragState, ParamDerivation, RewardSequence, StepParamGrid, StepSchedule,
};
pub use graph::{
    agreement_round, run_agreement, submax_of, AgreementState, DirectedGraph, NodeId,
};
