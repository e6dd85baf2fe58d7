//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by construction and by the operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimensions must be at least 1 (got {agents} agents, {tasks} tasks)")]
    EmptyDimension { agents: usize, tasks: usize },

    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    SizeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("agent id {id} out of range 1..={max}")]
    InvalidAgent { id: usize, max: usize },

    #[error("task id {id} out of range 1..={max}")]
    InvalidTask { id: usize, max: usize },

    #[error("node id {id} out of range 1..={max}")]
    InvalidNode { id: usize, max: usize },

    #[error("entry ({agent},{task}) = {value} violates: {requirement}")]
    InvalidEntry {
        agent: usize,
        task: usize,
        value: f64,
        requirement: &'static str,
    },

    #[error("subsets do not form a partition: {reason}")]
    NotAPartition { reason: String },

    #[error("non-finite value {0} where a finite real is required")]
    NonFinite(f64),

    #[error("search space {agents}^{tasks} exceeds enumeration cap {cap}")]
    EnumerationCap {
        agents: usize,
        tasks: usize,
        cap: u64,
    },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("cannot take the largest values of an empty collection")]
    EmptyValues,

    #[error("task {task} has {count} dominating agents; a unique dominating agent is required")]
    NonUniqueDominating { task: usize, count: usize },

    #[error("parameter {name} = {value} out of range ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("tasks {tasks:?} have {quantity} = 0; positive gaps are required")]
    DegenerateGap {
        quantity: &'static str,
        tasks: Vec<usize>,
    },

    #[error("derived injection period {period} exceeds cap {cap}")]
    PeriodCap { period: u64, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
