use std::path::PathBuf;

use thiserror::Error;

use crate::NodeId;

/// Rejected argument to one of the pure formula functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("invalid {name}: {value} ({reason})")]
    Invalid {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// Heading angle requested for a movement vector of zero length.
    #[error("degenerate motion: zero-length movement vector")]
    DegenerateMotion,
    /// Back-off requested for a node with no contending neighbour.
    #[error("degenerate contention: {neighbors} neighbour(s) on the channel")]
    DegenerateContention { neighbors: u32 },
}

impl InputError {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        InputError::Invalid { name, value, reason }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("node {0} asked for a route to itself")]
    SelfRoute(NodeId),
    #[error("no usable route")]
    NoRoute,
    #[error("route {0:?} revisits a node")]
    Loop(Vec<NodeId>),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config error: {field}: {reason}")]
    Config { field: String, reason: String },
    #[error("invariant violated at t={time:.6}s: {what}")]
    Invariant { time: f64, what: String },
}

impl SimError {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: cannot read scenario: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

impl ScenarioError {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("run {protocol} n={node_count} seed={seed} failed: {source}")]
    Run {
        protocol: String,
        node_count: usize,
        seed: u64,
        source: SimError,
    },
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
