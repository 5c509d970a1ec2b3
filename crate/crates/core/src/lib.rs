//! Spectrum-aware, mobility-pattern-based routing for cognitive-radio
//! vehicular networks, with a deterministic discrete-event simulator to
//! evaluate it against a greedy geographic baseline.
//!
//! Layout:
//! - [`geo`]: kinematics, RSSI ranging, speed/heading/displacement estimators
//! - [`spectrum`]: primary-user occupancy, sensing, channel sets
//! - [`metric`]: link delays, transmit weight, reliability, NHDF
//! - [`protocol`]: route discovery, selection, maintenance, suspicion rounds,
//!   and the greedy baseline
//! - [`sim`]: event queue, radio, traffic, metrics, traces
//! - [`scenario`] / [`sweep`]: scenario files, sweeps and result files

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod error;
pub mod geo;
pub mod metric;
pub mod protocol;
pub mod scenario;
pub mod sim;
pub mod spectrum;
pub mod sweep;

pub use error::{InputError, ProtocolError, ScenarioError, SimError, SweepError};

/// Vehicle identifier, `0..node_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index fits in u32"))
    }
}
