//! Per-node routing state machines: NHDF discovery, selection, maintenance
//! and suspicion handling, plus the greedy geographic baseline.
//!
//! Handlers never touch the network directly. They read the radio
//! environment through [`LinkEnv`] and return [`Action`]s that the simulator
//! turns into scheduled deliveries and trace records.

use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::geo::{Position, TimedFix};
use crate::metric::MetricParams;
use crate::spectrum::ChannelSet;
use crate::NodeId;

pub mod greedy;
pub mod message;
pub mod nhdf;
pub mod reliability;
pub mod routes;

pub use greedy::greedy_baseline_forward;
pub use message::{
    ControlMessage, DataPacket, ErrorCause, HopRecord, MessageKind, PacketId, RequestId, RouteError, RouteReply,
    RouteRequest, SuspicionQuery, SuspicionReport,
};
pub use nhdf::{score_link, Action, LinkObservation, MaintenanceOutcome, NhdfAgent, Session};
pub use reliability::{run_suspicion_round, ForwardingMonitor, ReliabilityState, RoundOutcome, SuspicionRound};
pub use routes::{has_loop, select_route, select_route_index, RouteEntry, RouteTable};

/// How intermediate nodes suppress repeated copies of one request.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardingMode {
    /// Rebroadcast only the first copy of each request id.
    #[default]
    FirstCopy,
    /// Rebroadcast every loop-free copy, so every simple path is reported.
    AllPaths,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NhdfParams {
    pub hop_limit: u32,
    /// Seconds the source collects replies before selecting.
    pub discovery_timeout: f64,
    pub forwarding_mode: ForwardingMode,
    /// Forwarding outcomes remembered per neighbour.
    pub monitor_window: usize,
    /// Drop fraction above which a neighbour is suspected.
    pub drop_threshold: f64,
    /// Q_t as a fraction of queried nodes.
    pub quorum: f64,
    /// Seconds a querier waits for reports.
    pub query_timeout: f64,
    /// Minimum seconds between two error messages for the same broken link.
    pub rerr_interval: f64,
}

impl Default for NhdfParams {
    fn default() -> Self {
        NhdfParams {
            hop_limit: 16,
            discovery_timeout: 2.0,
            forwarding_mode: ForwardingMode::FirstCopy,
            monitor_window: 20,
            drop_threshold: 0.5,
            quorum: 0.5,
            query_timeout: 0.2,
            rerr_interval: 1.0,
        }
    }
}

impl NhdfParams {
    pub fn validate(&self) -> Result<(), InputError> {
        if self.hop_limit == 0 {
            return Err(InputError::invalid("hop_limit", 0.0, "must be >= 1"));
        }
        if self.monitor_window == 0 {
            return Err(InputError::invalid("monitor_window", 0.0, "must be >= 1"));
        }
        for (name, v) in [
            ("discovery_timeout", self.discovery_timeout),
            ("query_timeout", self.query_timeout),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(InputError::invalid(name, v, "must be finite and > 0"));
            }
        }
        if !(self.rerr_interval.is_finite() && self.rerr_interval >= 0.0) {
            return Err(InputError::invalid("rerr_interval", self.rerr_interval, "must be >= 0"));
        }
        for (name, v) in [("drop_threshold", self.drop_threshold), ("quorum", self.quorum)] {
            if !(0.0..1.0).contains(&v) {
                return Err(InputError::invalid(name, v, "must lie in [0, 1)"));
            }
        }
        Ok(())
    }
}

/// Constants every agent needs to score links.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub params: NhdfParams,
    pub metric: MetricParams,
    /// Φ_t, meters
    pub tx_range: f64,
    /// S, bits of one data packet
    pub data_bits: f64,
    /// RT, bits per second
    pub data_rate: f64,
}

/// What a node can observe about its radio surroundings right now.
pub trait LinkEnv {
    fn now(&self) -> f64;
    fn position(&self, node: NodeId) -> Position;
    fn idle(&self, node: NodeId) -> ChannelSet;
    fn in_range(&self, a: NodeId, b: NodeId) -> bool;
    /// V_i
    fn neighbor_count(&self, node: NodeId) -> u32;
    /// Distance `a` infers from the RSSI of `b`'s signal.
    fn measured_distance(&self, a: NodeId, b: NodeId) -> f64;
    /// Link delay (queuing + back-off + switching) of one control message from `from` to `to`.
    fn control_delay(&self, from: NodeId, to: NodeId) -> f64;
    /// The node's most recent movement, as a beacon would advertise it, with
    /// Δ the delay of a reply sent to `toward`.
    fn recent_fix(&self, node: NodeId, toward: NodeId) -> TimedFix;

    /// In range and sharing at least one idle channel.
    fn usable(&self, a: NodeId, b: NodeId) -> bool {
        self.in_range(a, b) && !self.idle(a).intersection(self.idle(b)).is_empty()
    }
}
