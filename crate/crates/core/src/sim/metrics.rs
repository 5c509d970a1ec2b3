use std::fmt;

use serde::{Deserialize, Serialize};

use crate::protocol::PacketId;

use super::config::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropCause {
    QueueOverflow,
    NoRoute,
    LocalMaximum,
    LinkFailure,
    HopLimit,
    /// Discarded by a black-hole node.
    Malicious,
}

impl DropCause {
    pub const ALL: [DropCause; 6] = [
        DropCause::QueueOverflow,
        DropCause::NoRoute,
        DropCause::LocalMaximum,
        DropCause::LinkFailure,
        DropCause::HopLimit,
        DropCause::Malicious,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DropCause::QueueOverflow => "queue_overflow",
            DropCause::NoRoute => "no_route",
            DropCause::LocalMaximum => "local_maximum",
            DropCause::LinkFailure => "link_failure",
            DropCause::HopLimit => "hop_limit",
            DropCause::Malicious => "malicious",
        }
    }
}

impl fmt::Display for DropCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub queue_overflow: u64,
    pub no_route: u64,
    pub local_maximum: u64,
    pub link_failure: u64,
    pub hop_limit: u64,
    pub malicious: u64,
}

impl DropCounts {
    fn slot(&mut self, cause: DropCause) -> &mut u64 {
        match cause {
            DropCause::QueueOverflow => &mut self.queue_overflow,
            DropCause::NoRoute => &mut self.no_route,
            DropCause::LocalMaximum => &mut self.local_maximum,
            DropCause::LinkFailure => &mut self.link_failure,
            DropCause::HopLimit => &mut self.hop_limit,
            DropCause::Malicious => &mut self.malicious,
        }
    }

    pub fn get(&self, cause: DropCause) -> u64 {
        let mut c = *self;
        *c.slot(cause)
    }

    pub fn add(&mut self, cause: DropCause) {
        *self.slot(cause) += 1;
    }

    pub fn total(&self) -> u64 {
        DropCause::ALL.iter().map(|&c| self.get(c)).sum()
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub protocol: Protocol,
    pub node_count: usize,
    pub seed: u64,
    pub run_time: f64,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: DropCounts,
    pub in_flight_at_end: u64,
    /// `None` when nothing was sent.
    pub pdr: Option<f64>,
    pub throughput_pps: f64,
    pub throughput_bps: f64,
    /// `None` when nothing was delivered.
    pub mean_e2e_delay: Option<f64>,
}

impl MetricsReport {
    pub fn dropped_total(&self) -> u64 {
        self.dropped.total()
    }

    pub fn is_conserved(&self) -> bool {
        self.sent == self.delivered + self.dropped.total() + self.in_flight_at_end
    }
}

/// Aggregates packet outcomes into a report.
#[allow(clippy::too_many_arguments)]
pub fn collect_metrics(
    protocol: Protocol,
    node_count: usize,
    seed: u64,
    run_time: f64,
    packet_bits: f64,
    sent: u64,
    delivered_delays: &[f64],
    dropped: DropCounts,
    in_flight_at_end: u64,
) -> MetricsReport {
    let delivered = delivered_delays.len() as u64;
    let pdr = (sent > 0).then(|| delivered as f64 / sent as f64);
    let mean_e2e_delay = (delivered > 0).then(|| delivered_delays.iter().sum::<f64>() / delivered as f64);
    let throughput_pps = delivered as f64 / run_time;
    MetricsReport {
        protocol,
        node_count,
        seed,
        run_time,
        sent,
        delivered,
        dropped,
        in_flight_at_end,
        pdr,
        throughput_pps,
        throughput_bps: throughput_pps * packet_bits,
        mean_e2e_delay,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PacketState {
    InFlight,
    Delivered,
    Dropped,
}

/// Per-packet bookkeeping. Each packet leaves the in-flight state exactly
/// once; anything else is an accounting bug.
#[derive(Debug, Clone, Default)]
pub struct PacketLedger {
    states: Vec<PacketState>,
    delays: Vec<f64>,
    dropped: DropCounts,
}

impl PacketLedger {
    pub fn create(&mut self) -> PacketId {
        self.states.push(PacketState::InFlight);
        (self.states.len() - 1) as PacketId
    }

    fn settle(&mut self, id: PacketId, to: PacketState) -> Result<(), String> {
        match self.states.get_mut(id as usize) {
            Some(s @ PacketState::InFlight) => {
                *s = to;
                Ok(())
            }
            Some(s) => Err(format!("packet {id} already settled as {s:?}")),
            None => Err(format!("unknown packet {id}")),
        }
    }

    pub fn deliver(&mut self, id: PacketId, delay: f64) -> Result<(), String> {
        self.settle(id, PacketState::Delivered)?;
        self.delays.push(delay);
        Ok(())
    }

    pub fn drop(&mut self, id: PacketId, cause: DropCause) -> Result<(), String> {
        self.settle(id, PacketState::Dropped)?;
        self.dropped.add(cause);
        Ok(())
    }

    pub fn sent(&self) -> u64 {
        self.states.len() as u64
    }

    pub fn in_flight(&self) -> u64 {
        self.states.iter().filter(|s| **s == PacketState::InFlight).count() as u64
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn dropped(&self) -> DropCounts {
        self.dropped
    }
}
