use serde::{Deserialize, Serialize};

use crate::geo::{Position, TimedFix};
use crate::metric::{path_weight, Nhdf, PathWeight, Reliability};
use crate::spectrum::ChannelSet;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MessageKind {
    Rreq,
    Rrep,
    Rerr,
    SqnQuery,
    SqnReport,
    Data,
}

/// (origin, sequence) pair identifying one discovery round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RequestId {
    pub origin: NodeId,
    pub seq: u32,
}

/// What a node recorded when the request reached it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopRecord {
    pub node: NodeId,
    /// Idle channels sensed when the node first handled this request.
    pub idle: ChannelSet,
    pub received_at: f64,
    pub received_pos: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRequest {
    pub id: RequestId,
    pub target: NodeId,
    /// Path so far, origin first.
    pub hops: Vec<HopRecord>,
}

impl RouteRequest {
    pub fn path(&self) -> Vec<NodeId> {
        self.hops.iter().map(|h| h.node).collect()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.hops.iter().any(|h| h.node == node)
    }
}

/// Reply travelling the reverse of `hops`; `cursor` is the index of the node
/// that sent it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteReply {
    pub id: RequestId,
    pub target: NodeId,
    pub hops: Vec<HopRecord>,
    pub cursor: usize,
    /// NHDF of the links scored so far, in path order (suffix of the path).
    pub link_values: Vec<Nhdf>,
    /// δ^L_p accumulated from the destination side.
    pub accumulated_delay: f64,
    pub max_rf: Reliability,
    /// The sender's own receive/send coordinates.
    pub sender_fix: TimedFix,
    /// The destination's last-known movement, for the heading angle.
    pub dest_fix: TimedFix,
}

impl RouteReply {
    pub fn path(&self) -> Vec<NodeId> {
        self.hops.iter().map(|h| h.node).collect()
    }

    pub fn accumulated_nhdf(&self) -> PathWeight {
        path_weight(&self.link_values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCause {
    /// Link `(from, to)` of the source's route broke.
    LinkFailure { from: NodeId, to: NodeId },
    /// A suspicion round froze this node's RF to ∞.
    Malicious { subject: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteError {
    /// Node that raised the error.
    pub origin: NodeId,
    pub seq: u32,
    pub cause: ErrorCause,
    /// Link failures travel back along the live prefix to the source:
    /// `prefix[0]` is the source, `cursor` the current holder.
    pub prefix: Vec<NodeId>,
    pub cursor: usize,
    pub dest: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspicionQuery {
    pub querier: NodeId,
    pub round: u32,
    pub subject: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspicionReport {
    pub querier: NodeId,
    pub round: u32,
    pub subject: NodeId,
    pub reporter: NodeId,
    pub suspect: bool,
}

pub type PacketId = u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPacket {
    pub id: PacketId,
    pub flow: usize,
    pub source: NodeId,
    pub dest: NodeId,
    pub created_at: f64,
    /// Source route for NHDF; `None` for hop-by-hop greedy forwarding.
    pub route: Option<Vec<NodeId>>,
    pub hops: u32,
    /// Sum of the link delays applied on the hops taken so far.
    pub link_delay_sum: f64,
}

impl DataPacket {
    /// Next hop on the source route when held by `at`.
    pub fn next_on_route(&self, at: NodeId) -> Option<NodeId> {
        let route = self.route.as_ref()?;
        let i = route.iter().position(|&n| n == at)?;
        route.get(i + 1).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ControlMessage {
    Rreq(RouteRequest),
    Rrep(RouteReply),
    Rerr(RouteError),
    SqnQuery(SuspicionQuery),
    SqnReport(SuspicionReport),
    Data(DataPacket),
}

impl ControlMessage {
    pub fn kind(&self) -> MessageKind {
        match self {
            ControlMessage::Rreq(_) => MessageKind::Rreq,
            ControlMessage::Rrep(_) => MessageKind::Rrep,
            ControlMessage::Rerr(_) => MessageKind::Rerr,
            ControlMessage::SqnQuery(_) => MessageKind::SqnQuery,
            ControlMessage::SqnReport(_) => MessageKind::SqnReport,
            ControlMessage::Data(_) => MessageKind::Data,
        }
    }
}
