//! Line-delimited JSON event trace.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::protocol::MessageKind;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Send,
    Receive,
    Drop,
    PacketCreated,
    Delivered,
    DiscoveryStarted,
    DiscoveryFailed,
    RouteStored,
    RouteSelected,
    LinkFailure,
    SuspicionRound,
    RfFrozen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub time: f64,
    pub event: TraceEvent,
    pub node: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MessageKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peer: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl TraceRecord {
    pub fn new(time: f64, event: TraceEvent, node: NodeId) -> Self {
        TraceRecord {
            time,
            event,
            node,
            kind: None,
            peer: None,
            packet: None,
            path: None,
            reason: None,
        }
    }

    pub fn kind(mut self, kind: MessageKind) -> Self {
        self.kind = Some(kind);
        self
    }

    pub fn peer(mut self, peer: NodeId) -> Self {
        self.peer = Some(peer);
        self
    }

    pub fn packet(mut self, id: u64) -> Self {
        self.packet = Some(id);
        self
    }

    pub fn path(mut self, path: Vec<NodeId>) -> Self {
        self.path = Some(path);
        self
    }

    pub fn reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }
}

pub fn to_line(record: &TraceRecord) -> String {
    serde_json::to_string(record).expect("trace records always serialize")
}

pub fn parse_line(line: &str) -> Result<TraceRecord, serde_json::Error> {
    serde_json::from_str(line.trim_end())
}

pub fn write_trace<W: Write>(mut out: W, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}", to_line(r))?;
    }
    out.flush()
}

/// Reads a trace, skipping blank lines. Errors carry the 1-based line number.
pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>, (usize, String)> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| (i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line).map_err(|e| (i + 1, e.to_string()))?);
    }
    Ok(out)
}
