use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::ProtocolError;
use crate::metric::{PathWeight, Reliability};
use crate::NodeId;

/// A discovered source-to-destination path and its cumulative NHDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteEntry {
    pub weight: PathWeight,
    /// Largest per-link RF on the path. Reported only; RF already divides
    /// each link's NHDF.
    pub rf: Reliability,
    pub path: Vec<NodeId>,
}

impl RouteEntry {
    pub fn source(&self) -> Option<NodeId> {
        self.path.first().copied()
    }

    pub fn destination(&self) -> Option<NodeId> {
        self.path.last().copied()
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.path.contains(&node)
    }

    /// Whether the path uses the link between `a` and `b` in either direction.
    pub fn contains_link(&self, a: NodeId, b: NodeId) -> bool {
        self.path
            .windows(2)
            .any(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
    }

    pub fn links(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.path.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Whether a path visits any node twice.
pub fn has_loop(path: &[NodeId]) -> bool {
    let mut seen = BTreeSet::new();
    !path.iter().all(|n| seen.insert(*n))
}

/// Routes held by a source for one destination, in discovery order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteTable {
    entries: Vec<RouteEntry>,
}

impl RouteTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// L_s
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[RouteEntry] {
        &self.entries
    }

    /// Appends a route, refusing any path that revisits a node.
    pub fn push(&mut self, entry: RouteEntry) -> Result<usize, ProtocolError> {
        if has_loop(&entry.path) {
            return Err(ProtocolError::Loop(entry.path));
        }
        self.entries.push(entry);
        Ok(self.entries.len() - 1)
    }

    /// Deletes every entry using the link; returns how many went.
    pub fn remove_link(&mut self, a: NodeId, b: NodeId) -> usize {
        let before = self.entries.len();
        self.entries.retain(|e| !e.contains_link(a, b));
        before - self.entries.len()
    }

    pub fn remove_node(&mut self, node: NodeId) -> usize {
        let before = self.entries.len();
        self.entries.retain(|e| !e.contains_node(node));
        before - self.entries.len()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

/// Index of the maximum-weight entry. Only a strictly larger weight replaces
/// the current best, so ties go to the earliest discovery. Entries of weight
/// zero (a link excluded) are never returned.
pub fn select_route_index(table: &RouteTable) -> Result<usize, ProtocolError> {
    let mut iter = table.entries.iter().enumerate();
    let (mut best, first) = iter.next().ok_or(ProtocolError::NoRoute)?;
    let mut best_weight = first.weight;
    for (i, e) in iter {
        if e.weight.total_cmp(&best_weight).is_gt() {
            best = i;
            best_weight = e.weight;
        }
    }
    if best_weight.is_zero() {
        return Err(ProtocolError::NoRoute);
    }
    Ok(best)
}

pub fn select_route(table: &RouteTable) -> Result<&RouteEntry, ProtocolError> {
    select_route_index(table).map(|i| &table.entries[i])
}
