//! Reliability factors, suspicion rounds and the overhearing monitor that
//! triggers them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::metric::Reliability;
use crate::NodeId;

/// One node's view of how trustworthy every other node is.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityState {
    reports: BTreeMap<NodeId, u32>,
    frozen: BTreeSet<NodeId>,
    /// (suspect votes, nodes queried) accumulated over rounds per subject.
    ledger: BTreeMap<NodeId, (u32, u32)>,
}

impl ReliabilityState {
    /// RN
    pub fn reports(&self, node: NodeId) -> u32 {
        self.reports.get(&node).copied().unwrap_or(0)
    }

    /// RF = e^{RN}, or ∞ once frozen. Freezing is permanent.
    pub fn rf(&self, node: NodeId) -> Reliability {
        if self.frozen.contains(&node) {
            Reliability::Infinite
        } else {
            Reliability::from_reports(self.reports(node))
        }
    }

    pub fn is_frozen(&self, node: NodeId) -> bool {
        self.frozen.contains(&node)
    }

    pub fn add_reports(&mut self, node: NodeId, n: u32) {
        *self.reports.entry(node).or_default() += n;
    }

    pub fn freeze(&mut self, node: NodeId) {
        self.frozen.insert(node);
    }

    pub fn ledger(&self, node: NodeId) -> (u32, u32) {
        self.ledger.get(&node).copied().unwrap_or((0, 0))
    }

    pub fn apply(&mut self, round: &SuspicionRound, outcome: RoundOutcome) {
        let entry = self.ledger.entry(round.subject).or_default();
        entry.0 += round.suspect_votes();
        entry.1 += round.queried();
        match outcome {
            RoundOutcome::NoReports => {}
            RoundOutcome::Reported { reports } => self.add_reports(round.subject, reports),
            RoundOutcome::Frozen => self.freeze(round.subject),
        }
    }
}

/// Votes gathered about `subject` from the nodes queried in one round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspicionRound {
    pub subject: NodeId,
    /// (participant, voted suspect)
    pub votes: Vec<(NodeId, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundOutcome {
    NoReports,
    /// Every participant adds `reports` to RN.
    Reported {
        reports: u32,
    },
    /// Suspect votes exceeded the quorum; RF = ∞ at every participant.
    Frozen,
}

impl SuspicionRound {
    pub fn suspect_votes(&self) -> u32 {
        self.votes.iter().filter(|(_, s)| *s).count() as u32
    }

    pub fn queried(&self) -> u32 {
        self.votes.len() as u32
    }

    pub fn participants(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.votes.iter().map(|(n, _)| *n)
    }

    /// Frozen when suspect votes strictly exceed `quorum` (Q_t, a fraction)
    /// of the nodes queried.
    pub fn outcome(&self, quorum: f64) -> RoundOutcome {
        let suspect = self.suspect_votes();
        if suspect == 0 {
            RoundOutcome::NoReports
        } else if f64::from(suspect) > quorum * f64::from(self.queried()) {
            RoundOutcome::Frozen
        } else {
            RoundOutcome::Reported { reports: suspect }
        }
    }
}

/// Applies a round to every participant's state and returns the outcome.
pub fn run_suspicion_round<'a>(
    round: &SuspicionRound,
    quorum: f64,
    participants: impl IntoIterator<Item = &'a mut ReliabilityState>,
) -> RoundOutcome {
    let outcome = round.outcome(quorum);
    for state in participants {
        state.apply(round, outcome);
    }
    outcome
}

/// Sliding window of forwarded/dropped outcomes a node overheard from each
/// neighbour.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ForwardingMonitor {
    window: usize,
    seen: BTreeMap<NodeId, VecDeque<bool>>,
}

impl ForwardingMonitor {
    pub fn new(window: usize) -> Self {
        ForwardingMonitor {
            window: window.max(1),
            seen: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, subject: NodeId, forwarded: bool) {
        let q = self.seen.entry(subject).or_default();
        q.push_back(forwarded);
        while q.len() > self.window {
            q.pop_front();
        }
    }

    pub fn drops(&self, subject: NodeId) -> usize {
        self.seen.get(&subject).map_or(0, |q| q.iter().filter(|f| !**f).count())
    }

    pub fn drop_fraction(&self, subject: NodeId) -> Option<f64> {
        let q = self.seen.get(&subject)?;
        (!q.is_empty()).then(|| self.drops(subject) as f64 / q.len() as f64)
    }

    /// More than `threshold` of a full window dropped.
    pub fn triggers(&self, subject: NodeId, threshold: f64) -> bool {
        self.drops(subject) as f64 > threshold * self.window as f64
    }

    /// Vote cast when queried: the overheard drop fraction exceeds `threshold`.
    pub fn votes_suspect(&self, subject: NodeId, threshold: f64) -> bool {
        self.drop_fraction(subject).is_some_and(|f| f > threshold)
    }

    pub fn clear(&mut self, subject: NodeId) {
        self.seen.remove(&subject);
    }
}
