use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{InputError, ProtocolError};
use crate::geo::{displacement, estimate_speed, heading_angle, TimedFix};
use crate::metric::{link_nhdf, path_weight, transmit_weight, Nhdf, PathWeight, Reliability};
use crate::spectrum::{common_idle_count, link_channel, ChannelId, ChannelSet};
use crate::NodeId;

use super::message::{
    ControlMessage, ErrorCause, HopRecord, MessageKind, RequestId, RouteError, RouteReply, RouteRequest,
    SuspicionQuery, SuspicionReport,
};
use super::reliability::{ForwardingMonitor, ReliabilityState, SuspicionRound};
use super::routes::{select_route, RouteEntry, RouteTable};
use super::{AgentConfig, ForwardingMode, LinkEnv};

/// Everything the scoring node knows about one link when a reply crosses it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkObservation {
    /// Ranged distance to the neighbour, meters.
    pub distance: f64,
    pub sender_fix: TimedFix,
    pub dest_fix: TimedFix,
    /// C_n
    pub common_channels: u32,
    /// p: channel of the link the scoring node received on, if any.
    pub from_channel: Option<ChannelId>,
    /// q: channel the link would use.
    pub to_channel: Option<ChannelId>,
    /// V_i
    pub neighbors: u32,
    pub rf: Reliability,
}

/// Scores one link. `path_delay` is δ^L_p accumulated before this link; the
/// link's own delay is added before computing ξ_T. Returns the link's NHDF
/// and δ^E.
pub fn score_link(obs: &LinkObservation, path_delay: f64, cfg: &AgentConfig) -> Result<(Nhdf, f64), InputError> {
    let m = &cfg.metric;
    let speed = estimate_speed(&obs.sender_fix).unwrap_or(0.0).max(m.speed_floor);
    let (sf, df) = (&obs.sender_fix, &obs.dest_fix);
    let theta = heading_angle(sf.received_pos, sf.sent_pos, df.received_pos, df.sent_pos).unwrap_or(m.theta_floor);
    let tau = displacement(obs.distance, theta)?.max(m.tau_floor);
    let (from, to) = match obs.to_channel {
        Some(q) => (obs.from_channel, q),
        None => (None, ChannelId(0)),
    };
    let delay = m.delays(cfg.data_bits, cfg.data_rate, obs.neighbors, from, to)?.total();
    let xi = transmit_weight(cfg.tx_range, tau, path_delay + delay, speed)?;
    Ok((link_nhdf(xi, delay, obs.common_channels, obs.rf)?, delay))
}

/// Routing state a source keeps for one destination.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Session {
    pub table: RouteTable,
    pub active: Option<RouteEntry>,
    /// Request whose replies are still being collected.
    pub discovery: Option<RequestId>,
    /// Most recent request originated; replies to older ones are stale.
    pub latest: Option<RequestId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaintenanceOutcome {
    /// No active route used the link.
    Unchanged,
    /// Traffic moved to another stored route.
    Switched,
    /// Nothing left to switch to; a new discovery is (or already was) running.
    NeedsDiscovery,
}

/// Side effects requested by a handler.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Broadcast(ControlMessage),
    Unicast {
        to: NodeId,
        msg: ControlMessage,
    },
    Dropped {
        kind: MessageKind,
        reason: &'static str,
    },
    DiscoveryStarted {
        dest: NodeId,
        id: RequestId,
    },
    RouteStored {
        dest: NodeId,
        path: Vec<NodeId>,
        weight: PathWeight,
    },
    RouteSelected {
        dest: NodeId,
        path: Vec<NodeId>,
    },
    DiscoveryFailed {
        dest: NodeId,
    },
    LinkFailure {
        dest: NodeId,
        from: NodeId,
        to: NodeId,
        outcome: MaintenanceOutcome,
    },
    Frozen {
        subject: NodeId,
    },
}

pub enum RouteDecision {
    Use(Vec<NodeId>),
    /// Hold the data; the actions (possibly none) start or continue discovery.
    Wait(Vec<Action>),
}

#[derive(Debug, Clone, PartialEq)]
struct OpenQuery {
    subject: NodeId,
    votes: Vec<(NodeId, bool)>,
}

/// One vehicle's NHDF state machine.
#[derive(Debug, Clone, PartialEq)]
pub struct NhdfAgent {
    id: NodeId,
    next_seq: u32,
    /// Idle set snapshotted when each request was first handled.
    seen: BTreeMap<RequestId, ChannelSet>,
    seen_paths: BTreeSet<(RequestId, Vec<NodeId>)>,
    sessions: BTreeMap<NodeId, Session>,
    pub reliability: ReliabilityState,
    pub monitor: ForwardingMonitor,
    seen_notices: BTreeSet<(NodeId, u32)>,
    next_error_seq: u32,
    last_error: BTreeMap<(NodeId, NodeId, NodeId, NodeId), f64>,
    next_round: u32,
    open_queries: BTreeMap<u32, OpenQuery>,
}

fn dropped(kind: MessageKind, reason: &'static str) -> Vec<Action> {
    vec![Action::Dropped { kind, reason }]
}

impl NhdfAgent {
    pub fn new(id: NodeId, monitor_window: usize) -> Self {
        NhdfAgent {
            id,
            next_seq: 0,
            seen: BTreeMap::new(),
            seen_paths: BTreeSet::new(),
            sessions: BTreeMap::new(),
            reliability: ReliabilityState::default(),
            monitor: ForwardingMonitor::new(monitor_window),
            seen_notices: BTreeSet::new(),
            next_error_seq: 0,
            last_error: BTreeMap::new(),
            next_round: 0,
            open_queries: BTreeMap::new(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn session(&self, dest: NodeId) -> Option<&Session> {
        self.sessions.get(&dest)
    }

    pub fn sessions(&self) -> impl Iterator<Item = (NodeId, &Session)> {
        self.sessions.iter().map(|(d, s)| (*d, s))
    }

    pub fn active_route(&self, dest: NodeId) -> Option<&RouteEntry> {
        self.sessions.get(&dest)?.active.as_ref()
    }

    /// Floods a fresh request for `dest`, discarding routes from earlier rounds.
    pub fn originate_discovery(&mut self, dest: NodeId, env: &impl LinkEnv) -> Result<Vec<Action>, ProtocolError> {
        if dest == self.id {
            return Err(ProtocolError::SelfRoute(dest));
        }
        self.next_seq += 1;
        let id = RequestId {
            origin: self.id,
            seq: self.next_seq,
        };
        let idle = env.idle(self.id);
        self.seen.insert(id, idle);
        let s = self.sessions.entry(dest).or_default();
        s.table.clear();
        s.active = None;
        s.discovery = Some(id);
        s.latest = Some(id);
        let hop = HopRecord {
            node: self.id,
            idle,
            received_at: env.now(),
            received_pos: env.position(self.id),
        };
        Ok(vec![
            Action::DiscoveryStarted { dest, id },
            Action::Broadcast(ControlMessage::Rreq(RouteRequest {
                id,
                target: dest,
                hops: vec![hop],
            })),
        ])
    }

    /// Route for outgoing data, starting discovery when there is none.
    pub fn route_for(&mut self, dest: NodeId, env: &impl LinkEnv) -> Result<RouteDecision, ProtocolError> {
        if let Some(s) = self.sessions.get(&dest) {
            if let Some(active) = &s.active {
                return Ok(RouteDecision::Use(active.path.clone()));
            }
            if s.discovery.is_some() {
                return Ok(RouteDecision::Wait(Vec::new()));
            }
        }
        Ok(RouteDecision::Wait(self.originate_discovery(dest, env)?))
    }

    pub fn handle_rreq(
        &mut self,
        mut req: RouteRequest,
        env: &impl LinkEnv,
        cfg: &AgentConfig,
    ) -> Result<Vec<Action>, InputError> {
        const KIND: MessageKind = MessageKind::Rreq;
        let Some(sender) = req.hops.last().map(|h| h.node) else {
            return Ok(dropped(KIND, "malformed"));
        };
        if req.contains(self.id) {
            return Ok(dropped(KIND, "loop"));
        }
        if self.reliability.rf(sender).is_infinite() {
            return Ok(dropped(KIND, "untrusted_sender"));
        }
        let all_paths = cfg.params.forwarding_mode == ForwardingMode::AllPaths;
        let idle = match self.seen.get(&req.id) {
            Some(&snap) => {
                if !all_paths || !self.seen_paths.insert((req.id, req.path())) {
                    return Ok(dropped(KIND, "duplicate"));
                }
                snap
            }
            None => {
                let snap = env.idle(self.id);
                self.seen.insert(req.id, snap);
                if all_paths {
                    self.seen_paths.insert((req.id, req.path()));
                }
                snap
            }
        };
        let now = env.now();
        let hop = HopRecord {
            node: self.id,
            idle,
            received_at: now,
            received_pos: env.position(self.id),
        };

        if req.target == self.id {
            // A neighbour of ours already answered for any longer path.
            if req.hops.len() != 1 {
                return Ok(dropped(KIND, "answered_by_neighbor"));
            }
            let mut hops = req.hops;
            hops.push(hop);
            let cursor = hops.len() - 1;
            let to = hops[cursor - 1].node;
            let fix = env.recent_fix(self.id, to);
            let reply = RouteReply {
                id: req.id,
                target: req.target,
                hops,
                cursor,
                link_values: Vec::new(),
                accumulated_delay: 0.0,
                max_rf: Reliability::TRUSTED,
                sender_fix: fix,
                dest_fix: fix,
            };
            return Ok(vec![Action::Unicast {
                to,
                msg: ControlMessage::Rrep(reply),
            }]);
        }

        if req.hops.len() as u64 >= u64::from(cfg.params.hop_limit) {
            return Ok(dropped(KIND, "hop_limit"));
        }

        let mut actions = Vec::new();
        let target = req.target;
        if env.usable(self.id, target) && !self.reliability.rf(target).is_infinite() {
            let fix = env.recent_fix(target, self.id);
            let mut hops = req.hops.clone();
            hops.push(hop.clone());
            hops.push(HopRecord {
                node: target,
                idle: env.idle(target),
                received_at: now,
                received_pos: env.position(target),
            });
            let reply = RouteReply {
                id: req.id,
                target,
                cursor: hops.len() - 1,
                hops,
                link_values: Vec::new(),
                accumulated_delay: 0.0,
                max_rf: Reliability::TRUSTED,
                sender_fix: fix,
                dest_fix: fix,
            };
            actions.extend(self.advance_reply(reply, env, cfg)?);
            if !all_paths {
                return Ok(actions);
            }
        }
        req.hops.push(hop);
        actions.push(Action::Broadcast(ControlMessage::Rreq(req)));
        Ok(actions)
    }

    pub fn handle_rrep(
        &mut self,
        reply: RouteReply,
        env: &impl LinkEnv,
        cfg: &AgentConfig,
    ) -> Result<Vec<Action>, InputError> {
        let on_path =
            reply.cursor >= 1 && reply.cursor < reply.hops.len() && reply.hops[reply.cursor - 1].node == self.id;
        if !on_path {
            return Ok(dropped(MessageKind::Rrep, "not_on_path"));
        }
        self.advance_reply(reply, env, cfg)
    }

    /// Scores the link from this node to the reply's sender, then either
    /// stores the route (at the source) or passes the reply upstream.
    fn advance_reply(
        &mut self,
        mut reply: RouteReply,
        env: &impl LinkEnv,
        cfg: &AgentConfig,
    ) -> Result<Vec<Action>, InputError> {
        let i = reply.cursor - 1;
        let (me, next) = (&reply.hops[i], &reply.hops[i + 1]);
        let j = next.node;
        let from_channel = if i == 0 {
            None
        } else {
            link_channel(reply.hops[i - 1].idle, me.idle)
        };
        let rf = self.reliability.rf(j);
        let obs = LinkObservation {
            distance: env.measured_distance(self.id, j),
            sender_fix: reply.sender_fix,
            dest_fix: reply.dest_fix,
            common_channels: common_idle_count(me.idle, next.idle),
            from_channel,
            to_channel: link_channel(me.idle, next.idle),
            neighbors: env.neighbor_count(self.id),
            rf,
        };
        let (value, delay) = score_link(&obs, reply.accumulated_delay, cfg)?;
        reply.accumulated_delay += delay;
        reply.link_values.insert(0, value);
        reply.max_rf = reply.max_rf.max(rf);
        reply.cursor = i;
        if i == 0 {
            return Ok(self.store_reply(reply));
        }
        let prev = reply.hops[i - 1].node;
        let me = &reply.hops[i];
        reply.sender_fix = TimedFix {
            received_at: me.received_at,
            sent_at: env.now(),
            transmission_time: env.control_delay(self.id, prev),
            received_pos: me.received_pos,
            sent_pos: env.position(self.id),
        };
        Ok(vec![Action::Unicast {
            to: prev,
            msg: ControlMessage::Rrep(reply),
        }])
    }

    fn store_reply(&mut self, reply: RouteReply) -> Vec<Action> {
        let dest = reply.target;
        let s = self.sessions.entry(dest).or_default();
        if s.latest != Some(reply.id) {
            return dropped(MessageKind::Rrep, "stale");
        }
        let path = reply.path();
        let weight = if path.iter().any(|n| self.reliability.is_frozen(*n)) {
            PathWeight::ZERO
        } else {
            path_weight(&reply.link_values)
        };
        let entry = RouteEntry {
            weight,
            rf: reply.max_rf,
            path: path.clone(),
        };
        match s.table.push(entry) {
            Ok(_) => vec![Action::RouteStored { dest, path, weight }],
            Err(_) => dropped(MessageKind::Rrep, "loop"),
        }
    }

    /// Ends reply collection for `id` and selects a route.
    pub fn discovery_timeout(&mut self, dest: NodeId, id: RequestId) -> Vec<Action> {
        let Some(s) = self.sessions.get_mut(&dest) else {
            return Vec::new();
        };
        if s.discovery != Some(id) {
            return Vec::new();
        }
        s.discovery = None;
        match select_route(&s.table) {
            Ok(e) => {
                let path = e.path.clone();
                s.active = Some(e.clone());
                vec![Action::RouteSelected { dest, path }]
            }
            Err(_) => vec![Action::DiscoveryFailed { dest }],
        }
    }

    /// Active route lost: switch to the best stored alternative or rediscover.
    fn reselect(&mut self, dest: NodeId, env: &impl LinkEnv) -> (MaintenanceOutcome, Vec<Action>) {
        let s = self.sessions.entry(dest).or_default();
        s.active = None;
        if let Ok(e) = select_route(&s.table) {
            let path = e.path.clone();
            s.active = Some(e.clone());
            return (MaintenanceOutcome::Switched, vec![Action::RouteSelected { dest, path }]);
        }
        if s.discovery.is_some() {
            return (MaintenanceOutcome::NeedsDiscovery, Vec::new());
        }
        let actions = self.originate_discovery(dest, env).unwrap_or_default();
        (MaintenanceOutcome::NeedsDiscovery, actions)
    }

    /// Source-side reaction to a broken link on routes towards `dest`.
    pub fn handle_link_failure(
        &mut self,
        dest: NodeId,
        from: NodeId,
        to: NodeId,
        env: &impl LinkEnv,
    ) -> (MaintenanceOutcome, Vec<Action>) {
        let Some(s) = self.sessions.get_mut(&dest) else {
            return (MaintenanceOutcome::Unchanged, Vec::new());
        };
        s.table.remove_link(from, to);
        let uses = s.active.as_ref().is_some_and(|e| e.contains_link(from, to));
        let (outcome, rest) = if uses {
            self.reselect(dest, env)
        } else {
            (MaintenanceOutcome::Unchanged, Vec::new())
        };
        let mut actions = vec![Action::LinkFailure {
            dest,
            from,
            to,
            outcome,
        }];
        actions.extend(rest);
        (outcome, actions)
    }

    /// Called at `from` when link `from -> to` of `route` is found broken.
    /// Rate limited per (source, destination, link).
    pub fn raise_link_failure(
        &mut self,
        route: &[NodeId],
        to: NodeId,
        env: &impl LinkEnv,
        cfg: &AgentConfig,
    ) -> Vec<Action> {
        let (Some(&source), Some(&dest), Some(idx)) =
            (route.first(), route.last(), route.iter().position(|&n| n == self.id))
        else {
            return Vec::new();
        };
        let now = env.now();
        let key = (source, dest, self.id, to);
        if let Some(&t) = self.last_error.get(&key) {
            if now - t < cfg.params.rerr_interval {
                return Vec::new();
            }
        }
        self.last_error.insert(key, now);
        if idx == 0 {
            return self.handle_link_failure(dest, self.id, to, env).1;
        }
        self.next_error_seq += 1;
        let err = RouteError {
            origin: self.id,
            seq: self.next_error_seq,
            cause: ErrorCause::LinkFailure { from: self.id, to },
            prefix: route[..=idx].to_vec(),
            cursor: idx,
            dest,
        };
        vec![Action::Unicast {
            to: route[idx - 1],
            msg: ControlMessage::Rerr(err),
        }]
    }

    pub fn handle_rerr(&mut self, mut err: RouteError, env: &impl LinkEnv) -> Vec<Action> {
        match err.cause {
            ErrorCause::LinkFailure { from, to } => {
                if err.cursor == 0 || err.prefix.get(err.cursor - 1) != Some(&self.id) {
                    return dropped(MessageKind::Rerr, "not_on_path");
                }
                let idx = err.cursor - 1;
                if idx == 0 {
                    return self.handle_link_failure(err.dest, from, to, env).1;
                }
                err.cursor = idx;
                vec![Action::Unicast {
                    to: err.prefix[idx - 1],
                    msg: ControlMessage::Rerr(err),
                }]
            }
            ErrorCause::Malicious { subject } => {
                if !self.seen_notices.insert((err.origin, err.seq)) {
                    return dropped(MessageKind::Rerr, "duplicate");
                }
                let mut actions = self.mark_malicious(subject, env);
                actions.push(Action::Broadcast(ControlMessage::Rerr(err)));
                actions
            }
        }
    }

    /// Freezes `subject` and purges every route through it.
    pub fn mark_malicious(&mut self, subject: NodeId, env: &impl LinkEnv) -> Vec<Action> {
        let mut actions = Vec::new();
        if subject == self.id {
            return actions;
        }
        if !self.reliability.is_frozen(subject) {
            self.reliability.freeze(subject);
            actions.push(Action::Frozen { subject });
        }
        let mut lost = Vec::new();
        for (dest, s) in &mut self.sessions {
            s.table.remove_node(subject);
            if s.active.as_ref().is_some_and(|e| e.contains_node(subject)) {
                lost.push(*dest);
            }
        }
        for dest in lost {
            actions.extend(self.reselect(dest, env).1);
        }
        actions
    }

    /// Network-wide notice sent by the querier after a round froze `subject`.
    pub fn announce_malicious(&mut self, subject: NodeId, env: &impl LinkEnv) -> Vec<Action> {
        let mut actions = self.mark_malicious(subject, env);
        self.next_error_seq += 1;
        self.seen_notices.insert((self.id, self.next_error_seq));
        actions.push(Action::Broadcast(ControlMessage::Rerr(RouteError {
            origin: self.id,
            seq: self.next_error_seq,
            cause: ErrorCause::Malicious { subject },
            prefix: Vec::new(),
            cursor: 0,
            dest: subject,
        })));
        actions
    }

    /// Whether overheard drops by `subject` warrant a suspicion round.
    pub fn should_query(&self, subject: NodeId, cfg: &AgentConfig) -> bool {
        subject != self.id
            && !self.reliability.is_frozen(subject)
            && !self.open_queries.values().any(|q| q.subject == subject)
            && self.monitor.triggers(subject, cfg.params.drop_threshold)
    }

    /// Opens a round; the caller schedules the tally.
    pub fn start_query(&mut self, subject: NodeId) -> (u32, Action) {
        self.next_round += 1;
        let round = self.next_round;
        self.open_queries.insert(
            round,
            OpenQuery {
                subject,
                votes: Vec::new(),
            },
        );
        let q = SuspicionQuery {
            querier: self.id,
            round,
            subject,
        };
        (round, Action::Broadcast(ControlMessage::SqnQuery(q)))
    }

    pub fn handle_query(&self, q: &SuspicionQuery, env: &impl LinkEnv, cfg: &AgentConfig) -> Vec<Action> {
        if q.subject == self.id || !env.in_range(self.id, q.subject) {
            return dropped(MessageKind::SqnQuery, "not_neighbor");
        }
        let report = SuspicionReport {
            querier: q.querier,
            round: q.round,
            subject: q.subject,
            reporter: self.id,
            suspect: self.monitor.votes_suspect(q.subject, cfg.params.drop_threshold),
        };
        vec![Action::Unicast {
            to: q.querier,
            msg: ControlMessage::SqnReport(report),
        }]
    }

    pub fn handle_report(&mut self, r: &SuspicionReport) -> Vec<Action> {
        match self.open_queries.get_mut(&r.round) {
            Some(q) if q.subject == r.subject && r.querier == self.id => {
                if !q.votes.iter().any(|(n, _)| *n == r.reporter) {
                    q.votes.push((r.reporter, r.suspect));
                }
                Vec::new()
            }
            _ => dropped(MessageKind::SqnReport, "no_open_round"),
        }
    }

    /// Closes a round, counting this node as a participant.
    pub fn close_query(&mut self, round: u32, cfg: &AgentConfig) -> Option<SuspicionRound> {
        let q = self.open_queries.remove(&round)?;
        let mut votes = vec![(
            self.id,
            self.monitor.votes_suspect(q.subject, cfg.params.drop_threshold),
        )];
        votes.extend(q.votes);
        self.monitor.clear(q.subject);
        Some(SuspicionRound {
            subject: q.subject,
            votes,
        })
    }
}
