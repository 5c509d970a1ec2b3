//! Deterministic discrete-event simulation of the network.
//!
//! A run is single-threaded and a pure function of its [`SimConfig`] and
//! [`Protocol`]: events are ordered by (time, insertion sequence) and all
//! randomness comes from seeded ChaCha streams.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::geo::{HeadingPolicy, Mobility, MobilityModel, Position, Velocity};
use crate::protocol::nhdf::RouteDecision;
use crate::protocol::{
    greedy_baseline_forward, has_loop, run_suspicion_round, Action, AgentConfig, ControlMessage, DataPacket, LinkEnv,
    MessageKind, NhdfAgent, RequestId, RoundOutcome,
};
use crate::spectrum::{ChannelId, ChannelSet, PuField, PuTransition};
use crate::NodeId;

pub mod config;
pub mod event;
pub mod metrics;
pub mod trace;
pub mod world;

pub use config::{
    FlowSpec, HeadingKind, IdleChange, NetworkConfig, Protocol, RandomFlows, ScriptConfig, SimConfig, SpectrumConfig,
    SpectrumMode, TrafficConfig, VelocityChange,
};
pub use event::{Event, EventQueue};
pub use metrics::{collect_metrics, DropCause, DropCounts, MetricsReport, PacketLedger};
pub use trace::{parse_line, read_trace, to_line, write_trace, TraceEvent, TraceRecord};
pub use world::World;

use world::{Spectrum, WorldParams};

const FLOW_STREAM: u64 = 1;
const PU_SEED_SALT: u64 = 0x5055_4649_454c_4400;

#[derive(Debug, Clone)]
enum EventKind {
    Deliver {
        from: NodeId,
        to: NodeId,
        msg: ControlMessage,
    },
    TransmitDone {
        node: NodeId,
        next: NodeId,
        packet: DataPacket,
        delay: f64,
        channel: Option<ChannelId>,
    },
    MobilityStep(u64),
    Pu(PuTransition),
    IdleChange(usize),
    TrafficEmit {
        flow: usize,
        k: u64,
    },
    DiscoveryTimeout {
        node: NodeId,
        dest: NodeId,
        id: RequestId,
    },
    SuspicionTally {
        node: NodeId,
        round: u32,
    },
    End,
}

pub struct Simulator {
    cfg: SimConfig,
    protocol: Protocol,
    agent_cfg: AgentConfig,
    world: World,
    mobility: Mobility,
    queue: EventQueue<EventKind>,
    agents: Vec<NhdfAgent>,
    data: Vec<VecDeque<DataPacket>>,
    busy: Vec<bool>,
    /// Data waiting for discovery, per source and destination.
    pending: Vec<BTreeMap<NodeId, VecDeque<DataPacket>>>,
    malicious: Vec<bool>,
    flows: Vec<FlowSpec>,
    velocity_changes: Vec<VelocityChange>,
    next_velocity_change: usize,
    ledger: PacketLedger,
    trace: Option<Vec<TraceRecord>>,
    last_time: f64,
    finished: bool,
}

fn draw_flows(cfg: &SimConfig) -> Vec<FlowSpec> {
    let mut flows = cfg.traffic.flows.clone();
    let Some(r) = &cfg.traffic.random_flows else {
        return flows;
    };
    let n = cfg.node_count as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(FLOW_STREAM);
    let mut pairs = BTreeSet::new();
    while pairs.len() < r.count {
        let s = rng.gen_range(0..n);
        let d = rng.gen_range(0..n);
        if s == d || !pairs.insert((s, d)) {
            continue;
        }
        flows.push(FlowSpec {
            source: s,
            dest: d,
            rate: r.rate,
            start: rng.gen_range(0.0..1.0),
        });
    }
    flows
}

fn channel_set(ids: &[u16]) -> ChannelSet {
    ids.iter().map(|&c| ChannelId(c)).collect()
}

impl Simulator {
    pub fn new(cfg: SimConfig, protocol: Protocol) -> Result<Simulator, SimError> {
        cfg.validate()?;
        let n = cfg.node_count;
        let net = cfg.network.clone();
        let script = &cfg.script;

        let positions: Option<Vec<Position>> = script
            .positions
            .as_ref()
            .map(|p| p.iter().map(|&[x, y]| Position::new(x, y)).collect());
        let heading_policy = match &script.velocities {
            Some(v) => HeadingPolicy::Scripted(v.iter().map(|&[x, y]| Velocity::new(x, y)).collect()),
            None => match net.heading {
                HeadingKind::StraightRoadBidirectional => HeadingPolicy::StraightRoadBidirectional,
                HeadingKind::RandomWaypoint => HeadingPolicy::RandomWaypoint,
            },
        };
        let model = MobilityModel {
            area_side: net.area_side,
            max_speed: net.max_speed,
            heading_policy,
            rng_seed: cfg.seed,
        };
        let (mut mobility, mut kin) = Mobility::new(model, n, positions.as_deref(), net.mobility_step);

        let mut velocity_changes = script.velocity_changes.clone();
        velocity_changes.sort_by(|a, b| a.time.total_cmp(&b.time));
        let mut next_velocity_change = 0;
        for c in velocity_changes.iter().take_while(|c| c.time <= 0.0) {
            let v = Velocity::new(c.velocity[0], c.velocity[1]);
            mobility.set_scripted_velocity(c.node as usize, v);
            kin[c.node as usize].velocity = v;
            next_velocity_change += 1;
        }

        let sp = &cfg.spectrum;
        let mut transitions = Vec::new();
        let spectrum = match sp.mode {
            SpectrumMode::PrimaryUsers => {
                if !sp.idle_changes.is_empty() {
                    return Err(SimError::config(
                        "spectrum.idle_changes",
                        "only allowed with mode = \"static\"",
                    ));
                }
                let field = PuField::new(
                    sp.pu.clone(),
                    sp.channels,
                    net.area_side,
                    net.run_time,
                    cfg.seed ^ PU_SEED_SALT,
                )
                .map_err(|e| SimError::config("spectrum.pu", e.to_string()))?;
                let cell_idle = (0..field.cell_count()).map(|c| field.cell_idle(c, 0.0)).collect();
                transitions = field.transitions();
                Spectrum::Field { field, cell_idle }
            }
            SpectrumMode::Static => {
                let mut idle = vec![ChannelSet::full(sp.channels); n];
                for c in sp.idle_changes.iter().filter(|c| c.time <= 0.0) {
                    idle[c.node as usize] = channel_set(&c.channels);
                }
                Spectrum::Static { idle }
            }
        };

        let data_bits = f64::from(net.packet_size_bytes) * 8.0;
        let world = World::new(
            kin,
            spectrum,
            WorldParams {
                area_side: net.area_side,
                tx_range: net.tx_range,
                ranging: cfg.ranging,
                noise_db: net.ranging_noise_db,
                seed: cfg.seed,
                metric: cfg.metric,
                data_rate: net.data_rate,
                control_bits: f64::from(net.control_size_bytes) * 8.0,
            },
        );
        let agent_cfg = AgentConfig {
            params: cfg.routing.clone(),
            metric: cfg.metric,
            tx_range: net.tx_range,
            data_bits,
            data_rate: net.data_rate,
        };
        let mut malicious = vec![false; n];
        for &m in &script.malicious {
            malicious[m as usize] = true;
        }

        let flows = draw_flows(&cfg);
        let mut queue = EventQueue::new();
        let run_time = net.run_time;
        queue.schedule(run_time, 0.0, EventKind::End);
        if net.mobility_step < run_time {
            queue.schedule(net.mobility_step, 0.0, EventKind::MobilityStep(1));
        }
        for t in transitions.into_iter().filter(|t| t.time < run_time) {
            queue.schedule(t.time, 0.0, EventKind::Pu(t));
        }
        for (i, c) in sp.idle_changes.iter().enumerate() {
            if c.time > 0.0 && c.time < run_time {
                queue.schedule(c.time, 0.0, EventKind::IdleChange(i));
            }
        }
        for (i, f) in flows.iter().enumerate() {
            if f.start < run_time {
                queue.schedule(f.start, 0.0, EventKind::TrafficEmit { flow: i, k: 0 });
            }
        }

        Ok(Simulator {
            agents: (0..n)
                .map(|i| NhdfAgent::new(NodeId::from(i), cfg.routing.monitor_window))
                .collect(),
            data: vec![VecDeque::new(); n],
            busy: vec![false; n],
            pending: vec![BTreeMap::new(); n],
            trace: cfg.trace.then(Vec::new),
            cfg,
            protocol,
            agent_cfg,
            world,
            mobility,
            queue,
            malicious,
            flows,
            velocity_changes,
            next_velocity_change,
            ledger: PacketLedger::default(),
            last_time: 0.0,
            finished: false,
        })
    }

    pub fn now(&self) -> f64 {
        self.world.now()
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn agent(&self, node: NodeId) -> &NhdfAgent {
        &self.agents[node.index()]
    }

    pub fn flows(&self) -> &[FlowSpec] {
        &self.flows
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Processes every event up to and including time `t`.
    pub fn run_until(&mut self, t: f64) -> Result<(), SimError> {
        while !self.finished {
            match self.queue.peek_time() {
                Some(next) if next <= t => {}
                _ => break,
            }
            let ev = self.queue.pop().expect("peeked");
            self.dispatch(ev)?;
        }
        Ok(())
    }

    pub fn run_to_end(&mut self) -> Result<(), SimError> {
        self.run_until(f64::INFINITY)
    }

    /// Final accounting. Call after [`Simulator::run_to_end`].
    pub fn finish(self) -> Result<(MetricsReport, Vec<TraceRecord>), SimError> {
        let held = self.data.iter().map(VecDeque::len).sum::<usize>()
            + self
                .pending
                .iter()
                .flat_map(|m| m.values())
                .map(VecDeque::len)
                .sum::<usize>()
            + self.busy.iter().filter(|b| **b).count();
        let in_flight = self.ledger.in_flight();
        if held as u64 != in_flight {
            return Err(self.invariant(format!(
                "{held} packets held in buffers but {in_flight} unsettled in the ledger"
            )));
        }
        let net = &self.cfg.network;
        let report = collect_metrics(
            self.protocol,
            self.cfg.node_count,
            self.cfg.seed,
            net.run_time,
            self.agent_cfg.data_bits,
            self.ledger.sent(),
            self.ledger.delays(),
            self.ledger.dropped(),
            in_flight,
        );
        if !report.is_conserved() {
            return Err(self.invariant("sent != delivered + dropped + in flight"));
        }
        Ok((report, self.trace.unwrap_or_default()))
    }

    fn invariant(&self, what: impl Into<String>) -> SimError {
        SimError::Invariant {
            time: self.world.now(),
            what: what.into(),
        }
    }

    fn log(&mut self, f: impl FnOnce(f64) -> TraceRecord) {
        if let Some(t) = &mut self.trace {
            t.push(f(self.world.now()));
        }
    }

    fn schedule_in(&mut self, delay: f64, kind: EventKind) {
        let now = self.world.now();
        self.queue.schedule(now + delay, now, kind);
    }

    fn dispatch(&mut self, ev: Event<EventKind>) -> Result<(), SimError> {
        if ev.time < ev.scheduled_at || ev.time < self.last_time {
            return Err(self.invariant(format!(
                "event at {} scheduled at {} after clock reached {}",
                ev.time, ev.scheduled_at, self.last_time
            )));
        }
        self.last_time = ev.time;
        self.world.set_now(ev.time);
        match ev.kind {
            EventKind::End => self.finished = true,
            EventKind::Deliver { from, to, msg } => self.deliver(from, to, msg)?,
            EventKind::TransmitDone {
                node,
                next,
                packet,
                delay,
                channel,
            } => self.transmit_done(node, next, packet, delay, channel)?,
            EventKind::MobilityStep(k) => self.mobility_step(k)?,
            EventKind::Pu(t) => {
                self.world.apply_pu(&t);
                self.check_routes()?;
            }
            EventKind::IdleChange(i) => {
                let c = &self.cfg.spectrum.idle_changes[i];
                let (node, set) = (NodeId(c.node), channel_set(&c.channels));
                self.world.set_static_idle(node, set);
                self.check_routes()?;
            }
            EventKind::TrafficEmit { flow, k } => self.emit(flow, k)?,
            EventKind::DiscoveryTimeout { node, dest, id } => {
                let actions = self.agents[node.index()].discovery_timeout(dest, id);
                self.apply(node, actions)?;
            }
            EventKind::SuspicionTally { node, round } => self.tally(node, round)?,
        }
        Ok(())
    }

    fn mobility_step(&mut self, k: u64) -> Result<(), SimError> {
        let now = self.world.now();
        while let Some(c) = self.velocity_changes.get(self.next_velocity_change) {
            if c.time > now {
                break;
            }
            let v = Velocity::new(c.velocity[0], c.velocity[1]);
            self.mobility.set_scripted_velocity(c.node as usize, v);
            self.next_velocity_change += 1;
        }
        let dt = self.cfg.network.mobility_step;
        self.mobility.step(self.world.kinematics_mut(), dt);
        self.world.stepped();
        self.check_routes()?;
        let next = (k + 1) as f64 * dt;
        if next < self.cfg.network.run_time {
            self.queue.schedule(next, now, EventKind::MobilityStep(k + 1));
        }
        Ok(())
    }

    /// Detects broken links on every active route; the predecessor reports.
    fn check_routes(&mut self) -> Result<(), SimError> {
        if self.protocol != Protocol::Nhdf {
            return Ok(());
        }
        let mut broken = Vec::new();
        for a in &self.agents {
            for (_, s) in a.sessions() {
                let Some(e) = &s.active else { continue };
                if let Some((x, y)) = e.links().find(|&(x, y)| !self.world.usable(x, y)) {
                    broken.push((e.path.clone(), x, y));
                }
            }
        }
        for (path, x, y) in broken {
            let actions = self.agents[x.index()].raise_link_failure(&path, y, &self.world, &self.agent_cfg);
            self.apply(x, actions)?;
        }
        Ok(())
    }

    fn emit(&mut self, flow: usize, k: u64) -> Result<(), SimError> {
        let f = self.flows[flow].clone();
        let (src, dst) = (NodeId(f.source), NodeId(f.dest));
        let id = self.ledger.create();
        self.log(|t| TraceRecord::new(t, TraceEvent::PacketCreated, src).peer(dst).packet(id));
        let mut packet = DataPacket {
            id,
            flow,
            source: src,
            dest: dst,
            created_at: self.world.now(),
            route: None,
            hops: 0,
            link_delay_sum: 0.0,
        };
        match self.protocol {
            Protocol::Greedy => self.enqueue(src, packet)?,
            Protocol::Nhdf => {
                let decision = self.agents[src.index()]
                    .route_for(dst, &self.world)
                    .map_err(|e| self.invariant(e.to_string()))?;
                match decision {
                    RouteDecision::Use(path) => {
                        packet.route = Some(path);
                        self.enqueue(src, packet)?;
                    }
                    RouteDecision::Wait(actions) => {
                        self.hold(src, packet)?;
                        self.apply(src, actions)?;
                    }
                }
            }
        }
        let next = f.start + (k + 1) as f64 / f.rate;
        if next < self.cfg.network.run_time {
            let now = self.world.now();
            self.queue
                .schedule(next, now, EventKind::TrafficEmit { flow, k: k + 1 });
        }
        Ok(())
    }

    fn drop_packet(&mut self, node: NodeId, id: u64, cause: DropCause) -> Result<(), SimError> {
        self.ledger.drop(id, cause).map_err(|e| self.invariant(e))?;
        self.log(|t| {
            TraceRecord::new(t, TraceEvent::Drop, node)
                .kind(MessageKind::Data)
                .packet(id)
                .reason(cause.name())
        });
        Ok(())
    }

    fn hold(&mut self, node: NodeId, packet: DataPacket) -> Result<(), SimError> {
        let cap = self.cfg.network.queue_capacity;
        let buf = self.pending[node.index()].entry(packet.dest).or_default();
        if buf.len() >= cap {
            return self.drop_packet(node, packet.id, DropCause::QueueOverflow);
        }
        buf.push_back(packet);
        Ok(())
    }

    /// Drop-tail FIFO.
    fn enqueue(&mut self, node: NodeId, packet: DataPacket) -> Result<(), SimError> {
        if self.data[node.index()].len() >= self.cfg.network.queue_capacity {
            return self.drop_packet(node, packet.id, DropCause::QueueOverflow);
        }
        self.data[node.index()].push_back(packet);
        self.try_transmit(node)
    }

    fn try_transmit(&mut self, node: NodeId) -> Result<(), SimError> {
        let i = node.index();
        while !self.busy[i] {
            let Some(packet) = self.data[i].pop_front() else {
                break;
            };
            if packet.hops >= self.cfg.routing.hop_limit {
                self.drop_packet(node, packet.id, DropCause::HopLimit)?;
                continue;
            }
            let next = match self.protocol {
                Protocol::Nhdf => packet.next_on_route(node),
                Protocol::Greedy => {
                    let dest_pos = self.world.position(packet.dest);
                    greedy_baseline_forward(node, dest_pos, self.world.nodes(), &self.world)
                }
            };
            let Some(next) = next else {
                let cause = match self.protocol {
                    Protocol::Nhdf => DropCause::NoRoute,
                    Protocol::Greedy => DropCause::LocalMaximum,
                };
                self.drop_packet(node, packet.id, cause)?;
                continue;
            };
            if !self.world.usable(node, next) {
                self.drop_packet(node, packet.id, DropCause::LinkFailure)?;
                if let Some(route) = &packet.route {
                    let actions = self.agents[i].raise_link_failure(route, next, &self.world, &self.agent_cfg);
                    self.apply(node, actions)?;
                }
                continue;
            }
            let (delay, channel) = self
                .world
                .link_delay(node, next, self.agent_cfg.data_bits)
                .map_err(|e| self.invariant(e.to_string()))?;
            if let Some(q) = channel {
                self.world.set_op_channel(node, q);
            }
            self.busy[i] = true;
            let id = packet.id;
            self.log(|t| {
                TraceRecord::new(t, TraceEvent::Send, node)
                    .kind(MessageKind::Data)
                    .peer(next)
                    .packet(id)
            });
            self.schedule_in(
                delay,
                EventKind::TransmitDone {
                    node,
                    next,
                    packet,
                    delay,
                    channel,
                },
            );
        }
        Ok(())
    }

    fn transmit_done(
        &mut self,
        node: NodeId,
        next: NodeId,
        mut packet: DataPacket,
        delay: f64,
        channel: Option<ChannelId>,
    ) -> Result<(), SimError> {
        self.busy[node.index()] = false;
        packet.hops += 1;
        packet.link_delay_sum += delay;
        if let Some(q) = channel {
            self.world.set_op_channel(next, q);
        }
        let id = packet.id;
        self.log(|t| {
            TraceRecord::new(t, TraceEvent::Receive, next)
                .kind(MessageKind::Data)
                .peer(node)
                .packet(id)
        });
        let nhdf = self.protocol == Protocol::Nhdf;
        if nhdf && node != packet.source {
            self.observe(node, true);
        }
        if next == packet.dest {
            let e2e = self.world.now() - packet.created_at;
            if e2e + 1e-9 < packet.link_delay_sum {
                return Err(self.invariant(format!(
                    "packet {id} delivered after {e2e}s, below its link delays {}s",
                    packet.link_delay_sum
                )));
            }
            self.ledger.deliver(id, e2e).map_err(|e| self.invariant(e))?;
            self.log(|t| TraceRecord::new(t, TraceEvent::Delivered, next).packet(id));
        } else if self.malicious[next.index()] {
            self.drop_packet(next, id, DropCause::Malicious)?;
            if nhdf {
                self.observe(next, false);
                if self.agents[node.index()].should_query(next, &self.agent_cfg) {
                    self.start_query(node, next)?;
                }
            }
        } else {
            self.enqueue(next, packet)?;
        }
        self.try_transmit(node)
    }

    /// Every node in range of `subject` overhears whether it forwarded.
    fn observe(&mut self, subject: NodeId, forwarded: bool) {
        let witnesses: Vec<NodeId> = self.world.nodes_in_range(subject).collect();
        for w in witnesses {
            self.agents[w.index()].monitor.record(subject, forwarded);
        }
    }

    fn start_query(&mut self, node: NodeId, subject: NodeId) -> Result<(), SimError> {
        let (round, action) = self.agents[node.index()].start_query(subject);
        self.apply(node, vec![action])?;
        self.schedule_in(
            self.cfg.routing.query_timeout,
            EventKind::SuspicionTally { node, round },
        );
        Ok(())
    }

    fn tally(&mut self, node: NodeId, round: u32) -> Result<(), SimError> {
        let Some(r) = self.agents[node.index()].close_query(round, &self.agent_cfg) else {
            return Ok(());
        };
        let participants: BTreeSet<NodeId> = r.participants().collect();
        let outcome = run_suspicion_round(
            &r,
            self.cfg.routing.quorum,
            self.agents
                .iter_mut()
                .filter(|a| participants.contains(&a.id()))
                .map(|a| &mut a.reliability),
        );
        let subject = r.subject;
        let summary = format!("{outcome:?} {}/{}", r.suspect_votes(), r.queried());
        self.log(|t| {
            TraceRecord::new(t, TraceEvent::SuspicionRound, node)
                .peer(subject)
                .reason(summary)
        });
        if outcome != RoundOutcome::Frozen {
            return Ok(());
        }
        for &p in &participants {
            self.log(|t| TraceRecord::new(t, TraceEvent::RfFrozen, p).peer(subject));
        }
        for &p in participants.iter().filter(|&&p| p != node) {
            let actions = self.agents[p.index()].mark_malicious(subject, &self.world);
            self.apply(p, actions)?;
        }
        let actions = self.agents[node.index()].announce_malicious(subject, &self.world);
        self.apply(node, actions)
    }

    fn deliver(&mut self, from: NodeId, to: NodeId, msg: ControlMessage) -> Result<(), SimError> {
        let kind = msg.kind();
        self.log(|t| TraceRecord::new(t, TraceEvent::Receive, to).kind(kind).peer(from));
        let agent = &mut self.agents[to.index()];
        let actions = match msg {
            ControlMessage::Rreq(r) => agent.handle_rreq(r, &self.world, &self.agent_cfg),
            ControlMessage::Rrep(r) => agent.handle_rrep(r, &self.world, &self.agent_cfg),
            ControlMessage::Rerr(e) => Ok(agent.handle_rerr(e, &self.world)),
            ControlMessage::SqnQuery(q) => Ok(agent.handle_query(&q, &self.world, &self.agent_cfg)),
            ControlMessage::SqnReport(r) => Ok(agent.handle_report(&r)),
            ControlMessage::Data(_) => {
                return Err(self.invariant("data packet on the control path"));
            }
        }
        .map_err(|e| self.invariant(format!("{to} scoring a link: {e}")))?;
        self.apply(to, actions)
    }

    fn broadcast(&mut self, from: NodeId, msg: ControlMessage) {
        let kind = msg.kind();
        self.log(|t| TraceRecord::new(t, TraceEvent::Send, from).kind(kind));
        let receivers: Vec<NodeId> = self
            .world
            .nodes()
            .filter(|&r| r != from && self.world.usable(from, r))
            .collect();
        for r in receivers {
            let delay = self.world.control_delay(from, r);
            self.schedule_in(
                delay,
                EventKind::Deliver {
                    from,
                    to: r,
                    msg: msg.clone(),
                },
            );
        }
    }

    fn unicast(&mut self, from: NodeId, to: NodeId, msg: ControlMessage) {
        let kind = msg.kind();
        if !self.world.usable(from, to) {
            self.log(|t| {
                TraceRecord::new(t, TraceEvent::Drop, from)
                    .kind(kind)
                    .peer(to)
                    .reason("link_lost")
            });
            return;
        }
        self.log(|t| TraceRecord::new(t, TraceEvent::Send, from).kind(kind).peer(to));
        let delay = self.world.control_delay(from, to);
        self.schedule_in(delay, EventKind::Deliver { from, to, msg });
    }

    fn apply(&mut self, node: NodeId, actions: Vec<Action>) -> Result<(), SimError> {
        for a in actions {
            match a {
                Action::Broadcast(msg) => self.broadcast(node, msg),
                Action::Unicast { to, msg } => self.unicast(node, to, msg),
                Action::Dropped { kind, reason } => {
                    self.log(|t| TraceRecord::new(t, TraceEvent::Drop, node).kind(kind).reason(reason))
                }
                Action::DiscoveryStarted { dest, id } => {
                    self.log(|t| {
                        TraceRecord::new(t, TraceEvent::DiscoveryStarted, node)
                            .peer(dest)
                            .reason(format!("seq={}", id.seq))
                    });
                    self.schedule_in(
                        self.cfg.routing.discovery_timeout,
                        EventKind::DiscoveryTimeout { node, dest, id },
                    );
                }
                Action::RouteStored { dest, path, weight } => {
                    if has_loop(&path) {
                        return Err(self.invariant(format!("stored route {path:?} has a loop")));
                    }
                    self.log(|t| {
                        let r = TraceRecord::new(t, TraceEvent::RouteStored, node).peer(dest).path(path);
                        match weight.ln() {
                            Some(l) => r.reason(format!("ln_weight={l}")),
                            None => r.reason("excluded"),
                        }
                    });
                }
                Action::RouteSelected { dest, path } => {
                    if has_loop(&path) {
                        return Err(self.invariant(format!("selected route {path:?} has a loop")));
                    }
                    let p2 = path.clone();
                    self.log(|t| TraceRecord::new(t, TraceEvent::RouteSelected, node).peer(dest).path(p2));
                    let held = self.pending[node.index()].remove(&dest).unwrap_or_default();
                    for mut packet in held {
                        packet.route = Some(path.clone());
                        self.enqueue(node, packet)?;
                    }
                }
                Action::DiscoveryFailed { dest } => {
                    self.log(|t| TraceRecord::new(t, TraceEvent::DiscoveryFailed, node).peer(dest));
                    let held = self.pending[node.index()].remove(&dest).unwrap_or_default();
                    for packet in held {
                        self.drop_packet(node, packet.id, DropCause::NoRoute)?;
                    }
                }
                Action::LinkFailure {
                    dest,
                    from,
                    to,
                    outcome,
                } => self.log(|t| {
                    TraceRecord::new(t, TraceEvent::LinkFailure, node)
                        .peer(dest)
                        .path(vec![from, to])
                        .reason(format!("{outcome:?}"))
                }),
                Action::Frozen { subject } => {
                    self.log(|t| TraceRecord::new(t, TraceEvent::RfFrozen, node).peer(subject))
                }
            }
        }
        Ok(())
    }
}

/// Runs one configuration to completion.
pub fn run(config: &SimConfig, protocol: Protocol) -> Result<MetricsReport, SimError> {
    let mut sim = Simulator::new(config.clone(), protocol)?;
    sim.run_to_end()?;
    sim.finish().map(|(r, _)| r)
}

/// Like [`run`], also returning the full event trace.
pub fn run_traced(config: &SimConfig, protocol: Protocol) -> Result<(MetricsReport, Vec<TraceRecord>), SimError> {
    let mut cfg = config.clone();
    cfg.trace = true;
    let mut sim = Simulator::new(cfg, protocol)?;
    sim.run_to_end()?;
    sim.finish()
}
