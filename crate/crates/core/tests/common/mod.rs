#![allow(dead_code)]

use nhdf_sim::sim::{
    run_traced, FlowSpec, IdleChange, MetricsReport, Protocol, SimConfig, SpectrumMode, TraceEvent, TraceRecord,
    TrafficConfig, VelocityChange,
};
use nhdf_sim::NodeId;

/// Static nodes at `points`, every channel idle everywhere, no traffic.
pub fn layout(points: &[[f64; 2]], run_time: f64) -> SimConfig {
    let mut cfg = SimConfig {
        node_count: points.len(),
        ..SimConfig::default()
    };
    cfg.network.run_time = run_time;
    cfg.spectrum.mode = SpectrumMode::Static;
    cfg.script.positions = Some(points.to_vec());
    cfg.script.velocities = Some(vec![[0.0, 0.0]; points.len()]);
    cfg.traffic = TrafficConfig {
        random_flows: None,
        flows: Vec::new(),
        zero_flows: true,
    };
    cfg
}

pub fn flow(cfg: &mut SimConfig, source: u32, dest: u32, rate: f64, start: f64) {
    cfg.traffic.flows.push(FlowSpec {
        source,
        dest,
        rate,
        start,
    });
    cfg.traffic.zero_flows = false;
}

pub fn idle(cfg: &mut SimConfig, time: f64, node: u32, channels: &[u16]) {
    cfg.spectrum.idle_changes.push(IdleChange {
        time,
        node,
        channels: channels.to_vec(),
    });
}

pub fn drive(cfg: &mut SimConfig, time: f64, node: u32, velocity: [f64; 2]) {
    cfg.script
        .velocity_changes
        .push(VelocityChange { time, node, velocity });
}

pub fn traced(cfg: &SimConfig, protocol: Protocol) -> (MetricsReport, Vec<TraceRecord>) {
    run_traced(cfg, protocol).expect("run succeeds")
}

pub fn events(trace: &[TraceRecord], event: TraceEvent) -> impl Iterator<Item = &TraceRecord> {
    trace.iter().filter(move |r| r.event == event)
}

pub fn path(ids: &[u32]) -> Vec<NodeId> {
    ids.iter().map(|&i| NodeId(i)).collect()
}

/// Source, malicious relay, destination on a line with an honest detour
/// relay; rotated and jittered by `k`. Returns the config and the
/// malicious node id.
pub fn malicious_layout(k: u64) -> (SimConfig, u32) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xbad0 + k);
    let angle = k as f64 * std::f64::consts::TAU / 20.0;
    let (sin, cos) = angle.sin_cos();
    let side = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let rel = [
        [-400.0, 0.0],
        [0.0, 0.0],
        [400.0, 0.0],
        [0.0, 250.0 * side],
        // a bystander that hears the malicious relay
        [-150.0, -250.0 * side],
    ];
    let pts: Vec<[f64; 2]> = rel
        .iter()
        .enumerate()
        .map(|(i, &[x, y])| {
            let j = if i == 1 { 0.0 } else { 20.0 };
            let (x, y) = (x + rng.gen_range(-j..=j), y + rng.gen_range(-j..=j));
            [2000.0 + x * cos - y * sin, 2000.0 + x * sin + y * cos]
        })
        .collect();
    let mut cfg = layout(&pts, 30.0);
    flow(&mut cfg, 0, 2, 8.0, 0.5);
    cfg.script.malicious = vec![1];
    (cfg, 1)
}

/// Selected routes that still contain `m` at a node that had already frozen it.
pub fn selections_through_frozen(trace: &[TraceRecord], m: u32) -> Vec<TraceRecord> {
    use std::collections::BTreeMap;
    let mut frozen_at: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut bad = Vec::new();
    for r in trace {
        match r.event {
            TraceEvent::RfFrozen if r.peer == Some(NodeId(m)) => {
                frozen_at.entry(r.node).or_insert(r.time);
            }
            TraceEvent::RouteSelected => {
                let through = r.path.as_ref().is_some_and(|p| p.contains(&NodeId(m)));
                if through && frozen_at.contains_key(&r.node) {
                    bad.push(r.clone());
                }
            }
            _ => {}
        }
    }
    bad
}
