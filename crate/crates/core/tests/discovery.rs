mod common;

use common::*;
use nhdf_sim::protocol::{ForwardingMode, MessageKind};
use nhdf_sim::sim::{Protocol, TraceEvent};
use nhdf_sim::NodeId;

fn rreq_sends(trace: &[nhdf_sim::sim::TraceRecord], node: u32) -> usize {
    events(trace, TraceEvent::Send)
        .filter(|r| r.node == NodeId(node) && r.kind == Some(MessageKind::Rreq))
        .count()
}

#[test]
fn triangle_suppresses_duplicate_requests() {
    // 0, 1, 2 mutually in range; 3 is unreachable so the flood runs dry.
    let mut cfg = layout(&[[0.0, 0.0], [300.0, 0.0], [150.0, 250.0], [3000.0, 3000.0]], 3.0);
    // a single packet, so a single discovery
    flow(&mut cfg, 0, 3, 0.2, 0.0);
    let (_, trace) = traced(&cfg, Protocol::Nhdf);
    for n in 0..3 {
        assert_eq!(rreq_sends(&trace, n), 1, "node {n}");
    }
    for n in 1..3 {
        let dups = events(&trace, TraceEvent::Drop)
            .filter(|r| r.node == NodeId(n) && r.reason.as_deref() == Some("duplicate"))
            .count();
        assert_eq!(dups, 1, "node {n}");
    }
    assert_eq!(events(&trace, TraceEvent::DiscoveryFailed).count(), 1);
}

#[test]
fn one_hop_destination_answers_directly() {
    let mut cfg = layout(&[[0.0, 0.0], [400.0, 0.0]], 3.0);
    flow(&mut cfg, 0, 1, 1.0, 0.0);
    let (_, trace) = traced(&cfg, Protocol::Nhdf);
    let stored: Vec<_> = events(&trace, TraceEvent::RouteStored).collect();
    assert_eq!(stored.len(), 1);
    assert_eq!(stored[0].path.as_deref(), Some(&path(&[0, 1])[..]));
}

#[test]
fn chain_yields_exactly_one_route() {
    let mut cfg = layout(&[[0.0, 0.0], [450.0, 0.0], [900.0, 0.0], [1350.0, 0.0]], 3.0);
    flow(&mut cfg, 0, 3, 1.0, 0.0);
    let (_, trace) = traced(&cfg, Protocol::Nhdf);
    let stored: Vec<_> = events(&trace, TraceEvent::RouteStored)
        .filter(|r| r.node == NodeId(0))
        .collect();
    assert_eq!(stored.len(), 1);
    assert_eq!(stored[0].path.as_deref(), Some(&path(&[0, 1, 2, 3])[..]));
    let rreps: Vec<_> = events(&trace, TraceEvent::Send)
        .filter(|r| r.kind == Some(MessageKind::Rrep))
        .map(|r| (r.node, r.peer.unwrap()))
        .collect();
    // the reply walks back along the exact reverse path
    assert_eq!(rreps, [(NodeId(2), NodeId(1)), (NodeId(1), NodeId(0))]);
}

#[test]
fn all_paths_mode_finds_every_simple_path() {
    // square: 0-1, 0-2, 1-3, 2-3 (diagonals out of range)
    let mut cfg = layout(&[[0.0, 0.0], [400.0, 0.0], [0.0, 400.0], [400.0, 400.0]], 3.0);
    cfg.routing.forwarding_mode = ForwardingMode::AllPaths;
    flow(&mut cfg, 0, 3, 1.0, 0.0);
    let (_, trace) = traced(&cfg, Protocol::Nhdf);
    let mut stored: Vec<_> = events(&trace, TraceEvent::RouteStored)
        .filter(|r| r.node == NodeId(0))
        .map(|r| r.path.clone().unwrap())
        .collect();
    stored.sort();
    assert_eq!(stored, [path(&[0, 1, 3]), path(&[0, 2, 3])]);
}

#[test]
fn stored_routes_never_loop() {
    let mut cfg = nhdf_sim::sim::SimConfig::default();
    cfg.network.run_time = 30.0;
    let (_, trace) = traced(&cfg, Protocol::Nhdf);
    for r in events(&trace, TraceEvent::RouteStored) {
        let p = r.path.as_ref().unwrap();
        let mut seen = p.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), p.len(), "{p:?}");
    }
}

#[test]
fn isolated_destination_drops_held_packets_as_no_route() {
    let mut cfg = layout(&[[0.0, 0.0], [3000.0, 3000.0]], 5.0);
    flow(&mut cfg, 0, 1, 4.0, 0.0);
    let (report, _) = traced(&cfg, Protocol::Nhdf);
    assert_eq!(report.delivered, 0);
    assert!(report.dropped.no_route > 0);
    assert_eq!(report.sent, report.dropped.no_route + report.in_flight_at_end);
}
