use crate::geo::Position;
use crate::NodeId;

use super::LinkEnv;

/// Greedy geographic next hop: the usable neighbour closest to
/// `dest_position`, provided it is strictly closer than `node` itself.
/// `None` means the packet sits at a local maximum. Ties go to the lower id.
pub fn greedy_baseline_forward(
    node: NodeId,
    dest_position: Position,
    candidates: impl IntoIterator<Item = NodeId>,
    env: &impl LinkEnv,
) -> Option<NodeId> {
    let own = env.position(node).distance(&dest_position);
    let mut best: Option<(f64, NodeId)> = None;
    for n in candidates {
        if n == node || !env.usable(node, n) {
            continue;
        }
        let d = env.position(n).distance(&dest_position);
        if d >= own {
            continue;
        }
        if best.is_none_or(|(bd, bn)| d < bd || (d == bd && n < bn)) {
            best = Some((d, n));
        }
    }
    best.map(|(_, n)| n)
}
