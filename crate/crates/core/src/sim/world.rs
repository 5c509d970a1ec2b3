use crate::error::InputError;
use crate::geo::{
    distance_to_path_loss, interpolate, path_loss_to_distance, Kinematics, Position, RangingParams, TimedFix,
};
use crate::metric::MetricParams;
use crate::protocol::LinkEnv;
use crate::spectrum::{link_channel, unit_hash, ChannelId, ChannelSet, PuField, PuTransition};
use crate::NodeId;

#[derive(Debug, Clone)]
pub(crate) enum Spectrum {
    Field {
        field: PuField,
        /// Ground-truth idle set per cell, kept current by transitions.
        cell_idle: Vec<ChannelSet>,
    },
    Static {
        idle: Vec<ChannelSet>,
    },
}

/// Radio-level state of the network at the current simulated instant.
#[derive(Debug, Clone)]
pub struct World {
    now: f64,
    step_time: f64,
    kin: Vec<Kinematics>,
    area_side: f64,
    tx_range: f64,
    /// Neighbour counts as of the last mobility step.
    neighbors: Vec<u32>,
    spectrum: Spectrum,
    op_channel: Vec<Option<ChannelId>>,
    ranging: RangingParams,
    noise_db: f64,
    noise_seed: u64,
    metric: MetricParams,
    data_rate: f64,
    control_bits: f64,
}

pub(crate) struct WorldParams {
    pub area_side: f64,
    pub tx_range: f64,
    pub ranging: RangingParams,
    pub noise_db: f64,
    pub seed: u64,
    pub metric: MetricParams,
    pub data_rate: f64,
    pub control_bits: f64,
}

impl World {
    pub(crate) fn new(kin: Vec<Kinematics>, spectrum: Spectrum, p: WorldParams) -> World {
        let n = kin.len();
        let mut w = World {
            now: 0.0,
            step_time: 0.0,
            kin,
            area_side: p.area_side,
            tx_range: p.tx_range,
            neighbors: vec![0; n],
            spectrum,
            op_channel: vec![None; n],
            ranging: p.ranging,
            noise_db: p.noise_db,
            noise_seed: p.seed,
            metric: p.metric,
            data_rate: p.data_rate,
            control_bits: p.control_bits,
        };
        w.refresh_neighbors();
        w
    }

    pub fn node_count(&self) -> usize {
        self.kin.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.kin.len()).map(NodeId::from)
    }

    pub fn tx_range(&self) -> f64 {
        self.tx_range
    }

    pub(crate) fn set_now(&mut self, t: f64) {
        self.now = t;
    }

    pub(crate) fn kinematics_mut(&mut self) -> &mut [Kinematics] {
        &mut self.kin
    }

    /// Marks a completed mobility step at the current time.
    pub(crate) fn stepped(&mut self) {
        self.step_time = self.now;
        self.refresh_neighbors();
    }

    fn refresh_neighbors(&mut self) {
        let pos: Vec<Position> = self.kin.iter().map(|k| k.position).collect();
        for (i, p) in pos.iter().enumerate() {
            self.neighbors[i] = pos
                .iter()
                .enumerate()
                .filter(|&(j, q)| j != i && p.distance(q) <= self.tx_range)
                .count() as u32;
        }
    }

    pub(crate) fn apply_pu(&mut self, t: &PuTransition) {
        if let Spectrum::Field { cell_idle, .. } = &mut self.spectrum {
            if t.busy {
                cell_idle[t.cell].remove(t.channel);
            } else {
                cell_idle[t.cell].insert(t.channel);
            }
        }
    }

    pub(crate) fn set_static_idle(&mut self, node: NodeId, idle: ChannelSet) {
        if let Spectrum::Static { idle: sets } = &mut self.spectrum {
            sets[node.index()] = idle;
        }
    }

    pub fn op_channel(&self, node: NodeId) -> Option<ChannelId> {
        self.op_channel[node.index()]
    }

    pub(crate) fn set_op_channel(&mut self, node: NodeId, ch: ChannelId) {
        self.op_channel[node.index()] = Some(ch);
    }

    pub fn nodes_in_range(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let p = self.position(node);
        self.nodes()
            .filter(move |&m| m != node && self.position(m).distance(&p) <= self.tx_range)
    }

    /// Link delay for `bits` sent from `from` to `to`, and the channel used.
    /// Without a common channel no switch is charged.
    pub fn link_delay(&self, from: NodeId, to: NodeId, bits: f64) -> Result<(f64, Option<ChannelId>), InputError> {
        let q = link_channel(self.idle(from), self.idle(to));
        let v = self.neighbor_count(from);
        let delays = match q {
            Some(q) => self.metric.delays(bits, self.data_rate, v, self.op_channel(from), q)?,
            None => self.metric.delays(bits, self.data_rate, v, None, ChannelId(0))?,
        };
        Ok((delays.total(), q))
    }

    fn gaussian(&self, a: NodeId, b: NodeId) -> f64 {
        let key = [self.noise_seed, u64::from(a.0), u64::from(b.0), self.now.to_bits()];
        let u1 = unit_hash(&[key[0], key[1], key[2], key[3], 1]).max(f64::MIN_POSITIVE);
        let u2 = unit_hash(&[key[0], key[1], key[2], key[3], 2]);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

impl LinkEnv for World {
    fn now(&self) -> f64 {
        self.now
    }

    fn position(&self, node: NodeId) -> Position {
        interpolate(&self.kin[node.index()], self.now - self.step_time, self.area_side)
    }

    fn idle(&self, node: NodeId) -> ChannelSet {
        match &self.spectrum {
            Spectrum::Static { idle } => idle[node.index()],
            Spectrum::Field { field, cell_idle } => {
                let cell = field.cell_of(self.position(node));
                field.apply_sensing_errors(cell, self.now, cell_idle[cell])
            }
        }
    }

    fn in_range(&self, a: NodeId, b: NodeId) -> bool {
        self.position(a).distance(&self.position(b)) <= self.tx_range
    }

    fn neighbor_count(&self, node: NodeId) -> u32 {
        self.neighbors[node.index()]
    }

    /// True distance pushed through the path-loss model and back, with
    /// optional Gaussian noise on the synthesized loss.
    fn measured_distance(&self, a: NodeId, b: NodeId) -> f64 {
        let d = self.position(a).distance(&self.position(b)).max(1e-6);
        let Ok(mut kappa) = distance_to_path_loss(d, &self.ranging) else {
            return d;
        };
        if self.noise_db > 0.0 {
            kappa += self.noise_db * self.gaussian(a, b);
        }
        path_loss_to_distance(kappa, &self.ranging).unwrap_or(d)
    }

    fn control_delay(&self, from: NodeId, to: NodeId) -> f64 {
        self.link_delay(from, to, self.control_bits)
            .map(|(d, _)| d)
            .unwrap_or(self.metric.contention_window)
    }

    fn recent_fix(&self, node: NodeId, toward: NodeId) -> TimedFix {
        TimedFix {
            received_at: self.step_time,
            sent_at: self.now,
            transmission_time: self.control_delay(node, toward),
            received_pos: self.kin[node.index()].position,
            sent_pos: self.position(node),
        }
    }
}
