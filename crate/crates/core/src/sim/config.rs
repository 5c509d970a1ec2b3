use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geo::RangingParams;
use crate::metric::MetricParams;
use crate::protocol::NhdfParams;
use crate::spectrum::{PuActivityModel, MAX_CHANNELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Nhdf,
    /// Greedy geographic forwarding, the comparison baseline.
    Greedy,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Nhdf, Protocol::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Nhdf => "nhdf",
            Protocol::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nhdf" => Ok(Protocol::Nhdf),
            "greedy" => Ok(Protocol::Greedy),
            other => Err(format!("unknown protocol `{other}` (expected nhdf or greedy)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingKind {
    #[default]
    StraightRoadBidirectional,
    RandomWaypoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    /// Side of the square area, meters.
    pub area_side: f64,
    /// Φ_t, meters. Links exist up to and including this distance.
    pub tx_range: f64,
    /// m/s
    pub max_speed: f64,
    pub heading: HeadingKind,
    /// Seconds between mobility steps (and link checks).
    pub mobility_step: f64,
    pub run_time: f64,
    pub packet_size_bytes: u32,
    pub control_size_bytes: u32,
    /// bits/s
    pub data_rate: f64,
    pub queue_capacity: usize,
    /// Standard deviation of Gaussian noise on the synthesized path loss, dB.
    pub ranging_noise_db: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            area_side: 4000.0,
            tx_range: 500.0,
            max_speed: 2.0,
            heading: HeadingKind::StraightRoadBidirectional,
            mobility_step: 0.5,
            run_time: 150.0,
            packet_size_bytes: 512,
            control_size_bytes: 64,
            data_rate: 2e6,
            queue_capacity: 50,
            ranging_noise_db: 0.0,
        }
    }
}

/// One CBR flow: packets at `start + k / rate` for every k with that time
/// before the end of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub source: u32,
    pub dest: u32,
    /// packets/s
    pub rate: f64,
    #[serde(default)]
    pub start: f64,
}

/// `count` distinct source/destination pairs drawn from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomFlows {
    pub count: usize,
    pub rate: f64,
}

impl Default for RandomFlows {
    fn default() -> Self {
        RandomFlows { count: 10, rate: 4.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrafficConfig {
    pub random_flows: Option<RandomFlows>,
    pub flows: Vec<FlowSpec>,
    /// Explicitly allow a run without traffic.
    pub zero_flows: bool,
}

impl TrafficConfig {
    pub fn has_flows(&self) -> bool {
        self.random_flows.as_ref().is_some_and(|r| r.count > 0) || !self.flows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    /// Idle sets follow the primary-user field.
    #[default]
    PrimaryUsers,
    /// Every channel idle everywhere, except for scripted `idle_changes`.
    Static,
}

/// From `time` on, `node` senses exactly `channels` as idle (static mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdleChange {
    pub time: f64,
    pub node: u32,
    pub channels: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub channels: usize,
    pub mode: SpectrumMode,
    pub pu: PuActivityModel,
    pub idle_changes: Vec<IdleChange>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            channels: crate::spectrum::DEFAULT_CHANNELS,
            mode: SpectrumMode::PrimaryUsers,
            pu: PuActivityModel::default(),
            idle_changes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocityChange {
    pub time: f64,
    pub node: u32,
    pub velocity: [f64; 2],
}

/// Hand-built topologies for tests and demonstrations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScriptConfig {
    pub positions: Option<Vec<[f64; 2]>>,
    /// Fixed velocities; replaces the heading policy when present.
    pub velocities: Option<Vec<[f64; 2]>>,
    pub velocity_changes: Vec<VelocityChange>,
    /// Nodes that silently drop data they should forward.
    pub malicious: Vec<u32>,
}

/// Everything one run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub node_count: usize,
    pub seed: u64,
    pub network: NetworkConfig,
    pub traffic: TrafficConfig,
    pub spectrum: SpectrumConfig,
    pub ranging: RangingParams,
    pub metric: MetricParams,
    pub routing: NhdfParams,
    pub script: ScriptConfig,
    /// Keep a full event trace in memory.
    #[serde(skip)]
    pub trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            node_count: 120,
            seed: 1,
            network: NetworkConfig::default(),
            traffic: TrafficConfig {
                random_flows: Some(RandomFlows::default()),
                ..TrafficConfig::default()
            },
            spectrum: SpectrumConfig::default(),
            ranging: RangingParams::default(),
            metric: MetricParams::default(),
            routing: NhdfParams::default(),
            script: ScriptConfig::default(),
            trace: false,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<(), SimError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SimError::config(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), SimError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(SimError::config(field, format!("must be finite and >= 0, got {v}")))
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let n = self.node_count;
        if n == 0 {
            return Err(SimError::config("node_count", "must be >= 1"));
        }
        if u32::try_from(n).is_err() {
            return Err(SimError::config("node_count", "too large"));
        }
        let net = &self.network;
        positive("network.area_side", net.area_side)?;
        positive("network.tx_range", net.tx_range)?;
        non_negative("network.max_speed", net.max_speed)?;
        positive("network.mobility_step", net.mobility_step)?;
        positive("network.run_time", net.run_time)?;
        positive("network.data_rate", net.data_rate)?;
        non_negative("network.ranging_noise_db", net.ranging_noise_db)?;
        if net.packet_size_bytes == 0 {
            return Err(SimError::config("network.packet_size_bytes", "must be >= 1"));
        }
        if net.control_size_bytes == 0 {
            return Err(SimError::config("network.control_size_bytes", "must be >= 1"));
        }
        if net.queue_capacity == 0 {
            return Err(SimError::config("network.queue_capacity", "must be >= 1"));
        }

        let in_nodes = |field: &str, id: u32| {
            if (id as usize) < n {
                Ok(())
            } else {
                Err(SimError::config(
                    field,
                    format!("node {id} does not exist (node_count = {n})"),
                ))
            }
        };
        if let Some(r) = &self.traffic.random_flows {
            positive("traffic.random_flows.rate", r.rate)?;
            if r.count > n * (n - 1) {
                return Err(SimError::config(
                    "traffic.random_flows.count",
                    format!("{} distinct pairs requested from {n} nodes", r.count),
                ));
            }
        }
        for f in &self.traffic.flows {
            in_nodes("traffic.flows.source", f.source)?;
            in_nodes("traffic.flows.dest", f.dest)?;
            if f.source == f.dest {
                return Err(SimError::config(
                    "traffic.flows",
                    format!("flow {} -> {} loops", f.source, f.dest),
                ));
            }
            positive("traffic.flows.rate", f.rate)?;
            non_negative("traffic.flows.start", f.start)?;
        }

        let sp = &self.spectrum;
        if sp.channels == 0 || sp.channels > MAX_CHANNELS {
            return Err(SimError::config(
                "spectrum.channels",
                format!("must lie in 1..={MAX_CHANNELS}"),
            ));
        }
        sp.pu
            .validate()
            .map_err(|e| SimError::config("spectrum.pu", e.to_string()))?;
        for c in &sp.idle_changes {
            in_nodes("spectrum.idle_changes.node", c.node)?;
            non_negative("spectrum.idle_changes.time", c.time)?;
            if let Some(ch) = c.channels.iter().find(|&&ch| ch as usize >= sp.channels) {
                return Err(SimError::config(
                    "spectrum.idle_changes.channels",
                    format!("channel {ch} out of range"),
                ));
            }
        }
        self.ranging
            .validate()
            .map_err(|e| SimError::config("ranging", e.to_string()))?;
        self.metric
            .validate()
            .map_err(|e| SimError::config("metric", e.to_string()))?;
        self.routing
            .validate()
            .map_err(|e| SimError::config("routing", e.to_string()))?;

        let s = &self.script;
        let side = net.area_side;
        if let Some(p) = &s.positions {
            if p.len() != n {
                return Err(SimError::config(
                    "script.positions",
                    format!("{} entries for {n} nodes", p.len()),
                ));
            }
            if p.iter()
                .any(|[x, y]| !(0.0..=side).contains(x) || !(0.0..=side).contains(y))
            {
                return Err(SimError::config(
                    "script.positions",
                    "every position must lie inside the area",
                ));
            }
        }
        if let Some(v) = &s.velocities {
            if v.len() != n {
                return Err(SimError::config(
                    "script.velocities",
                    format!("{} entries for {n} nodes", v.len()),
                ));
            }
            if v.iter().flatten().any(|c| !c.is_finite()) {
                return Err(SimError::config("script.velocities", "must be finite"));
            }
        }
        for c in &s.velocity_changes {
            if s.velocities.is_none() {
                return Err(SimError::config(
                    "script.velocity_changes",
                    "requires script.velocities",
                ));
            }
            in_nodes("script.velocity_changes.node", c.node)?;
            non_negative("script.velocity_changes.time", c.time)?;
        }
        for &m in &s.malicious {
            in_nodes("script.malicious", m)?;
        }
        Ok(())
    }
}
