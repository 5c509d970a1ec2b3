//! TOML scenario files.
//!
//! Every section is optional and falls back to the reference environment,
//! but traffic must be stated: either `random_flows`, explicit `flows`, or
//! `zero_flows = true`. Unknown keys and duplicate keys are errors.
//!
//! ```toml
//! [sweep]
//! protocols = ["nhdf", "greedy"]
//! node_counts = [120, 160, 200]
//! seeds = [1, 2, 3]
//!
//! [traffic]
//! random_flows = { count = 10, rate = 4.0 }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ScenarioError, SimError};
use crate::geo::RangingParams;
use crate::metric::MetricParams;
use crate::protocol::NhdfParams;
use crate::sim::{NetworkConfig, Protocol, ScriptConfig, SimConfig, SpectrumConfig, TrafficConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub protocols: Vec<Protocol>,
    pub node_counts: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            protocols: Protocol::ALL.to_vec(),
            node_counts: vec![120, 140, 160, 180, 200],
            seeds: (1..=5).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFile {
    pub sweep: SweepSpec,
    pub network: NetworkConfig,
    pub traffic: TrafficConfig,
    pub spectrum: SpectrumConfig,
    pub ranging: RangingParams,
    pub metric: MetricParams,
    pub routing: NhdfParams,
    pub script: ScriptConfig,
}

impl ScenarioFile {
    /// Configuration of one sweep cell.
    pub fn config(&self, node_count: usize, seed: u64) -> SimConfig {
        SimConfig {
            node_count,
            seed,
            network: self.network.clone(),
            traffic: self.traffic.clone(),
            spectrum: self.spectrum.clone(),
            ranging: self.ranging,
            metric: self.metric,
            routing: self.routing.clone(),
            script: self.script.clone(),
            trace: false,
        }
    }

    /// Every (protocol, node_count, seed) cell in output order.
    pub fn cells(&self) -> Vec<(Protocol, usize, u64)> {
        let mut out = Vec::new();
        for &p in &self.sweep.protocols {
            for &n in &self.sweep.node_counts {
                for &s in &self.sweep.seeds {
                    out.push((p, n, s));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let sw = &self.sweep;
        if sw.protocols.is_empty() {
            return Err(ScenarioError::validation(
                "sweep.protocols",
                "must list at least one protocol",
            ));
        }
        if sw.node_counts.is_empty() {
            return Err(ScenarioError::validation(
                "sweep.node_counts",
                "must list at least one node count",
            ));
        }
        if sw.seeds.is_empty() {
            return Err(ScenarioError::validation("sweep.seeds", "must list at least one seed"));
        }
        if let Some(&n) = sw.node_counts.iter().find(|&&n| n == 0) {
            return Err(ScenarioError::validation(
                "sweep.node_counts",
                format!("{n} is not a positive node count"),
            ));
        }
        if !self.traffic.has_flows() && !self.traffic.zero_flows {
            return Err(ScenarioError::validation(
                "traffic",
                "no flows configured; set traffic.random_flows or traffic.flows, or zero_flows = true",
            ));
        }
        for &n in &sw.node_counts {
            self.config(n, sw.seeds[0]).validate().map_err(|e| match e {
                SimError::Config { field, reason } => ScenarioError::Validation { field, reason },
                other => ScenarioError::validation("scenario", other.to_string()),
            })?;
        }
        Ok(())
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

/// Parses and validates scenario text.
pub fn parse_scenario_str(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    file.validate()?;
    Ok(file)
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_demands_flows() {
        match parse_scenario_str("") {
            Err(ScenarioError::Validation { field, .. }) => assert_eq!(field, "traffic"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_flow_flag_accepts_defaults() {
        let s = parse_scenario_str("[traffic]\nzero_flows = true\n").unwrap();
        assert_eq!(s.network, NetworkConfig::default());
        assert_eq!(s.cells().len(), 50);
    }

    #[test]
    fn zero_node_count_names_the_field() {
        let text = "[sweep]\nnode_counts = [0]\n[traffic]\nzero_flows = true\n";
        match parse_scenario_str(text) {
            Err(ScenarioError::Validation { field, .. }) => assert_eq!(field, "sweep.node_counts"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_is_a_parse_error_with_line() {
        let text = "[traffic]\nzero_flows = true\n\n[network]\nrun_time = 10.0\nrun_time = 20.0\n";
        match parse_scenario_str(text) {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = "[traffic]\nzero_flows = true\n[network]\nwarp_speed = 9\n";
        assert!(matches!(
            parse_scenario_str(text),
            Err(ScenarioError::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn invalid_value_names_the_field() {
        let text = "[traffic]\nzero_flows = true\n[network]\nrun_time = -1.0\n";
        match parse_scenario_str(text) {
            Err(ScenarioError::Validation { field, .. }) => assert_eq!(field, "network.run_time"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cells_are_ordered_by_protocol_then_count_then_seed() {
        let text = "[sweep]\nprotocols = [\"greedy\", \"nhdf\"]\nnode_counts = [5, 3]\nseeds = [2, 1]\n[traffic]\nzero_flows = true\n";
        let cells = parse_scenario_str(text).unwrap().cells();
        assert_eq!(cells[0], (Protocol::Greedy, 5, 2));
        assert_eq!(cells[1], (Protocol::Greedy, 5, 1));
        assert_eq!(cells[2], (Protocol::Greedy, 3, 2));
        assert_eq!(cells[4], (Protocol::Nhdf, 5, 2));
    }
}
