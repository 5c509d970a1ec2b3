//! Sweeps over (protocol, node count, seed) and their result files.
//!
//! The results CSV has a fixed header ([`CSV_HEADER`]); undefined ratios
//! and means are written as empty fields. Plot-data files hold one line per
//! node count: `node_count` followed by mean and standard deviation for each
//! protocol, whitespace separated, `nan` where nothing was measured.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SweepError;
use crate::scenario::ScenarioFile;
use crate::sim::{run, run_traced, write_trace, MetricsReport, Protocol};

/// One CSV row; one per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub protocol: Protocol,
    pub node_count: usize,
    pub seed: u64,
    pub pdr: Option<f64>,
    pub throughput_pps: f64,
    pub mean_e2e_delay_s: Option<f64>,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub dropped_queue_overflow: u64,
    pub dropped_no_route: u64,
    pub dropped_local_maximum: u64,
    pub dropped_link_failure: u64,
    pub dropped_hop_limit: u64,
    pub dropped_malicious: u64,
    pub in_flight_at_end: u64,
}

pub const CSV_HEADER: [&str; 16] = [
    "protocol",
    "node_count",
    "seed",
    "pdr",
    "throughput_pps",
    "mean_e2e_delay_s",
    "sent",
    "delivered",
    "dropped",
    "dropped_queue_overflow",
    "dropped_no_route",
    "dropped_local_maximum",
    "dropped_link_failure",
    "dropped_hop_limit",
    "dropped_malicious",
    "in_flight_at_end",
];

impl From<&MetricsReport> for ResultRow {
    fn from(r: &MetricsReport) -> Self {
        ResultRow {
            protocol: r.protocol,
            node_count: r.node_count,
            seed: r.seed,
            pdr: r.pdr,
            throughput_pps: r.throughput_pps,
            mean_e2e_delay_s: r.mean_e2e_delay,
            sent: r.sent,
            delivered: r.delivered,
            dropped: r.dropped.total(),
            dropped_queue_overflow: r.dropped.queue_overflow,
            dropped_no_route: r.dropped.no_route,
            dropped_local_maximum: r.dropped.local_maximum,
            dropped_link_failure: r.dropped.link_failure,
            dropped_hop_limit: r.dropped.hop_limit,
            dropped_malicious: r.dropped.malicious,
            in_flight_at_end: r.in_flight_at_end,
        }
    }
}

impl ResultRow {
    pub fn is_conserved(&self) -> bool {
        self.sent == self.delivered + self.dropped + self.in_flight_at_end
            && self.dropped
                == self.dropped_queue_overflow
                    + self.dropped_no_route
                    + self.dropped_local_maximum
                    + self.dropped_link_failure
                    + self.dropped_hop_limit
                    + self.dropped_malicious
    }
}

/// Runs every cell, in parallel, keeping the scenario's cell order.
pub fn run_sweep(scenario: &ScenarioFile) -> Result<Vec<ResultRow>, SweepError> {
    scenario
        .cells()
        .into_par_iter()
        .map(|(protocol, node_count, seed)| {
            run(&scenario.config(node_count, seed), protocol)
                .map(|r| ResultRow::from(&r))
                .map_err(|source| SweepError::Run {
                    protocol: protocol.to_string(),
                    node_count,
                    seed,
                    source,
                })
        })
        .collect()
}

/// Like [`run_sweep`], also writing each cell's event trace to
/// `dir/<protocol>_n<count>_s<seed>.jsonl`.
pub fn run_sweep_traced(scenario: &ScenarioFile, dir: &Path) -> Result<Vec<ResultRow>, SweepError> {
    fs::create_dir_all(dir)?;
    scenario
        .cells()
        .into_par_iter()
        .map(|(protocol, node_count, seed)| {
            let (report, trace) =
                run_traced(&scenario.config(node_count, seed), protocol).map_err(|source| SweepError::Run {
                    protocol: protocol.to_string(),
                    node_count,
                    seed,
                    source,
                })?;
            let path = dir.join(format!("{protocol}_n{node_count}_s{seed}.jsonl"));
            write_trace(std::io::BufWriter::new(fs::File::create(path)?), &trace)?;
            Ok(ResultRow::from(&report))
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, SweepError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(SweepError::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected CSV header: {}", header.join(",")),
        )));
    }
    Ok(r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
    pub count: usize,
}

pub fn mean_std(values: impl IntoIterator<Item = f64>) -> Option<MeanStd> {
    let v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some(MeanStd {
        mean,
        std,
        count: v.len(),
    })
}

/// Per-(protocol, node count) aggregate over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub protocol: Protocol,
    pub node_count: usize,
    pub runs: usize,
    pub pdr: Option<MeanStd>,
    pub throughput_pps: Option<MeanStd>,
    pub mean_e2e_delay_s: Option<MeanStd>,
}

/// Sorted by protocol, then node count.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Protocol, usize)> = rows.iter().map(|r| (r.protocol, r.node_count)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(protocol, node_count)| {
            let cell: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.protocol == protocol && r.node_count == node_count)
                .collect();
            SummaryRow {
                protocol,
                node_count,
                runs: cell.len(),
                pdr: mean_std(cell.iter().filter_map(|r| r.pdr)),
                throughput_pps: mean_std(cell.iter().map(|r| r.throughput_pps)),
                mean_e2e_delay_s: mean_std(cell.iter().filter_map(|r| r.mean_e2e_delay_s)),
            }
        })
        .collect()
}

fn cell_text(m: Option<MeanStd>, digits: usize) -> String {
    match m {
        Some(m) => format!("{:.*} ± {:.*}", digits, m.mean, digits, m.std),
        None => "-".to_owned(),
    }
}

pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>6} {:>5} {:>20} {:>22} {:>22}",
        "protocol", "nodes", "runs", "pdr", "throughput (pkt/s)", "e2e delay (s)"
    );
    for s in summary {
        let _ = writeln!(
            out,
            "{:<8} {:>6} {:>5} {:>20} {:>22} {:>22}",
            s.protocol.name(),
            s.node_count,
            s.runs,
            cell_text(s.pdr, 4),
            cell_text(s.throughput_pps, 3),
            cell_text(s.mean_e2e_delay_s, 4),
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Pdr,
    Delay,
    Throughput,
}

impl PlotMetric {
    pub const ALL: [PlotMetric; 3] = [PlotMetric::Pdr, PlotMetric::Delay, PlotMetric::Throughput];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotMetric::Pdr => "pdr.dat",
            PlotMetric::Delay => "delay.dat",
            PlotMetric::Throughput => "throughput.dat",
        }
    }

    fn pick(self, s: &SummaryRow) -> Option<MeanStd> {
        match self {
            PlotMetric::Pdr => s.pdr,
            PlotMetric::Delay => s.mean_e2e_delay_s,
            PlotMetric::Throughput => s.throughput_pps,
        }
    }
}

/// Plot-data text for one metric.
pub fn plot_data(summary: &[SummaryRow], metric: PlotMetric) -> String {
    let mut protocols: Vec<Protocol> = summary.iter().map(|s| s.protocol).collect();
    protocols.dedup();
    let mut counts: Vec<usize> = summary.iter().map(|s| s.node_count).collect();
    counts.sort_unstable();
    counts.dedup();
    let mut out = String::from("# node_count");
    for p in &protocols {
        let _ = write!(out, " {p}_mean {p}_std");
    }
    out.push('\n');
    for n in counts {
        let _ = write!(out, "{n}");
        for &p in &protocols {
            let m = summary
                .iter()
                .find(|s| s.protocol == p && s.node_count == n)
                .and_then(|s| metric.pick(s));
            match m {
                Some(m) => {
                    let _ = write!(out, " {} {}", m.mean, m.std);
                }
                None => out.push_str(" nan nan"),
            }
        }
        out.push('\n');
    }
    out
}

pub const CSV_FILE: &str = "results.csv";

/// Creates `dir` and checks it is writable, so a bad path fails before any
/// simulation starts.
pub fn prepare_output_dir(dir: &Path) -> Result<(), SweepError> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"")?;
    fs::remove_file(&probe)?;
    Ok(())
}

/// Writes the CSV and the three plot-data files; returns the paths written
/// and the console summary.
pub fn emit_outputs(rows: &[ResultRow], dir: &Path) -> Result<(Vec<PathBuf>, String), SweepError> {
    prepare_output_dir(dir)?;
    let mut written = Vec::new();
    let csv_path = dir.join(CSV_FILE);
    write_csv(fs::File::create(&csv_path)?, rows)?;
    written.push(csv_path);
    let summary = summarize(rows);
    for m in PlotMetric::ALL {
        let p = dir.join(m.file_name());
        fs::write(&p, plot_data(&summary, m))?;
        written.push(p);
    }
    Ok((written, format_summary(&summary)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(protocol: Protocol, node_count: usize, seed: u64, pdr: Option<f64>) -> ResultRow {
        ResultRow {
            protocol,
            node_count,
            seed,
            pdr,
            throughput_pps: 3.6,
            mean_e2e_delay_s: pdr.map(|_| 0.012_345_678_901_234_5),
            sent: 600,
            delivered: 540,
            dropped: 60,
            dropped_queue_overflow: 10,
            dropped_no_route: 50,
            dropped_local_maximum: 0,
            dropped_link_failure: 0,
            dropped_hop_limit: 0,
            dropped_malicious: 0,
            in_flight_at_end: 0,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![
            row(Protocol::Nhdf, 120, 1, Some(0.9)),
            row(Protocol::Greedy, 200, 5, None),
            row(Protocol::Nhdf, 140, 2, Some(1.0 / 3.0)),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        assert!(text.contains("greedy,200,5,,3.6,,600"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn singleton_summary_equals_the_cell() {
        let rows = vec![row(Protocol::Nhdf, 120, 1, Some(0.9))];
        let s = summarize(&rows);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].pdr.unwrap().mean, 0.9);
        assert_eq!(s[0].pdr.unwrap().std, 0.0);
        assert_eq!(s[0].mean_e2e_delay_s.unwrap().mean, rows[0].mean_e2e_delay_s.unwrap());
    }

    #[test]
    fn summary_orders_by_protocol_then_count() {
        let rows = vec![
            row(Protocol::Greedy, 120, 1, Some(0.5)),
            row(Protocol::Nhdf, 200, 1, Some(0.5)),
            row(Protocol::Nhdf, 120, 1, Some(0.5)),
        ];
        let keys: Vec<_> = summarize(&rows).iter().map(|s| (s.protocol, s.node_count)).collect();
        assert_eq!(
            keys,
            [(Protocol::Nhdf, 120), (Protocol::Nhdf, 200), (Protocol::Greedy, 120)]
        );
    }

    #[test]
    fn mean_std_matches_hand_values() {
        let m = mean_std([2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(m.mean, 5.0);
        assert!((m.std - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
        assert!(mean_std(std::iter::empty()).is_none());
    }

    #[test]
    fn plot_data_has_one_line_per_count() {
        let rows = vec![
            row(Protocol::Nhdf, 120, 1, Some(0.8)),
            row(Protocol::Nhdf, 120, 2, Some(1.0)),
            row(Protocol::Greedy, 120, 1, None),
            row(Protocol::Nhdf, 140, 1, Some(0.5)),
        ];
        let text = plot_data(&summarize(&rows), PlotMetric::Pdr);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# node_count nhdf_mean nhdf_std greedy_mean greedy_std");
        assert!(lines[1].starts_with("120 0.9 "));
        assert!(lines[1].ends_with(" nan nan"));
        assert_eq!(lines[2], "140 0.5 0 nan nan");
    }
}
