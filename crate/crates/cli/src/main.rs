use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use log::{error, info};
use nhdf_sim::scenario::parse_scenario;
use nhdf_sim::sim::Protocol;
use nhdf_sim::sweep::{emit_outputs, prepare_output_dir, run_sweep, run_sweep_traced};
use nhdf_sim::SweepError;

/// Runs a scenario sweep and writes results.csv plus pdr/delay/throughput plot data.
#[derive(Debug, Parser)]
#[command(name = "nhdf", version)]
struct Cli {
    /// Scenario file (TOML).
    scenario: PathBuf,

    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,

    /// Only run these protocols (repeatable).
    #[arg(short, long, value_name = "NAME")]
    protocol: Vec<Protocol>,

    /// Replace the scenario's seed list with this seed.
    #[arg(short, long)]
    seed: Option<u64>,

    /// Write a JSON-lines event trace per run into OUT/traces.
    #[arg(long)]
    trace: bool,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_RUN: u8 = 4;

fn exit_code(e: &SweepError) -> u8 {
    match e {
        SweepError::Scenario(_) => EXIT_CONFIG,
        SweepError::Io(_) | SweepError::Csv(_) => EXIT_IO,
        SweepError::Run { .. } => EXIT_RUN,
    }
}

fn execute(cli: &Cli) -> Result<(), SweepError> {
    let mut scenario = parse_scenario(&cli.scenario)?;
    if !cli.protocol.is_empty() {
        scenario.sweep.protocols.retain(|p| cli.protocol.contains(p));
    }
    if let Some(seed) = cli.seed {
        scenario.sweep.seeds = vec![seed];
    }
    scenario.validate()?;
    prepare_output_dir(&cli.out)?;

    let cells = scenario.cells().len();
    info!("running {cells} cells");
    let start = Instant::now();
    let rows = if cli.trace {
        run_sweep_traced(&scenario, &cli.out.join("traces"))?
    } else {
        run_sweep(&scenario)?
    };
    info!("sweep finished in {:.1?}", start.elapsed());

    let (written, summary) = emit_outputs(&rows, &cli.out)?;
    print!("{summary}");
    for p in written {
        info!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
