use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use rffso_cli::config::{Config, MetricKind};
use rffso_cli::sweep::{columns, run_sweep, write_csv, write_summary};

/// Sweep outage, BER, capacity and energy-efficiency metrics of a HAPS
/// RF/FSO multicast relay chain and write them as CSV.
#[derive(Debug, Parser)]
#[command(name = "rffso", version)]
struct Args {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Monte Carlo master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo samples per point.
    #[arg(long)]
    samples: Option<u64>,
    /// Skip Monte Carlo columns.
    #[arg(long)]
    no_mc: bool,
    /// Comma-separated metrics, replacing the config's list
    /// (op, op_asymptotic, ber, capacity, capacity_ub, ee).
    #[arg(long, value_delimiter = ',')]
    metric: Option<Vec<MetricKind>>,
}

fn run(args: Args) -> Result<()> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(n) = args.samples {
        cfg.mc.samples = n;
    }
    if args.no_mc {
        cfg.mc.enabled = false;
    }
    if let Some(m) = args.metric {
        cfg.sweep.metrics = m;
    }
    cfg.validate()?;

    let cols = columns(&cfg, &cfg.sweep.metrics, cfg.mc.enabled);
    anyhow::ensure!(
        !cols.is_empty(),
        "no columns to compute (capacity needs Monte Carlo)"
    );
    let rows = run_sweep(&cfg, &cols)?;

    match &args.output {
        Some(path) => {
            let f =
                File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            write_csv(BufWriter::new(f), &cfg, &cols, &rows)?;
            write_summary(io::stdout().lock(), &cfg, &cols, &rows)?;
        }
        None => {
            write_csv(io::stdout().lock(), &cfg, &cols, &rows)?;
            write_summary(io::stderr().lock(), &cfg, &cols, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
