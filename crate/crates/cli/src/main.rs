use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use uavsched::experiment::{
    load_config, run_sweep, write_report, ExperimentConfig, Scheme, SweepConfig, SweepVariable,
};

/// Monte-Carlo sweeps of the UAV-assisted mmWave train downlink scheduler and
/// its BS-only baselines. Flags override values from the configuration file.
#[derive(Debug, Parser)]
#[command(name = "uavsched", version)]
struct Args {
    /// TOML configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Schemes to run: uav_assisted, qos_concurrent, mqis.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<Scheme>,

    /// Number of requested flows.
    #[arg(long)]
    flows: Option<usize>,

    /// Transmission slots per frame.
    #[arg(long)]
    slots: Option<u64>,

    /// Horizontal BS-UAV distance in meters.
    #[arg(long = "uav-distance")]
    uav_distance: Option<f64>,

    /// Scenario seeds.
    #[arg(long, value_delimiter = ',')]
    seed: Vec<u64>,

    /// Sweep specification, e.g. `uav_distance=50,100,150`.
    #[arg(long)]
    sweep: Option<String>,

    /// Directory for runs.csv and summary.csv.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

fn parse_sweep(spec: &str) -> Result<SweepConfig> {
    let (var, values) = spec
        .split_once('=')
        .with_context(|| format!("--sweep expects VAR=v1,v2,..., got {spec:?}"))?;
    let variable: SweepVariable = var.trim().parse()?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("bad sweep value {v:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepConfig { variable, values })
}

fn effective_config(args: &Args) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if !args.scheme.is_empty() {
        config.schemes = args.scheme.clone();
    }
    if !args.seed.is_empty() {
        config.seeds = args.seed.clone();
    }
    if let Some(out) = &args.output {
        config.output = out.clone();
    }
    if let Some(spec) = &args.sweep {
        config.sweep = parse_sweep(spec)?;
    }
    // A fixed value for the swept variable collapses the sweep to that point.
    if let Some(n) = args.flows {
        config.scenario.flow_count = n;
        if config.sweep.variable == SweepVariable::FlowCount {
            if args.sweep.is_some() {
                bail!("--flows conflicts with a flow_count sweep");
            }
            config.sweep.values = vec![n as f64];
        }
    }
    if let Some(m) = args.slots {
        config.frame.slot_count = m;
        if config.sweep.variable == SweepVariable::SlotCount {
            if args.sweep.is_some() {
                bail!("--slots conflicts with a slot_count sweep");
            }
            config.sweep.values = vec![m as f64];
        }
    }
    if let Some(d) = args.uav_distance {
        config.scenario.uav_distance_m = d;
        if config.sweep.variable == SweepVariable::UavDistance {
            if args.sweep.is_some() {
                bail!("--uav-distance conflicts with a uav_distance sweep");
            }
            config.sweep.values = vec![d];
        }
    }
    config.validate()?;
    Ok(config)
}

fn run(args: Args) -> Result<()> {
    let config = effective_config(&args)?;
    if args.print_config {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let report = run_sweep(&config)?;
    let (runs, summary) = write_report(&report, &config.output)?;
    for row in &report.summary {
        println!(
            "{}={} {:<14} completed {:>6.2} ± {:<5.2} throughput {:>9.2} Mbps  slots {:>7.1}",
            report.variable,
            row.sweep_value,
            row.scheme,
            row.completed_flows.mean,
            row.completed_flows.std,
            row.system_throughput_mbps.mean,
            row.total_slots_used.mean,
        );
    }
    eprintln!("wrote {} and {}", runs.display(), summary.display());
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
