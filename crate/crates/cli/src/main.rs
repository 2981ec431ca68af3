//! `emfsim` — run seeded exposure campaigns and inspect single UEs.
//!
//! Flags override the config file, which overrides built-in defaults.
//! Both subcommands echo the fully-resolved configuration as one line of
//! JSON on stdout before doing anything, so a run is reproducible from
//! its own log.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use emfsim::config::{load_config, RunConfig, ScenarioSpec};
use emfsim::runner::{explain_report, render_explain, run};

#[derive(Parser)]
#[command(
    name = "emfsim",
    version,
    about = "Seeded EMF-exposure simulator for cellular networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write its artifacts.
    Run(RunArgs),
    /// Re-derive one UE's trial and explain its exposure decisions.
    Explain(ExplainArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Technology preset to simulate (repeatable; replaces the config's
    /// scenario list).
    #[arg(long, value_name = "NAME")]
    scenario: Vec<String>,

    /// Trials per technology.
    #[arg(long, value_name = "N")]
    trials: Option<usize>,

    /// Master seed; every trial seed derives from it.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads: 0 = all cores, 1 = sequential.
    #[arg(long, value_name = "N")]
    parallelism: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Output directory for summary.csv, figure1_data.csv, run_record.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Trial detail kept in run_record.json: summary, decisions, or full.
    #[arg(long, value_name = "LEVEL")]
    record_level: Option<String>,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Technology to explain (default: the first scenario).
    #[arg(long, value_name = "NAME")]
    technology: Option<String>,

    /// Trial index within the campaign.
    #[arg(long, value_name = "N")]
    trial: usize,

    /// UE index within the trial.
    #[arg(long, value_name = "N")]
    ue: usize,
}

fn resolve(common: &CommonArgs) -> anyhow::Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if !common.scenario.is_empty() {
        config.scenarios = common
            .scenario
            .iter()
            .map(|name| ScenarioSpec::Name(name.clone()))
            .collect();
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(parallelism) = common.parallelism {
        config.parallelism = parallelism;
    }
    Ok(config)
}

fn echo_resolved(config: &RunConfig) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string(config)?);
    Ok(())
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<()> {
    let mut config = resolve(&args.common)?;
    if let Some(out) = &args.out {
        config.output_dir = out.to_string_lossy().into_owned();
    }
    if let Some(level) = &args.record_level {
        config.record_level = level.parse()?;
    }
    config.validate()?;
    echo_resolved(&config)?;

    let outputs = run(&config)?;
    let result = &outputs.record.campaign;
    for tech in &result.technologies {
        println!(
            "{}: {} trials ({} skipped) | uplink SAR {:.6e} W/kg (95% CI ±{:.3e}) | downlink SAR {:.6e} W/kg (95% CI ±{:.3e})",
            tech.technology,
            tech.trials_run,
            tech.trials_skipped,
            tech.uplink.mean_sar_w_kg,
            tech.uplink.sar_ci95_half_width_w_kg,
            tech.downlink.mean_sar_w_kg,
            tech.downlink.sar_ci95_half_width_w_kg,
        );
    }
    for (direction, rows) in [
        ("uplink", &outputs.record.comparison.uplink),
        ("downlink", &outputs.record.comparison.downlink),
    ] {
        let ranking: Vec<&str> = rows.iter().map(|r| r.technology.as_str()).collect();
        println!("{direction} ranking by mean SAR: {}", ranking.join(" > "));
    }
    println!("wrote {}", outputs.summary_csv_path.display());
    println!("wrote {}", outputs.figure1_csv_path.display());
    println!("wrote {}", outputs.run_record_path.display());
    Ok(())
}

fn cmd_explain(args: &ExplainArgs) -> anyhow::Result<()> {
    let config = resolve(&args.common)?;
    config.validate()?;
    echo_resolved(&config)?;
    let report = explain_report(&config, args.technology.as_deref(), args.trial, args.ue)?;
    print!("{}", render_explain(&report));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Explain(args) => cmd_explain(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
