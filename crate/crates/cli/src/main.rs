//! Command-line front end: load a scenario file, dispatch to the analysis
//! library, and emit a deterministic machine-readable report on stdout (or
//! to --out). Wall time and progress go to stderr only, so report bytes are
//! identical across runs of the same input and version.

mod run;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use run::{execute, run_sweep, RunFlags};
use scenario::{Report, Scenario, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "kisin",
    version,
    about = "Exact-arithmetic analysis of torsion Kisin module combinatorics",
    long_about = "Runs scenario files (model enumeration, condition gates, extension \
dimensions, shape verification, swap reachability) and registered verification sweeps. \
Exit codes: 0 success, 1 error, 2 property-violation findings."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario file and print its report.
    Run(RunArgs),
    /// Run a registered verification profile and print the aggregate report.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Override the scenario's parameter block with a params file.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized tasks; echoed in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base truncation order for extension-dimension certificates
    /// (defaults to the parameter block's N).
    #[arg(long)]
    precision_step: Option<usize>,
    /// Case budget for exhaustive verification tasks.
    #[arg(long, default_value_t = 200_000_000)]
    budget: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Suite profile: "desk" (all registered suites), "none", or
    /// "selftest-fail".
    #[arg(long, default_value = "desk")]
    profile: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized suites; echoed in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-suite case budget; exceeding it marks a suite inconclusive.
    #[arg(long, default_value_t = 200_000_000)]
    budget: u64,
}

fn emit(report_text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, report_text)
            .with_context(|| format!("cannot write report to {}", path.display()))?,
        None => print!("{report_text}"),
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<bool> {
    let started = Instant::now();
    let text = std::fs::read_to_string(&args.scenario)
        .with_context(|| format!("cannot read scenario {}", args.scenario.display()))?;
    let mut scenario = Scenario::from_str(&text)
        .with_context(|| format!("in scenario {}", args.scenario.display()))?;
    if let Some(params_path) = &args.params {
        let ptext = std::fs::read_to_string(params_path)
            .with_context(|| format!("cannot read params {}", params_path.display()))?;
        scenario.params = serde_json::from_str(&ptext)
            .with_context(|| format!("in params {}", params_path.display()))?;
    }
    let flags = RunFlags {
        seed: args.seed,
        budget: args.budget,
        precision_step: args.precision_step,
    };
    let output = execute(&scenario, &flags)?;
    emit(&output.report.render(), args.out.as_ref())?;
    eprintln!(
        "kisin run {}: task {} finished in {:.1} ms",
        args.scenario.display(),
        scenario.task,
        started.elapsed().as_secs_f64() * 1e3
    );
    Ok(output.findings)
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<bool> {
    let started = Instant::now();
    let flags = RunFlags { seed: args.seed, budget: args.budget, precision_step: None };
    let (results, failed) = run_sweep(&args.profile, &flags)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: "kisin",
        version: env!("CARGO_PKG_VERSION"),
        task: "sweep".to_string(),
        seed: args.seed,
        params: None,
        results,
    };
    emit(&report.render(), args.out.as_ref())?;
    eprintln!(
        "kisin sweep --profile {}: finished in {:.1} s",
        args.profile,
        started.elapsed().as_secs_f64()
    );
    Ok(failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
