use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use goose_core::harness::{emit_csv, read_config, run_experiment_with, write_timing_csv, ExperimentConfig};
use goose_core::par::Parallelism;
use goose_core::GooseError;

/// Goal-oriented safe exploration experiments.
#[derive(Parser)]
#[command(name = "goose", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV metrics.
    Run(RunArgs),
    /// Run an experiment in parallel and sequentially and report wall times.
    Bench(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file (`key = value` lines).
    config: PathBuf,
    /// Exit with status 1 if any run evaluated an unsafe decision.
    #[arg(long)]
    strict: bool,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the number of seeds.
    #[arg(long)]
    seeds: Option<usize>,
    /// Use the full-scale seed counts and world sizes.
    #[arg(long)]
    full_scale: bool,
}

const EXIT_UNSAFE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn load(args: &RunArgs) -> Result<ExperimentConfig, GooseError> {
    let mut cfg = read_config(&args.config)?;
    if args.full_scale {
        cfg.full_scale();
    }
    if let Some(n) = args.seeds {
        cfg.seeds = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cfg: &ExperimentConfig, args: &RunArgs, bench: bool) -> Result<ExitCode, GooseError> {
    let started = Instant::now();
    let report = run_experiment_with(cfg, Parallelism::Auto)?;
    let parallel_time = started.elapsed();
    let files = emit_csv(&report, &args.out)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    if bench {
        let started = Instant::now();
        let sequential = run_experiment_with(cfg, Parallelism::Sequential)?;
        let sequential_time = started.elapsed();
        if sequential.runs.len() != report.runs.len() {
            return Err(GooseError::Numerical("sequential and parallel runs disagree".into()));
        }
        let path = write_timing_csv(&report, &args.out)?;
        println!("wrote {}", path.display());
        println!(
            "parallel {:.3}s, sequential {:.3}s, speedup {:.2}x",
            parallel_time.as_secs_f64(),
            sequential_time.as_secs_f64(),
            sequential_time.as_secs_f64() / parallel_time.as_secs_f64().max(1e-9)
        );
    }
    summarize(&report, &args.out);
    let violations = report.violation_count();
    if violations > 0 {
        eprintln!("{violations} unsafe evaluations");
        if args.strict {
            return Ok(ExitCode::from(EXIT_UNSAFE));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn summarize(report: &goose_core::harness::MetricsReport, out: &Path) {
    let runs = report.runs.len();
    let unsafe_runs = report.runs.iter().filter(|r| r.violations > 0).count();
    println!("{runs} runs, {unsafe_runs} with violations, output in {}", out.display());
    for (alg, size, ratio) in report.samples_ratio() {
        if let Some(r) = ratio {
            println!("{alg} size {size}: samples-to-first-path ratio vs smdp {r:.3}");
        }
    }
    let summary = report.regret_summary();
    for &alg in &report.algorithms {
        if let Some((_, step, mean, se)) = summary.iter().filter(|s| s.0 == alg).last() {
            println!("{alg}: running-average regret at step {step} {mean:.4} ± {se:.4}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (args, bench) = match &cli.command {
        Command::Run(a) => (a, false),
        Command::Bench(a) => (a, true),
    };
    let cfg = match load(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cfg, args, bench) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
