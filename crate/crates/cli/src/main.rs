use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use coslaw_cli::format::json_line;
use coslaw_cli::{run, CliError, Command, ExperimentConfig, Format};
use serde_json::json;

/// Numerical experiments on cosine families and their zero-two laws.
#[derive(Debug, Parser)]
#[command(name = "coslaw", version)]
struct Args {
    command: Command,
    /// Experiment config (one JSON document).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.path`; the payload goes to stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Writes the full run report (config echo, results, timing) as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("COSLAW_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("COSLAW_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn execute(args: &Args) -> Result<i32, CliError> {
    configure_threads()?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.output.format = Some(format);
    }

    let started = Instant::now();
    let outcome = run(args.command, &cfg)?;
    let elapsed = started.elapsed().as_secs_f64();

    match &cfg.output.path {
        Some(path) => std::fs::write(path, &outcome.payload)?,
        None => std::io::stdout().lock().write_all(outcome.payload.as_bytes())?,
    }
    eprintln!("{}", outcome.summary);
    if let Some(path) = &args.report {
        let report = json!({
            "command": args.command.name(),
            "config": cfg,
            "result": outcome.result,
            "wall_clock_s": elapsed,
            "version": env!("CARGO_PKG_VERSION"),
        });
        std::fs::write(path, json_line(&report) + "\n")?;
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("coslaw {}: {e}", args.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
