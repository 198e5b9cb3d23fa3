use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use skt_holonomy::cli::{run, Command, RunConfig, RunOptions};

/// Exact Bismut holonomy and submersion certificates for Samelson SKT
/// structures on compact semisimple Lie groups.
#[derive(Parser, Debug)]
#[command(name = "skt-holonomy", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Report path; overrides `output.path`. Without either, prints to stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Refuse algebras of larger dimension.
    #[arg(long, default_value_t = 64)]
    max_dim: usize,

    /// Also certify bypassed splits with I outside I_max.
    #[arg(long)]
    negative_controls: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let opts = RunOptions {
        command: cli.command,
        max_dim: cli.max_dim,
        negative_controls: cli.negative_controls,
    };
    let outcome = RunConfig::from_path(&cli.config)
        .map_err(Into::into)
        .and_then(|cfg| run(&cfg, &opts).map(|r| (cfg, r)));
    let (cfg, report) = match outcome {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = report.to_json();
    match cli.out.or(cfg.output) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{json}"),
    }
    for c in report.identities.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} (max defect {})", c.name, c.max_defect);
    }
    if !report.passed {
        eprintln!("some checks failed; see the report");
    }
    ExitCode::from(report.exit_code() as u8)
}
