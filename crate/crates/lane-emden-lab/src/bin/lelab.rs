//! Thin batch CLI over [`lane_emden_lab::runner`]; the library and its
//! examples are the primary interface.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lane_emden_lab::runner;

#[derive(Parser)]
#[command(name = "lelab", version, about = "Batch runner for the Lane-Emden laboratory")]
struct Cli {
    /// Worker threads for independent sweep entries.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Log verbosity (RUST_LOG overrides).
    #[arg(long, value_enum, default_value_t = LogLevel::Info)]
    log: LogLevel,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogLevel {
    Info,
    Debug,
}

#[derive(Subcommand)]
enum Command {
    /// Follow one branch described by a JSON config.
    Run { config: PathBuf },
    /// Execute the sweep axis of a JSON config (h_list or p_list).
    Sweep { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(match cli.log {
        LogLevel::Info => "info",
        LogLevel::Debug => "debug",
    }))
    .init();

    let outcome = match &cli.command {
        Command::Run { config } => runner::load_config(config).and_then(|c| runner::run(&c)),
        Command::Sweep { config } => {
            runner::load_config(config).and_then(|c| runner::sweep(&c, cli.jobs as usize))
        }
    };
    match outcome {
        Ok(art) => {
            log::info!("{} summary rows under {}", art.rows.len(), art.dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
