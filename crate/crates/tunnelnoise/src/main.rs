use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tunnelnoise::commands;
use tunnelnoise::tables::Observable;
use tunnelnoise::{AppError, Config};

/// Two-electron scattering off an oscillating double barrier.
#[derive(Debug, Parser)]
#[command(name = "tunnelnoise", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for `sweep`; overrides `sweep.workers`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Observable for `heatmap`: S or I2.
    #[arg(long, global = true, default_value = "S")]
    observable: String,
    /// Refuse to run if the configuration asks for any randomness. No part of
    /// the computation draws random numbers, so this always succeeds.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One (energy, frequency) cell.
    Single,
    /// Energy × frequency grid with heatmaps and ridge report.
    Sweep,
    /// Static transfer-matrix transmission and resonances.
    Spectrum,
    /// Predicted ridge frequency at the sweep energies.
    Ridge,
    /// Rebuild a heatmap from `<out>/records.csv`.
    Heatmap,
}

fn run(cli: &Cli) -> Result<Vec<String>, AppError> {
    let cfg = match &cli.config {
        Some(path) => Some(Config::load(path)?),
        None => None,
    };
    if matches!(cli.command, Command::Heatmap) {
        let observable: Observable = cli.observable.parse()?;
        return commands::heatmap(cfg.as_ref(), observable, &cli.out);
    }
    let cfg = cfg.unwrap_or_default();
    match cli.command {
        Command::Single => commands::single(&cfg, &cli.out),
        Command::Sweep => {
            let workers = cli.workers.unwrap_or(cfg.sweep.workers);
            if workers == 0 {
                return Err(AppError::Config("--workers must be positive".into()));
            }
            commands::sweep(&cfg, workers, &cli.out)
        }
        Command::Spectrum => commands::spectrum(&cfg, &cli.out),
        Command::Ridge => commands::ridge(&cfg, &cli.out),
        Command::Heatmap => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
