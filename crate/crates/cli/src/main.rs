use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand as ClapSubcommand};
use nflattice::experiment::{run, ExperimentConfig, Subcommand};
use nflattice::numberfield::{builtin_catalog, load_catalog};

/// Number-field lattice codes: invariants, rate tables, bounds and Monte Carlo runs.
#[derive(Parser, Debug)]
#[command(name = "nflattice", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand, Debug)]
enum Command {
    /// Volume, shortest vector and product distance of each field lattice
    Invariants(Flags),
    /// Achievable-rate tables over the SNR grid for all four channel models
    Rates(Flags),
    /// Asymptotic gap constants
    Bounds(Flags),
    /// Monte Carlo block error rates
    Simulate(Flags),
    /// min(I) and product distances of catalog ideals
    Ideal(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// Catalog field name, e.g. "K4(725)"
    #[arg(long)]
    field: Option<String>,
    /// Code rate in bits per channel use
    #[arg(long)]
    rate: Option<String>,
    /// SNR grid in dB: "10,14,18" or "start:stop:step"
    #[arg(long)]
    snr: Option<String>,
    /// Trials per SNR point
    #[arg(long)]
    trials: Option<String>,
    /// Master seed
    #[arg(long)]
    seed: Option<String>,
    /// nld, ml or both
    #[arg(long)]
    decoder: Option<String>,
    /// awgn_real, awgn_complex, rayleigh_real or rayleigh_complex
    #[arg(long)]
    model: Option<String>,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<String>,
    /// key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field catalog (built-in if omitted)
    #[arg(long)]
    catalog: Option<String>,
    /// Worker threads for simulation
    #[arg(long)]
    workers: Option<String>,
}

impl Flags {
    fn pairs(&self) -> [(&'static str, &Option<String>); 10] {
        [
            ("field", &self.field),
            ("rate", &self.rate),
            ("snr", &self.snr),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("decoder", &self.decoder),
            ("model", &self.model),
            ("out", &self.out),
            ("catalog", &self.catalog),
            ("workers", &self.workers),
        ]
    }
}

fn configure(command: Command) -> Result<ExperimentConfig> {
    let (sub, flags) = match command {
        Command::Invariants(f) => (Subcommand::Invariants, f),
        Command::Rates(f) => (Subcommand::Rates, f),
        Command::Bounds(f) => (Subcommand::Bounds, f),
        Command::Simulate(f) => (Subcommand::Simulate, f),
        Command::Ideal(f) => (Subcommand::Ideal, f),
    };
    let mut config = ExperimentConfig::new(sub);
    if let Some(path) = &flags.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        config.apply_file_text(&text).with_context(|| format!("in {}", path.display()))?;
        config.subcommand = sub;
    }
    for (key, value) in flags.pairs() {
        if let Some(v) = value {
            config.set(key, v).with_context(|| format!("--{key}"))?;
        }
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let config = configure(cli.command)?;
    let catalog = match &config.catalog {
        Some(path) => load_catalog(path).with_context(|| format!("loading catalog {}", path.display()))?,
        None => builtin_catalog(),
    };
    let csv = run(&config, &catalog)?;
    match &config.output {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(())
}
