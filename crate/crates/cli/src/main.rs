//! `relecho`: run echo-dynamics scenarios from TOML files and export CSV.

mod config;
mod error;
mod output;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::Scenario;
use error::CliError;
use output::{Manifest, Outputs};

#[derive(Debug, Parser)]
#[command(name = "relecho", version, about = "Fidelity decay of relativistic Landau electrons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (may also be given positionally).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized initial states.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Treat warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolution, perturbative prediction and quadratic fit.
    Run { path: Option<PathBuf> },
    /// Check a scenario without running it.
    Validate { path: Option<PathBuf> },
    /// Landau energies with their degenerate angular momenta.
    Spectrum { path: Option<PathBuf> },
    /// Fidelity series by the configured methods.
    Evolve { path: Option<PathBuf> },
    /// Correlation coefficient, predicted series and boost checks.
    Perturbative { path: Option<PathBuf> },
    /// One-dimensional Klein-Gordon echo.
    Kg { path: Option<PathBuf> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::Validate { .. } => "validate",
            Command::Spectrum { .. } => "spectrum",
            Command::Evolve { .. } => "evolve",
            Command::Perturbative { .. } => "perturbative",
            Command::Kg { .. } => "kg",
        }
    }

    fn path(&self) -> Option<&PathBuf> {
        match self {
            Command::Run { path }
            | Command::Validate { path }
            | Command::Spectrum { path }
            | Command::Evolve { path }
            | Command::Perturbative { path }
            | Command::Kg { path } => path.as_ref(),
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let path = cli
        .command
        .path()
        .or(cli.config.as_ref())
        .ok_or_else(|| CliError::Validation("no scenario file given (positional or --config)".into()))?;
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Validation("config is not UTF-8".into()))?;
    let scenario = Scenario::parse(&text)?;
    scenario.validate()?;

    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--threads: {e}")))?;
    }

    let outputs = match &cli.command {
        Command::Validate { .. } => {
            println!("{}: ok", path.display());
            return Ok(());
        }
        Command::Run { .. } => pipeline::run(&scenario, cli.seed)?,
        Command::Spectrum { .. } => pipeline::spectrum(&scenario)?,
        Command::Evolve { .. } => pipeline::evolve(&scenario, cli.seed)?,
        Command::Perturbative { .. } => pipeline::perturbative(&scenario, cli.seed)?,
        Command::Kg { .. } => pipeline::kg(&scenario)?,
    };
    for w in &outputs.warnings {
        eprintln!("warning: {}", w.message);
    }
    if cli.strict {
        if let Some(w) = outputs.warnings.first() {
            return Err(if w.numerical {
                CliError::Numerical(w.message.clone())
            } else {
                CliError::Validation(w.message.clone())
            });
        }
    }
    finish(cli, &scenario, path, &bytes, outputs, start)
}

fn finish(
    cli: &Cli,
    scenario: &Scenario,
    path: &std::path::Path,
    bytes: &[u8],
    mut outputs: Outputs,
    start: Instant,
) -> Result<(), CliError> {
    let manifest = Manifest {
        command: cli.command.name(),
        scenario: scenario.name.as_deref().unwrap_or(""),
        config_path: &path.display().to_string(),
        config_bytes: bytes,
        seed: cli.seed,
        threads: cli.threads.unwrap_or_else(rayon::current_num_threads),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: &outputs,
    }
    .render();
    outputs.add("manifest.txt", manifest);
    outputs.write_all(&cli.out)?;
    for (name, _) in &outputs.files {
        println!("{}", cli.out.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relecho: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
