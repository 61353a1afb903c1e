//! Command-line front end: classical AGP optimization, VQE sweeps over
//! G/G_c grids, exact-diagonalization references, and circuit dumps.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use agpq::error::AgpqError;
use agpq::experiment::{
    dump_circuit, exact_csv, optimize_agp_csv, parse_mode, run_sweep, sweep_csv, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "agpq", about = "Projected-BCS pairing experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the estimator mode from the config.
    #[arg(long)]
    mode: Option<String>,
    /// Override shots per measured term.
    #[arg(long)]
    shots: Option<usize>,
    /// Override the base random seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the geminal coefficients classically at each grid point.
    OptimizeAgp(Common),
    /// Run the full AGP + VQE + ED sweep and emit CSV plus a JSON summary.
    Sweep(Common),
    /// Emit the exact-diagonalization reference table.
    Exact(Common),
    /// Serialize the configured circuit family to the line-per-gate format.
    DumpCircuit(Common),
}

const EXIT_CONFIG: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;

fn load_config(common: &Common) -> Result<ExperimentConfig, AgpqError> {
    let text = std::fs::read_to_string(&common.config)?;
    let mut config = ExperimentConfig::parse(&text)?;
    if let Some(mode) = &common.mode {
        config.estimator.mode = parse_mode(mode)?;
    }
    if let Some(shots) = common.shots {
        config.estimator.shots_per_term = shots;
    }
    if let Some(seed) = common.seed {
        config.estimator.seed = seed;
    }
    Ok(config)
}

fn emit(common: &Common, content: &str) -> Result<(), AgpqError> {
    match &common.out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), AgpqError> {
    let common = match &cli.command {
        Command::OptimizeAgp(c) | Command::Sweep(c) | Command::Exact(c) | Command::DumpCircuit(c) => c,
    };
    let config = load_config(common)?;
    match &cli.command {
        Command::OptimizeAgp(_) => emit(common, &optimize_agp_csv(&config)?),
        Command::Exact(_) => emit(common, &exact_csv(&config)?),
        Command::DumpCircuit(_) => emit(common, &dump_circuit(&config)?.to_text()),
        Command::Sweep(_) => {
            let (rows, summary) = run_sweep(&config)?;
            if !rows.is_empty() && summary.failed_rows == rows.len() {
                eprintln!("error: every grid point failed to converge");
                return Err(AgpqError::ConvergenceFailure("all rows failed".into()));
            }
            emit(common, &sweep_csv(&rows))?;
            let json = serde_json::to_string_pretty(&summary)
                .map_err(|e| AgpqError::InvalidArgument(e.to_string()))?;
            match &common.out {
                Some(path) => {
                    let mut summary_path = path.clone();
                    summary_path.set_extension("summary.json");
                    std::fs::write(summary_path, json)?;
                }
                None => eprintln!("{json}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                AgpqError::Config(_) | AgpqError::InvalidArgument(_) => {
                    ExitCode::from(EXIT_CONFIG)
                }
                AgpqError::ConvergenceFailure(_) => ExitCode::from(EXIT_CONVERGENCE),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
