use std::path::PathBuf;
use std::process::ExitCode;

use blochball::{commands, templates, CliError};
use clap::{Parser, Subcommand};

/// Controlled, dissipative finite-level quantum systems: trajectories,
/// structural analysis and steady-state sweeps.
#[derive(Debug, Parser)]
#[command(name = "blochball", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate the initial state and write the trajectory table.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sample_dt: Option<f64>,
        /// Validity tolerance for sampled states.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print a structural report: support overlap, Lie algebra dimensions,
    /// spectrum and equilibrium.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rank tolerance for the Lie closures and support test.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Steady states for a range of constant amplitudes on one control,
    /// with the conic through them.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// 1-based control index; overrides the config.
        #[arg(long)]
        control: Option<usize>,
        /// Comma-separated amplitudes; overrides the config.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        amplitudes: Option<Vec<f64>>,
    },
    /// Write a shipped template configuration.
    Template {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(templates::NAMES))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            sample_dt,
            tol,
        } => commands::simulate(&config, out.as_deref(), sample_dt, tol),
        Command::Analyze { config, out, tol } => commands::analyze(&config, out.as_deref(), tol),
        Command::Sweep {
            config,
            out,
            control,
            amplitudes,
        } => commands::sweep(&config, out.as_deref(), control, amplitudes),
        Command::Template { name, out } => {
            let text = templates::by_name(&name).expect("validated by clap").to_json();
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("blochball: {e}");
            e.exit_code()
        }
    }
}
