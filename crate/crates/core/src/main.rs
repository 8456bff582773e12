use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eagle_tune::harness::{export_mesh, load_config, run_experiment, HarnessError, RunConfig};

#[derive(Parser)]
#[command(name = "eagle-tune", version, about = "Eagle Strategy optimizer and BLDC PID tuning harness")]
struct Cli {
    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    dump_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured optimizer.
    Run {
        config: PathBuf,
        /// Overrides experiment.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides experiment.output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the objective surface described by the [mesh] section.
    Mesh {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.dump_defaults {
        print!("{}", RunConfig::default().to_toml());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (run, mesh) unless --dump-defaults is given");
        return ExitCode::from(2);
    };
    match execute(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.experiment.seed = seed;
            }
            let out = out.unwrap_or_else(|| cfg.experiment.output_dir.clone());
            let summary = run_experiment(&cfg, &out)?;
            println!(
                "{} on {}: best {:e} at {:?} after {} evaluations ({:?})",
                summary.algorithm,
                summary.objective,
                summary.best_value,
                summary.best_position,
                summary.evaluations_used,
                summary.terminated_by
            );
        }
        Command::Mesh { config, out } => {
            let cfg = load_config(&config)?;
            let out = out.unwrap_or_else(|| cfg.experiment.output_dir.clone());
            let grid = export_mesh(&cfg, &out)?;
            println!("wrote {} mesh points to {}", grid.axis1.len() * grid.axis2.len(), out.join("mesh.csv").display());
        }
    }
    Ok(())
}
