use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ionx::config::{ModeKind, RunConfig};
use ionx::netlist::export_netlist;
use ionx::scenario::{preset, run_scenario};
use ionx::solver::MembraneModel;
use ionx::Error;

#[derive(Parser)]
#[command(name = "ionx", version, about = "Membrane ion transmitter simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. --set drive=step(3)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Potentiostatic,
    Galvanostatic,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write its CSVs and manifest
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Export the network netlist linearized at equilibrium
    Netlist {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the compartment grid
    Grid {
        /// Write the grid as CSV to stdout
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn configure(mut cfg: RunConfig, o: &Overrides) -> ionx::Result<RunConfig> {
    if let Some(path) = &o.config {
        cfg.apply_file(path)?;
    }
    for a in &o.set {
        cfg.apply(a)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> ionx::Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            overrides,
        } => {
            let cfg = configure(preset(&scenario)?, &overrides)?;
            for path in run_scenario(&scenario, &cfg, &out)? {
                println!("{}", path.display());
            }
        }
        Command::Netlist { mode, out, overrides } => {
            let mut cfg = configure(RunConfig::default(), &overrides)?;
            cfg.mode = match mode {
                Mode::Potentiostatic => ModeKind::Potentiostatic,
                Mode::Galvanostatic => ModeKind::Galvanostatic,
            };
            cfg.validate()?;
            let grid = cfg.build_grid()?;
            let model = MembraneModel::new(cfg.system.clone(), grid.clone())?;
            let eq = model.equilibrium(&cfg.settings)?;
            let text = export_netlist(&cfg.system, &grid, &eq, &cfg.drive_mode(cfg.drive.clone()))?;
            std::fs::write(&out, text)?;
        }
        Command::Grid { dump, overrides } => {
            let cfg = configure(RunConfig::default(), &overrides)?;
            let grid = cfg.build_grid()?;
            if dump {
                print!("{}", grid.to_csv());
            } else {
                let r = grid.membrane_range();
                println!(
                    "{} compartments, total width {}, membrane {}..={} ({} wide)",
                    grid.len(),
                    grid.total_width(),
                    r.start + 1,
                    r.end,
                    grid.membrane_thickness()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ionx: {e}");
            match e {
                Error::Parse(_) | Error::InvalidParameter { .. } | Error::UnknownScenario { .. } => ExitCode::from(2),
                e if e.is_solver_failure() => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
