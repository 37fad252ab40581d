use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rrsim::config::{load_config, Scenario};
use rrsim::scenario::{exit_code, run_scenario, sweep, write_csv, THEORY_HEADER, WORKERS_ENV};
use rrsim::theory::{summarize, TwoLevelData};
use rrsim::units::ev_to_hartree;
use rrsim::Error;

#[derive(Parser)]
#[command(
    name = "rrsim",
    version,
    about = "Radiation-reaction emitter simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a configuration file.
    Run {
        config: PathBuf,
        /// Output directory (defaults to scenario.output, then out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per value of a sweepable key.
    #[command(after_help = format!("Worker count is read from {WORKERS_ENV}."))]
    Sweep {
        config: PathBuf,
        /// One of inv_area, n_emitters, g_over_omega, n_modes.
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. 1e-3,1e-2,1e-1.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the closed-form two-level table.
    Theory {
        #[arg(long)]
        omega_ev: f64,
        /// Transition dipole in atomic units.
        #[arg(long)]
        dipole_au: f64,
        /// Inverse cross-section in 1/a0^2; repeat or comma-separate for several rows.
        #[arg(long, value_delimiter = ',', required = true)]
        inv_area: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        pol: f64,
        /// Also write theory.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e) as u8,
            error: e.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn output_dir(scenario: &Scenario, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| scenario.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").join(scenario.kind.name()))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out } => {
            let scenario = load_config(&config)?;
            let dir = output_dir(&scenario, out);
            let summary = run_scenario(&scenario, &dir)?;
            print!("{}", summary.to_text(scenario.kind));
            println!("# outputs in {}", dir.display());
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let scenario = load_config(&config)?;
            let dir = output_dir(&scenario, out);
            let rows = sweep(&scenario, &param, &values, &dir)?;
            let mut worst = 0;
            for row in &rows {
                match &row.result {
                    Ok(_) => println!("{param} = {:?}: ok ({})", row.value, row.dir.display()),
                    Err(e) => {
                        worst = worst.max(exit_code(e));
                        println!("{param} = {:?}: failed: {e}", row.value);
                    }
                }
            }
            println!("# merged table in {}", dir.join("sweep.csv").display());
            if worst != 0 {
                return Err(Failure {
                    code: worst as u8,
                    error: anyhow::anyhow!("some sweep points failed"),
                });
            }
        }
        Command::Theory {
            omega_ev,
            dipole_au,
            inv_area,
            pol,
            out,
        } => {
            let mut rows = Vec::new();
            for &a in &inv_area {
                let mut data = TwoLevelData::new(ev_to_hartree(omega_ev), dipole_au, a)?;
                data.pol = pol;
                data.validate()?;
                let t = summarize(&data);
                rows.push(vec![
                    a,
                    t.x,
                    t.pole_re_ev,
                    t.pole_im_ev,
                    t.shift_mev,
                    t.gamma_rr_ev,
                    t.gamma_ww_1d_ev,
                    t.gamma_rr_3d_ev,
                    t.gamma_ww_3d_ev,
                    f64::from(u8::from(t.overdamped)),
                ]);
            }
            println!("{}", THEORY_HEADER.join("\t"));
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.6e}")).collect();
                println!("{}", cells.join("\t"));
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))
                    .map_err(|error| Failure { code: 1, error })?;
                write_csv(&dir.join("theory.csv"), &THEORY_HEADER, rows)?;
            }
        }
    }
    Ok(())
}
