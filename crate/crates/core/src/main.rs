use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deformflow::cli::{
    cmd_audit, cmd_cv, cmd_energy, cmd_flow, cmd_invariants, CliError, CliResult, InitialProfile, RunManifest,
};
use deformflow::config::RunConfig;

#[derive(Parser)]
#[command(version, about = "Deformation function, relaxation flows, energies and curvature invariants")]
struct Cli {
    /// Flat key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed recorded in the output metadata
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate model, exact and first-order C over a speed range
    Cv {
        #[arg(long, default_value_t = 0.0)]
        beta_min: f64,
        #[arg(long, default_value_t = 1.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 11)]
        n: usize,
    },
    /// Integrate C(beta, tau) and write the trajectory
    Flow {
        /// Final flow time
        #[arg(long)]
        tau_end: f64,
        /// Snapshot spacing [default: tau_end / 10]
        #[arg(long)]
        snapshot_every: Option<f64>,
        /// static | uniform:<x> | file:<path>
        #[arg(long, default_value = "static")]
        initial: String,
    },
    /// Energy trace of a trajectory written by `flow`
    Energy {
        trajectory: PathBuf,
        /// Overrides the alpha recorded in the trajectory
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Invariant triple of the metric C * g0
    Invariants {
        #[arg(long = "c-value")]
        c_value: f64,
        #[arg(long, default_value_t = 6.0)]
        r0: f64,
        #[arg(long, default_value_t = 2.0 * PI * PI)]
        vol0: f64,
    },
    /// Recompute printed reference values and report deviations
    Audit {
        #[arg(long)]
        csv: bool,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::validation(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let config = || -> CliResult<RunConfig> {
        Ok(match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        })
    };
    let manifest = |name: &str| RunManifest {
        command: name.to_string(),
        config_path: cli.config.clone(),
        output_path: cli.out.clone(),
        seed: cli.seed,
    };
    match &cli.command {
        Command::Cv { beta_min, beta_max, n } => cmd_cv(*beta_min, *beta_max, *n, &mut out)?,
        Command::Flow { tau_end, snapshot_every, initial } => {
            let initial: InitialProfile = initial.parse()?;
            let every = snapshot_every.unwrap_or(tau_end / 10.0);
            cmd_flow(&manifest("flow"), &config()?, *tau_end, every, &initial, &mut out)?;
        }
        Command::Energy { trajectory, alpha } => {
            let text = std::fs::read_to_string(trajectory)
                .map_err(|e| CliError::validation(format!("cannot read {}: {e}", trajectory.display())))?;
            cmd_energy(&manifest("energy"), &text, *alpha, &mut out)?;
        }
        Command::Invariants { c_value, r0, vol0 } => cmd_invariants(*c_value, *r0, *vol0, &mut out)?,
        Command::Audit { csv } => {
            cmd_audit(*csv, &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
