use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jcl_core::error::{ConfigError, Error};
use jcl_core::sweep::{self, RunConfig};

/// Ground-state preparation in Jaynes-Cummings lattices.
#[derive(Parser, Debug)]
#[command(name = "jcl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key = value run configuration; defaults apply to missing keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for grid sweeps
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Continue an interrupted phase-diagram run in --out
    #[arg(long, global = true)]
    resume: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
enum Command {
    /// Basis listing or COO operator dump (`dump` key)
    Basis,
    /// Lowest levels at the `g`, `J`, `Delta` point
    Spectrum,
    /// Symmetric gap along the configured trajectory
    GapScan,
    /// Single ramp with checkpoint observables
    Ramp,
    /// Fidelity against the hopping ramping index
    RjSweep,
    /// Fidelity over target hopping and detuning
    PhaseDiagram,
    /// Single-particle density matrix over hopping and detuning
    Rho1Map,
    /// Initialization pulse segment table
    InitPulse,
    /// Pointwise maximum of phase-diagram CSVs
    CombineMax {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Error> {
    Ok(match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::from_text("")?,
    })
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|source| ConfigError::Io { path: p.display().to_string(), source })?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError::Invalid { key: "--threads".into(), message: "must be at least 1".into() }.into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError::Invalid { key: "--threads".into(), message: e.to_string() })?;
    }
    if cli.resume && (cli.command != Command::PhaseDiagram || cli.out.is_none()) {
        return Err(ConfigError::Invalid {
            key: "--resume".into(),
            message: "only phase-diagram with --out can resume".into(),
        }
        .into());
    }

    if let Command::CombineMax { inputs } = &cli.command {
        let mut out = open_out(cli.out.as_deref())?;
        let combined = sweep::run_combine_max(inputs, &mut out)?;
        out.flush()?;
        eprintln!("combined {} grids over {} points", combined.sources.len(), combined.grid.len());
        return Ok(());
    }

    let cfg = load_config(cli.config.as_deref())?;
    if cli.command == Command::PhaseDiagram {
        if let Some(path) = &cli.out {
            let grid = sweep::run_phase_diagram(&cfg, path, cli.resume)?;
            eprintln!("wrote {} points to {}", grid.len(), path.display());
            return Ok(());
        }
        let grid = sweep::phase_diagram(&cfg)?;
        let mut out = open_out(None)?;
        grid.write_csv(&mut out)?;
        out.flush()?;
        return Ok(());
    }

    let mut out = open_out(cli.out.as_deref())?;
    match &cli.command {
        Command::Basis => sweep::run_basis(&cfg, &mut out)?,
        Command::Spectrum => sweep::run_spectrum(&cfg, &mut out)?,
        Command::GapScan => {
            let scan = sweep::run_gap_scan(&cfg, &mut out)?;
            let m = scan.minimum;
            eprintln!(
                "gap minimum {:.6} at g={:.6} J={:.6} Delta={:.6}",
                m.gap, m.params.coupling, m.params.hopping, m.params.detuning
            );
        }
        Command::Ramp => {
            let s = sweep::run_ramp(&cfg, &mut out)?;
            eprintln!("F = {:.8} (norm drift {:.3e}, {} steps)", s.fidelity, s.norm_drift, s.step_count);
        }
        Command::RjSweep => {
            let s = sweep::run_rj_sweep(&cfg, &mut out)?;
            eprintln!("best rJ = {}", s.argmax);
        }
        Command::Rho1Map => {
            sweep::run_rho1_map(&cfg, &mut out)?;
        }
        Command::InitPulse => {
            let s = sweep::run_init_pulse(&cfg, &mut out)?;
            if !s.valid {
                eprintln!("warning: drive strengths violate the weak-drive conditions");
            }
        }
        Command::PhaseDiagram | Command::CombineMax { .. } => unreachable!(),
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
