//! Command-line front end for the SFG simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sfgsim::experiment::{
    run_pdc, run_schmidt, run_single, run_sweep, write_sweep, Probe, RunConfig, SweepSpec,
    SweepVariable,
};

#[derive(Parser, Debug)]
#[command(
    name = "sfgsim",
    version,
    about = "Sum-frequency generation of broadband bright squeezed vacuum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// PDC spectrum, Schmidt number and bandwidth.
    Pdc(Common),
    /// Full pipeline: PDC, chirp, SFG spectrum and width analysis.
    Sfg(Common),
    /// Sweep one parameter and tabulate the results.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        variable: Variable,
        /// First value (mm, degrees or fs depending on the variable).
        #[arg(long, allow_negative_numbers = true)]
        start: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Report the SFG signal at this sum wavelength instead of full spectra.
        #[arg(long)]
        probe_nm: Option<f64>,
    },
    /// Dump Schmidt eigenvalues, gains and mode functions.
    Schmidt(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file; the bundled reference configuration when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted override, e.g. `--set sfg.z0_mm=0.5`. An empty value removes the key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Do not apply the wavelength^-4 detection correction.
    #[arg(long)]
    no_correction: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Variable {
    Z0,
    Alpha,
    PumpDuration,
}

impl From<Variable> for SweepVariable {
    fn from(v: Variable) -> Self {
        match v {
            Variable::Z0 => SweepVariable::Z0,
            Variable::Alpha => SweepVariable::Alpha,
            Variable::PumpDuration => SweepVariable::PumpDuration,
        }
    }
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let mut overrides = common.overrides.clone();
    if common.no_correction {
        overrides.push("output.lambda_correction=false".into());
    }
    let config = match &common.config {
        Some(path) => RunConfig::load(path, &overrides)?,
        None => RunConfig::from_toml_str(RunConfig::reference_text(), &overrides)?,
    };
    let out = common.out.clone().unwrap_or_else(|| config.output_dir());
    Ok((config, out))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Pdc(c) => {
            let (config, out) = load(&c)?;
            Ok(run_pdc(&config, &out)?.paths)
        }
        Command::Schmidt(c) => {
            let (config, out) = load(&c)?;
            Ok(run_schmidt(&config, &out)?.paths)
        }
        Command::Sfg(c) => {
            let (config, out) = load(&c)?;
            Ok(run_single(&config, &out)?.paths)
        }
        Command::Sweep {
            common,
            variable,
            start,
            stop,
            steps,
            probe_nm,
        } => {
            let (config, out) = load(&common)?;
            let variable = SweepVariable::from(variable);
            let spec = match (start, stop, variable) {
                (None, None, SweepVariable::Alpha) => {
                    let d = SweepSpec::default_alpha();
                    SweepSpec::new(d.variable, d.start, d.stop, steps.unwrap_or(d.steps))?
                }
                (Some(a), Some(b), v) => SweepSpec::new(v, a, b, steps.unwrap_or(11))?,
                _ => {
                    return Err(sfgsim::Error::Validation {
                        field: "sweep.start".into(),
                        reason: "give both --start and --stop".into(),
                    }
                    .into())
                }
            };
            let probe = match probe_nm {
                Some(wavelength_nm) => Probe::ValueAt { wavelength_nm },
                None => Probe::FullSpectrum,
            };
            let rows = run_sweep(&config, &spec, &probe)?;
            write_sweep(&out, &config, &spec, &probe, &rows).context("writing sweep table")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let core = err.chain().find_map(|e| e.downcast_ref::<sfgsim::Error>());
            let (kind, code) = match core {
                Some(e) if e.is_config_error() => (e.kind(), 2),
                Some(e) => (e.kind(), 3),
                None => ("Other", 3),
            };
            let record = serde_json::json!({
                "error": kind,
                "message": format!("{err:#}"),
                "exit_code": code,
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}
