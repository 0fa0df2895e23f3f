use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ppsm_cli::scenario::{self, parse_list, Modulation, Scenario};
use ppsm_cli::table::write_replications;
use ppsm_cli::{run_curve, run_estimate, CliError, CurveKind, Mode, Result};

/// Curves and estimation runs for modulated pre/post-selected measurements.
///
/// Scenario precedence: defaults, then --preset, then the --scenario file
/// (a `preset` line in the file replaces the base), then individual flags.
#[derive(Parser)]
#[command(name = "ppsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a curve over the coupling grid and write CSV.
    Curve {
        /// One of shift, sensitivity, cfi, psel, fd.
        #[arg(long, default_value = "shift")]
        kind: String,
        #[command(flatten)]
        common: Common,
    },
    /// Single-stage maximum-likelihood estimation.
    Estimate {
        #[command(flatten)]
        common: Common,
    },
    /// Three-stage modulated estimation.
    Adaptive {
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in scenarios.
    Presets,
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Built-in starting scenario.
    #[arg(long)]
    preset: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated post-selection angles.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g_max: Option<f64>,
    #[arg(long)]
    g_steps: Option<usize>,
    /// Modulation value or `auto`.
    #[arg(long, allow_hyphen_values = true)]
    g_mod: Option<String>,
    #[arg(long)]
    n_total: Option<u64>,
    #[arg(long)]
    replications: Option<u64>,
    /// Coupling simulated by the estimation commands.
    #[arg(long, allow_hyphen_values = true)]
    g_true: Option<f64>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    phi_final: Option<f64>,
    /// Tie the angle to the coupling, `phi = 2 q0 g'`.
    #[arg(long)]
    lock_phi: bool,
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let mut s = match &self.preset {
            Some(name) => scenario::preset(name)
                .ok_or_else(|| CliError::Validation(format!("unknown preset '{name}'")))?,
            None => Scenario::default(),
        };
        if let Some(path) = &self.scenario {
            s = Scenario::from_file(s, path)?;
        }
        let flag = |e: String| CliError::Validation(e);
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = &self.phi {
            s.phis = parse_list(v).map_err(flag)?;
        }
        if let Some(v) = self.g_min {
            s.g_min = v;
        }
        if let Some(v) = self.g_max {
            s.g_max = v;
        }
        if let Some(v) = self.g_steps {
            s.g_steps = v;
        }
        if let Some(v) = &self.g_mod {
            s.g_mod = v.parse::<Modulation>().map_err(flag)?;
        }
        if let Some(v) = self.n_total {
            s.n_total = v;
        }
        if let Some(v) = self.replications {
            s.replications = v;
        }
        if let Some(v) = self.g_true {
            s.g_true = v;
        }
        if let Some(v) = &self.case {
            s.case = v.parse().map_err(|e: ppsm_core::Error| flag(e.to_string()))?;
        }
        if let Some(v) = self.phi_final {
            s.phi_final = v;
        }
        if self.lock_phi {
            s.lock_phi = true;
        }
        s.validate()?;
        Ok(s)
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn estimate(common: &Common, mode: Mode) -> Result<()> {
    let s = common.scenario()?;
    let run = run_estimate(&s, mode)?;
    write_replications(&run.rows(s.replications), common.output()?)?;
    eprint!("{}", run.report());
    match run.first_failure() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Curve { kind, common } => {
            let kind: CurveKind = kind.parse()?;
            let table = run_curve(&common.scenario()?, kind)?;
            table.write_csv(common.output()?)
        }
        Command::Estimate { common } => estimate(&common, Mode::Single),
        Command::Adaptive { common } => estimate(&common, Mode::Adaptive),
        Command::Presets => {
            for p in &scenario::PRESETS {
                println!("{:<16} {}", p.name, p.description);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
