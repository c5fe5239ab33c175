//! Batch driver: every computation of `ortho-mass` as a subcommand, JSON
//! config in, CSV or JSON out.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::{all_degrees, probe_degrees, ExperimentConfig, Overrides, ProbeMode};
use error::CliError;

/// Version of the JSON keys and CSV columns.
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "ortho-mass",
    version,
    about = "Orthogonal polynomials with point masses: kernels, partial sums and norm probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Worker threads; the rayon default when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Recurrence coefficients alpha_k, beta_k for k < n.
    Recurrence,
    /// P_0 .. P_n at the configured points.
    Basis,
    /// L_n(x, y), with the decomposition over subsets of the mass points.
    Kernel,
    /// S_n f split into its continuous and mass-point parts.
    PartialSum,
    /// max_{k <= n} |S_k f|.
    Maximal,
    /// [M_b, S_n] f for the configured symbol.
    Commutator,
    /// Fitted r_n, s_n and the reconstruction residual of T_n f.
    Pollard,
    /// Operator-norm probe over the configured degrees, with the analytic
    /// conditions alongside.
    Probe,
    /// Restricted weak-type probe over the standard set family.
    WeakProbe,
    /// L_n(0,0), Q_n(0), r_n and r_n n^((alpha+1)/2) for a Laguerre weight
    /// with a mass at 0.
    LaguerreMass,
    /// Endpoints p0, p1 of the mean convergence interval.
    Endpoints,
    /// Exponent inequalities for (u, v, p).
    CheckConditions,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Recurrence => "recurrence",
            Command::Basis => "basis",
            Command::Kernel => "kernel",
            Command::PartialSum => "partial-sum",
            Command::Maximal => "maximal",
            Command::Commutator => "commutator",
            Command::Pollard => "pollard",
            Command::Probe => "probe",
            Command::WeakProbe => "weak-probe",
            Command::LaguerreMass => "laguerre-mass",
            Command::Endpoints => "endpoints",
            Command::CheckConditions => "check-conditions",
        }
    }

    fn default_degrees(self) -> fn(usize) -> Vec<usize> {
        match self {
            Command::Probe | Command::WeakProbe => probe_degrees,
            _ => all_degrees,
        }
    }

    fn run(self, cfg: &ExperimentConfig) -> Result<commands::Output, CliError> {
        match self {
            Command::Recurrence => commands::recurrence(cfg),
            Command::Basis => commands::basis_values(cfg),
            Command::Kernel => commands::kernel(cfg),
            Command::PartialSum => commands::partial_sum(cfg),
            Command::Maximal => commands::maximal(cfg),
            Command::Commutator => commands::commutator_values(cfg),
            Command::Pollard => commands::pollard(cfg),
            Command::Probe => commands::probe(cfg, cfg.mode),
            Command::WeakProbe => commands::probe(cfg, ProbeMode::RestrictedWeak),
            Command::LaguerreMass => commands::laguerre_mass(cfg),
            Command::Endpoints => commands::endpoints(cfg),
            Command::CheckConditions => commands::conditions(cfg),
        }
    }
}

fn render(cli: &Cli, cfg: &ExperimentConfig, out: commands::Output) -> String {
    let command = cli.command.name();
    match cli.format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "config": cfg,
                "result": out.result,
            });
            serde_json::to_string_pretty(&doc).expect("values serialise") + "\n"
        }
        Format::Csv => format!(
            "# schema_version={SCHEMA_VERSION}\n# command={command}\n# config={}\n{}",
            serde_json::to_string(cfg).expect("config serialises"),
            out.csv
        ),
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let cfg = ExperimentConfig::load(&cli.overrides)?.resolve(cli.command.default_degrees());
    cfg.measure.check()?;
    let text = render(cli, &cfg, cli.command.run(&cfg)?);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
