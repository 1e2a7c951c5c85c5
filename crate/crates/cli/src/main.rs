mod error;
mod manifest;
mod montecarlo;
mod solve;
mod stability;
mod tables;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use bea_core::analytic::{self, AnalyticGame};
use bea_core::{SimConfig, SweepAxis};
use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

/// Relaying coalition games and coverage simulation.
#[derive(Debug, Parser)]
#[command(name = "bea", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a table of the three- or five-node reference game.
    Tables {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_enum)]
        which: tables::Which,
        /// Weight on payoff against energy, for utility tables.
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Value vector, or its compensated variant over a lambda range.
    Solve {
        #[arg(value_enum)]
        method: solve::Method,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        /// start:stop:step
        #[arg(long)]
        sweep: Option<solve::Range>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability verdicts and the inductive core.
    Stability {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Also write per-structure verdicts as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Coverage experiments, optionally swept along one axis.
    Montecarlo {
        /// key=value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one key, e.g. --set node_count=80.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// node_count, service_area or ring_width_delta.
        #[arg(long, requires = "values")]
        sweep: Option<String>,
        /// Comma-separated sweep values; fractions like -1/16 allowed.
        #[arg(long, allow_hyphen_values = true, requires = "sweep")]
        values: Option<String>,
        /// Output directory, created if missing [default: results].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-run a manifest and check its output digests.
        #[arg(long, conflicts_with_all = ["config", "overrides", "sweep", "values"])]
        replay: Option<PathBuf>,
    },
}

fn game(n: usize) -> CliResult<AnalyticGame> {
    match n {
        3 => Ok(analytic::three_node()),
        5 => Ok(analytic::five_node()),
        other => Err(CliError::Usage(format!("--n must be 3 or 5, got {other}"))),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(CliError::io(path)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(CliError::io("<stdout>")),
    }
}

fn load_config(path: Option<&PathBuf>, overrides: &[String]) -> CliResult<SimConfig> {
    let mut text = match path {
        Some(p) => fs::read_to_string(p).map_err(CliError::io(p))?,
        None => String::new(),
    };
    for o in overrides {
        if !o.contains('=') {
            return Err(CliError::Usage(format!("--set expects KEY=VALUE, got {o:?}")));
        }
        text.push('\n');
        text.push_str(o);
    }
    Ok(SimConfig::parse(&text)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Tables { n, which, rho, out } => emit(&tables::render(&game(n)?, which, rho)?, out.as_ref()),
        Command::Solve {
            method,
            n,
            lambda,
            sweep,
            out,
        } => emit(&solve::render(&game(n)?, method, lambda, sweep)?, out.as_ref()),
        Command::Stability { n, rho, csv } => {
            let r = stability::analyse(&game(n)?, rho)?;
            if let Some(path) = csv {
                fs::write(&path, &r.csv).map_err(CliError::io(&path))?;
            }
            emit(&r.text, None)
        }
        Command::Montecarlo {
            config,
            overrides,
            sweep,
            values,
            out,
            replay,
        } => {
            if let Some(m) = replay {
                let report = montecarlo::replay(&m, out.as_deref())?;
                return emit(&report, None);
            }
            let cfg = load_config(config.as_ref(), &overrides)?;
            let sweep = match (sweep, values) {
                (Some(axis), Some(v)) => {
                    let axis: SweepAxis = axis.parse()?;
                    let v = manifest::parse_values(&v).map_err(CliError::Usage)?;
                    if v.is_empty() {
                        return Err(CliError::Usage("--values is empty".into()));
                    }
                    Some((axis, v))
                }
                _ => None,
            };
            let out = out.unwrap_or_else(|| PathBuf::from("results"));
            let (m, summary) = montecarlo::run(&cfg, sweep, &out)?;
            let mut text = summary;
            for (name, hash) in &m.outputs {
                text.push_str(&format!("wrote {} (sha256 {hash})\n", out.join(name).display()));
            }
            text.push_str(&format!("wrote {}\n", out.join(manifest::FILE_NAME).display()));
            emit(&text, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
