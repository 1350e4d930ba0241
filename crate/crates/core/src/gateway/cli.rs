use std::fs;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::builder::TypedValueParser as _;
use clap::{Parser, Subcommand, ValueEnum};

use super::calibrate::{evaluate, Goals, Tolerance};
use super::http::{serve, AppState};
use super::store::Workspace;
use super::validate::{diagnose, has_errors};
use crate::netcore::{Network, NodeId};
use crate::oilmodel::{build_base_case, reference_parameters, MarketParameters};
use crate::sampler::{run_monte_carlo, samples_csv, samples_json, summary_json, summary_table, DEFAULT_SAMPLES};
use crate::scenario::{
    apply_overlay, constrained_overlay, diff_networks, reference_actuals, ConstrainedActuals, Overlay,
};

#[derive(Debug, Parser)]
#[command(name = "beliefcast", version, about = "Belief-network scenario forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a network document; exit 1 on errors, 2 if unreadable.
    Validate { path: PathBuf },
    /// Run a seeded Monte Carlo simulation and print a summary table.
    Simulate {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        overlay: Option<PathBuf>,
        /// Comma-separated node ids.
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<NodeId>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for `samples.{csv,json}` and `summary.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compare simulated means and standard deviations against a goals file.
    Calibrate {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        overlay: Option<PathBuf>,
        #[arg(long)]
        goals: PathBuf,
        /// Restrict to these targets (default: every target in the goals file).
        #[arg(long, value_delimiter = ',')]
        targets: Vec<NodeId>,
        /// `M` or `M,S`; overrides the goals file.
        #[arg(long)]
        tolerance: Option<Tolerance>,
    },
    /// Serve the HTTP API over a workspace directory.
    Serve {
        #[arg(long, env = "BELIEFCAST_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "BELIEFCAST_WORKSPACE", default_value = "workspace")]
        workspace: PathBuf,
        /// Seconds POST /simulate waits before answering 202.
        #[arg(long, default_value_t = 30)]
        budget_secs: u64,
        /// Bind on all interfaces instead of loopback.
        #[arg(long)]
        public: bool,
    },
    /// Write the base-case network built from a parameter file.
    BuildBase {
        /// Defaults to the shipped reference parameters.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the constrained-capacity network and the overlay that produces it.
    BuildConstrained {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        actuals: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        overlay_out: Option<PathBuf>,
    },
    /// Apply an overlay to a network and write the result.
    Apply {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        overlay: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the node-level difference between two networks as JSON.
    Diff { a: PathBuf, b: PathBuf },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    Network::from_json(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_scenario(network: &Path, overlay: Option<&Path>) -> Result<Network, Failure> {
    let base = load_network(network)?;
    match overlay {
        None => Ok(base),
        Some(p) => {
            let o = Overlay::from_json(&read(p)?).map_err(|e| fail(format!("{}: {e}", p.display())))?;
            apply_overlay(&base, &o).map_err(|e| fail(format!("{}: {e}", p.display())))
        }
    }
}

fn load_params(path: Option<&Path>) -> Result<MarketParameters, Failure> {
    match path {
        None => Ok(reference_parameters()),
        Some(p) => MarketParameters::from_json(&read(p)?).map_err(|e| fail(format!("{}: {e}", p.display()))),
    }
}

/// Run a parsed command, printing to stdout. Returns the exit code.
pub fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { path } => {
            let diags = diagnose(&read(&path)?);
            for d in &diags {
                println!("{d}");
            }
            if has_errors(&diags) {
                return Ok(1);
            }
            let net = Network::from_json(&read(&path)?).expect("diagnosed as valid");
            println!("ok: {} ({} nodes)", net.name(), net.len());
            Ok(0)
        }
        Command::Simulate {
            network,
            overlay,
            targets,
            n,
            seed,
            out,
            format,
        } => {
            let net = load_scenario(&network, overlay.as_deref())?;
            let f = run_monte_carlo(&net, &targets, n, seed).map_err(|e| fail(e.to_string()))?;
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|e| fail(format!("cannot create {}: {e}", dir.display())))?;
                match format {
                    Format::Csv => write(&dir.join("samples.csv"), &samples_csv(&f))?,
                    Format::Json => write(&dir.join("samples.json"), &samples_json(&f))?,
                }
                write(&dir.join("summary.json"), &summary_json(&f))?;
            }
            print!("{}", summary_table(&f));
            Ok(0)
        }
        Command::Calibrate {
            network,
            overlay,
            goals,
            targets,
            tolerance,
        } => {
            let net = load_scenario(&network, overlay.as_deref())?;
            let mut goals = Goals::from_json(&read(&goals)?).map_err(fail)?;
            if !targets.is_empty() {
                goals.targets.retain(|g| targets.contains(&g.target));
                if goals.targets.is_empty() {
                    return Err(fail("none of the requested targets has a goal"));
                }
            }
            let f = run_monte_carlo(&net, &goals.target_ids(), goals.n, goals.seed).map_err(|e| fail(e.to_string()))?;
            let report = evaluate(&f, &goals, tolerance.unwrap_or(goals.tolerance)).map_err(fail)?;
            print!("{}", report.render());
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Serve {
            port,
            workspace,
            budget_secs,
            public,
        } => {
            let ws = Workspace::open(&workspace).map_err(|e| fail(format!("{}: {e}", workspace.display())))?;
            let state = AppState::new(ws, Duration::from_secs(budget_secs));
            let ip = if public {
                Ipv4Addr::UNSPECIFIED
            } else {
                Ipv4Addr::LOCALHOST
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| fail(e.to_string()))?;
            rt.block_on(serve(SocketAddr::from((ip, port)), state))
                .map_err(|e| fail(e.to_string()))?;
            Ok(0)
        }
        Command::BuildBase { params, out } => {
            let net = build_base_case(&load_params(params.as_deref())?).map_err(|e| fail(e.to_string()))?;
            emit(out.as_deref(), &net.to_json())?;
            Ok(0)
        }
        Command::BuildConstrained {
            params,
            actuals,
            out,
            overlay_out,
        } => {
            let p = load_params(params.as_deref())?;
            let a = match actuals {
                None => reference_actuals(),
                Some(path) => ConstrainedActuals::from_json(&read(&path)?)
                    .map_err(|e| fail(format!("{}: {e}", path.display())))?,
            };
            let overlay = constrained_overlay(&p, &a).map_err(|e| fail(e.to_string()))?;
            let base = build_base_case(&p).map_err(|e| fail(e.to_string()))?;
            let net = apply_overlay(&base, &overlay).map_err(|e| fail(e.to_string()))?;
            if let Some(path) = overlay_out {
                write(&path, &overlay.to_json())?;
            }
            emit(out.as_deref(), &net.to_json())?;
            Ok(0)
        }
        Command::Apply { network, overlay, out } => {
            let net = load_scenario(&network, Some(&overlay))?;
            emit(out.as_deref(), &net.to_json())?;
            Ok(0)
        }
        Command::Diff { a, b } => {
            let d = diff_networks(&load_network(&a)?, &load_network(&b)?);
            let mut s = serde_json::to_string_pretty(&d).expect("diff serializes");
            s.push('\n');
            print!("{s}");
            Ok(0)
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn zero_samples_is_a_usage_error() {
        let err = Cli::try_parse_from([
            "beliefcast",
            "simulate",
            "--network",
            "x.json",
            "--targets",
            "a",
            "--n",
            "0",
        ])
        .unwrap_err();
        assert_eq!(err.kind(), clap::error::ErrorKind::ValueValidation);
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn targets_split_on_commas() {
        let cli = Cli::try_parse_from([
            "beliefcast",
            "simulate",
            "--network",
            "x.json",
            "--targets",
            "WTIp.1,WTIp.2",
        ])
        .unwrap();
        match cli.command {
            Command::Simulate { targets, n, .. } => {
                assert_eq!(targets, vec![NodeId::from("WTIp.1"), NodeId::from("WTIp.2")]);
                assert_eq!(n, DEFAULT_SAMPLES);
            }
            other => panic!("{other:?}"),
        }
    }
}
