//! `flatlin`: structure analysis, linearizing feedback and certified
//! simulation for configuration flat systems.
//!
//! Exit codes: 0 success, 1 usage or model error, 2 structure warning,
//! 3 feedback singularity during simulation, 4 certificate failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::{Report, Status};
use config::{KappaSelect, RunConfig};

#[derive(Parser)]
#[command(name = "flatlin", version, about = "Quasi-static feedback linearization of configuration flat systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orders R, structure checks and candidate chain lengths
    Analyze(Common),
    /// Rest-to-rest run under the linearizing feedback, with certificate
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Step size, overriding simulation.dt
        #[arg(long)]
        dt: Option<f64>,
        /// Also run at dt/2 and report the deviation ratio
        #[arg(long)]
        order_check: bool,
    },
    /// Repeat a run for several values of one configuration key
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted key to vary, e.g. model.params.epsilon
        #[arg(long)]
        key: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Built-in models and their parameters
    ListModels,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Model name, overriding model.name
    #[arg(long)]
    model: Option<String>,
    /// Probe sampling seed
    #[arg(long)]
    seed: Option<u64>,
    /// Chain lengths, "auto" or e.g. "4,2"
    #[arg(long)]
    kappa: Option<KappaSelect>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override any configuration key, e.g. model.params.epsilon=0.5
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    /// `--set` entries followed by the dedicated flags, which take precedence.
    fn overrides(&self) -> Vec<String> {
        let mut all = self.overrides.clone();
        if let Some(m) = &self.model {
            all.push(format!("model.name={}", toml::Value::String(m.clone())));
        }
        if let Some(s) = self.seed {
            all.push(format!("seed={s}"));
        }
        all
    }

    fn load(&self) -> Result<RunConfig> {
        let mut config = config::load(self.config.as_deref(), &self.overrides())?;
        if let Some(k) = &self.kappa {
            config.kappa.select = k.clone();
        }
        if let Some(out) = &self.out {
            config.output.dir = out.clone();
        }
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<Report> {
    match cli.command {
        Command::Analyze(common) => commands::analyze(&common.load()?),
        Command::Simulate { common, dt, order_check } => {
            let mut config = common.load()?;
            if let Some(sim) = config.simulation.as_mut() {
                if let Some(dt) = dt {
                    sim.dt = dt;
                }
                sim.order_check |= order_check;
            }
            commands::simulate(&config)
        }
        Command::Sweep { common, key, values } => {
            let config = common.load()?;
            commands::sweep(&config, &key, &values, &common.overrides(), common.config.as_deref())
        }
        Command::ListModels => commands::list_models(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report.json).expect("JSON values serialize");
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if report.status != Status::Ok {
                if let Some(msg) = summary(&report) {
                    eprintln!("{msg}");
                }
            }
            ExitCode::from(report.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Usage.code() as u8)
        }
    }
}

fn summary(report: &Report) -> Option<String> {
    let j = &report.json;
    match report.status {
        Status::Singular => Some(format!(
            "feedback singular at t = {}: {}",
            j["failure"]["time"],
            j["failure"]["error"].as_str().unwrap_or("")
        )),
        Status::CertificateFailed => Some("certificate failed".into()),
        Status::StructureWarning => Some("no equilibrium-regular chain lengths, or a structure check failed".into()),
        _ => None,
    }
}
