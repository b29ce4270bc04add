use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use flatlin::flatmodel::{BuiltinModel, FlatModel};
use flatlin::multijet::MultiIndex;
use flatlin::simulate::{order_check, run_rest_to_rest, RestToRestScenario, SimulateError};
use flatlin::structure::{Analysis, ProbeConfig, StructureError, StructureReport};
use serde_json::{json, Value};

use crate::config::{KappaSelect, RunConfig, SimulationSection};

/// How a command ended; each maps to a process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    /// Bad input: unknown model, malformed configuration.
    Usage,
    /// No equilibrium-regular chain lengths, or a structure check failed.
    StructureWarning,
    /// The feedback became singular during simulation.
    Singular,
    /// The run finished but its certificate failed.
    CertificateFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Usage => 1,
            Status::StructureWarning => 2,
            Status::Singular => 3,
            Status::CertificateFailed => 4,
        }
    }
}

/// A command's JSON result and its status.
pub struct Report {
    pub json: Value,
    pub status: Status,
}

/// Builds the configured model and hands it to `$body` as `$m`.
macro_rules! with_model {
    ($config:expr, |$m:ident| $body:expr) => {
        match build_model($config)? {
            BuiltinModel::Vtol($m) => $body,
            BuiltinModel::GantryCrane($m) => $body,
        }
    };
}

fn build_model(config: &RunConfig) -> Result<BuiltinModel> {
    let mut model = BuiltinModel::from_name(&config.model.name)
        .map_err(|e| anyhow!("{e}; known models: {}", BuiltinModel::NAMES.join(", ")))?;
    for (name, value) in &config.model.params {
        model.set_parameter(name, *value)?;
    }
    Ok(model)
}

fn probe_config<M: FlatModel>(model: &M, config: &RunConfig) -> ProbeConfig {
    ProbeConfig {
        equilibria: config
            .probes
            .equilibria
            .clone()
            .unwrap_or_else(|| vec![model.nominal_equilibrium()]),
        region: config.probes.region.clone().unwrap_or_else(|| model.probe_box()),
        generic_count: config.probes.generic_count,
        seed: config.seed,
    }
}

fn model_json<M: FlatModel>(model: &M) -> Value {
    json!({
        "name": model.name(),
        "parameters": model.parameters(),
    })
}

fn violations_report<M: FlatModel>(model: &M, config: &RunConfig, error: StructureError) -> Result<Report> {
    match error {
        StructureError::Violations(v) => Ok(Report {
            json: json!({ "model": model_json(model), "seed": config.seed, "violations": v }),
            status: Status::StructureWarning,
        }),
        other => Err(other.into()),
    }
}

/// Analysis plus its report, or a finished report when structure checks fail.
fn analyze_model<M: FlatModel + Clone>(
    model: &M,
    config: &RunConfig,
) -> Result<std::result::Result<(Analysis<M>, StructureReport), Report>> {
    let analysis = match Analysis::new(model.clone(), &probe_config(model, config)) {
        Ok(a) => a,
        Err(e) => return violations_report(model, config, e).map(Err),
    };
    match analysis.report(config.kappa.mode) {
        Ok(report) => Ok(Ok((analysis, report))),
        Err(e) => violations_report(model, config, e).map(Err),
    }
}

/// Explicit κ, or the lexicographically first equilibrium-regular candidate.
fn select_kappa(config: &RunConfig, report: &StructureReport) -> Option<MultiIndex> {
    match &config.kappa.select {
        KappaSelect::Explicit(k) => Some(MultiIndex::new(k.clone())),
        KappaSelect::Auto => report.equilibrium_regular().first().map(|k| (*k).clone()),
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn analyze(config: &RunConfig) -> Result<Report> {
    let report = with_model!(config, |m| analyze_json(&m, config))?;
    write_json(&config.output.report_path(), &report.json)?;
    Ok(report)
}

fn analyze_json<M: FlatModel + Clone>(model: &M, config: &RunConfig) -> Result<Report> {
    let (_, report) = match analyze_model(model, config)? {
        Ok(x) => x,
        Err(r) => return Ok(r),
    };
    let status = if report.equilibrium_regular().is_empty() {
        Status::StructureWarning
    } else {
        Status::Ok
    };
    let json = json!({
        "model": model_json(model),
        "seed": config.seed,
        "kappa_mode": config.kappa.mode,
        "structure": report,
        "equilibrium_regular": report.equilibrium_regular(),
        "generic_regular": report.generic_regular(),
        "selected_kappa": select_kappa(config, &report),
    });
    Ok(Report { json, status })
}

fn scenario<M: FlatModel>(model: &M, sim: &SimulationSection) -> RestToRestScenario {
    let start = sim.start.clone().unwrap_or_else(|| model.nominal_equilibrium());
    let mut s = RestToRestScenario::new(start, sim.end.clone(), sim.duration, sim.dt);
    s.hold = sim.hold;
    s.q0 = sim.q0.clone();
    s.v0 = sim.v0.clone();
    s.q_offset = sim.q_offset.clone();
    s.gains = sim.gains.clone();
    s.tolerances = sim.tolerances.clone();
    s.newton = sim.newton.clone();
    s
}

pub fn simulate(config: &RunConfig) -> Result<Report> {
    let report = with_model!(config, |m| simulate_model(&m, config))?;
    write_json(&config.output.sidecar_path(), &report.json)?;
    Ok(report)
}

fn simulate_model<M: FlatModel + Clone>(model: &M, config: &RunConfig) -> Result<Report> {
    let sim = config
        .simulation
        .as_ref()
        .ok_or_else(|| anyhow!("simulate needs a [simulation] section"))?;
    let (analysis, report) = match analyze_model(model, config)? {
        Ok(x) => x,
        Err(r) => return Ok(r),
    };
    let Some(kappa) = select_kappa(config, &report) else {
        return Ok(Report {
            json: json!({
                "model": model_json(model),
                "seed": config.seed,
                "error": "no equilibrium-regular chain lengths; choose kappa explicitly",
                "generic_regular": report.generic_regular(),
            }),
            status: Status::StructureWarning,
        });
    };
    let scenario = scenario(model, sim);
    let header = json!({
        "config": config,
        "seed": config.seed,
        "model": model_json(model),
        "kappa": kappa,
    });
    let result = match run_rest_to_rest(&analysis.map, &kappa, &scenario) {
        Ok(r) => r,
        Err(SimulateError::Feedback { time, source }) => {
            let mut json = header;
            json["failure"] = json!({ "time": time, "error": source.to_string() });
            return Ok(Report {
                json,
                status: Status::Singular,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let trace_path = config.output.trace_path();
    if let Some(dir) = trace_path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    result.trace.save_csv(&trace_path)?;
    let mut json = header;
    json["trace"] = json!(trace_path);
    json["diagnostics"] = json!(result.trace.diagnostics());
    json["certificate"] = json!(result.certificate);
    let mut pass = result.certificate.pass;
    if sim.order_check {
        let check = order_check(&analysis.map, &kappa, &scenario)?;
        pass &= check.pass;
        json["order_check"] = json!(check);
    }
    Ok(Report {
        json,
        status: if pass { Status::Ok } else { Status::CertificateFailed },
    })
}

/// Runs `simulate` (or `analyze` without a simulation block) once per value
/// of `key`, each in its own thread and output directory.
pub fn sweep(config: &RunConfig, key: &str, values: &[String], base: &[String], file: Option<&Path>) -> Result<Report> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    let configs = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut overrides = base.to_vec();
            overrides.push(format!("{key}={v}"));
            let mut c = crate::config::load(file, &overrides)?;
            c.output.dir = config.output.dir.join(format!("run-{i}"));
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<Report>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                scope.spawn(move || {
                    if c.simulation.is_some() {
                        simulate(c)
                    } else {
                        analyze(c)
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow!("sweep run panicked"))))
            .collect()
    });
    let mut worst = Status::Ok;
    let mut runs = Vec::new();
    for ((value, c), result) in values.iter().zip(&configs).zip(results) {
        let (status, json) = match result {
            Ok(r) => (r.status, r.json),
            Err(e) => (Status::Usage, json!({ "error": format!("{e:#}") })),
        };
        worst = worst.max(status);
        runs.push(json!({
            "value": value,
            "exit_code": status.code(),
            "output_dir": c.output.dir,
            "result": json,
        }));
    }
    let json = json!({ "key": key, "runs": runs });
    write_json(&config.output.dir.join("sweep.json"), &json)?;
    Ok(Report { json, status: worst })
}

pub fn list_models() -> Result<Report> {
    let models = BuiltinModel::NAMES
        .iter()
        .map(|name| {
            let m = BuiltinModel::from_name(name)?;
            Ok(json!({
                "name": name,
                "parameters": m.parameters(),
                "nominal_equilibrium": m.nominal_equilibrium(),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        json: Value::Array(models),
        status: Status::Ok,
    })
}
