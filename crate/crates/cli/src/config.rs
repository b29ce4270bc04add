//! Run configuration: a TOML file plus command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use flatlin::feedback::NewtonConfig;
use flatlin::flatmodel::ProbeBox;
use flatlin::simulate::Tolerances;
use flatlin::structure::{KappaMode, DEFAULT_GENERIC_PROBES};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub probes: ProbeSection,
    #[serde(default)]
    pub kappa: KappaSection,
    #[serde(default)]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            name: "vtol".into(),
            params: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    /// Rest values `y_s`; `None` means the model's nominal equilibrium.
    #[serde(default)]
    pub equilibria: Option<Vec<Vec<f64>>>,
    /// Generic-probe box; `None` means the model's default box.
    #[serde(default)]
    pub region: Option<ProbeBox>,
    #[serde(default = "default_generic_count")]
    pub generic_count: usize,
}

fn default_generic_count() -> usize {
    DEFAULT_GENERIC_PROBES
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection {
            equilibria: None,
            region: None,
            generic_count: DEFAULT_GENERIC_PROBES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaSection {
    /// `"auto"` or an explicit list such as `[4, 2]`.
    #[serde(default)]
    pub select: KappaSelect,
    #[serde(default = "default_mode")]
    pub mode: KappaMode,
}

fn default_mode() -> KappaMode {
    KappaMode::Canonical
}

impl Default for KappaSection {
    fn default() -> Self {
        KappaSection {
            select: KappaSelect::Auto,
            mode: KappaMode::Canonical,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KappaRepr", into = "KappaRepr")]
pub enum KappaSelect {
    #[default]
    Auto,
    Explicit(Vec<usize>),
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum KappaRepr {
    Word(String),
    List(Vec<usize>),
}

impl TryFrom<KappaRepr> for KappaSelect {
    type Error = String;

    fn try_from(r: KappaRepr) -> Result<Self, String> {
        match r {
            KappaRepr::Word(w) if w == "auto" => Ok(KappaSelect::Auto),
            KappaRepr::Word(w) => Err(format!("expected \"auto\" or a list of chain lengths, found {w:?}")),
            KappaRepr::List(k) => Ok(KappaSelect::Explicit(k)),
        }
    }
}

impl From<KappaSelect> for KappaRepr {
    fn from(k: KappaSelect) -> Self {
        match k {
            KappaSelect::Auto => KappaRepr::Word("auto".into()),
            KappaSelect::Explicit(k) => KappaRepr::List(k),
        }
    }
}

impl std::str::FromStr for KappaSelect {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "auto" {
            return Ok(KappaSelect::Auto);
        }
        s.split(',')
            .map(|x| x.trim().parse::<usize>().with_context(|| format!("bad chain length {x:?}")))
            .collect::<Result<Vec<_>>>()
            .map(KappaSelect::Explicit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// Rest value at `t = 0`; defaults to the model's nominal equilibrium.
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    pub end: Vec<f64>,
    pub duration: f64,
    pub dt: f64,
    #[serde(default)]
    pub hold: f64,
    #[serde(default)]
    pub q0: Option<Vec<f64>>,
    #[serde(default)]
    pub v0: Option<Vec<f64>>,
    #[serde(default)]
    pub q_offset: Option<Vec<f64>>,
    #[serde(default)]
    pub gains: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub newton: NewtonConfig,
    /// Also run at `dt / 2` and report the deviation ratio.
    #[serde(default)]
    pub order_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default = "default_trace")]
    pub trace: String,
    #[serde(default = "default_sidecar")]
    pub sidecar: String,
}

fn default_report() -> String {
    "report.json".into()
}

fn default_trace() -> String {
    "trace.csv".into()
}

fn default_sidecar() -> String {
    "trace.json".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("."),
            report: default_report(),
            trace: default_trace(),
            sidecar: default_sidecar(),
        }
    }
}

impl OutputSection {
    pub fn report_path(&self) -> PathBuf {
        self.dir.join(&self.report)
    }

    pub fn trace_path(&self) -> PathBuf {
        self.dir.join(&self.trace)
    }

    pub fn sidecar_path(&self) -> PathBuf {
        self.dir.join(&self.sidecar)
    }
}

/// Reads `path` (or starts from an empty table), applies `key=value`
/// overrides at dotted paths, then deserializes.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            text.parse::<toml::Table>()
                .with_context(|| format!("parsing {}", p.display()))?
        }
        None => toml::Table::new(),
    };
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("override {item:?} is not of the form key=value"))?;
        set_path(&mut table, key.trim(), parse_value(value.trim()))?;
    }
    toml::Value::Table(table)
        .try_into::<RunConfig>()
        .context("invalid configuration")
}

/// A TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts = key.split('.').peekable();
    let mut current = table;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            bail!("empty segment in key {key:?}");
        }
        if parts.peek().is_none() {
            current.insert(part.to_string(), value);
            return Ok(());
        }
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        current = entry
            .as_table_mut()
            .ok_or_else(|| anyhow!("{key:?}: {part:?} is not a table"))?;
    }
    Ok(())
}
