//! Command layer behind the `posinorm` binary.
//!
//! A [`RunConfig`] names a command and its inputs; [`execute`] looks the
//! command up in a [`CommandRegistry`] and returns a JSON report, and
//! [`render`] turns it into JSON or CSV. The binary only parses flags.

mod commands;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{Backend, Rational};
use crate::sequences::{Family, FamilyRegistry, FamilySpec, Params, WeightSequence};

pub use commands::builtin_commands;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Where the operator comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySource {
    /// A registry name, with `--param` overrides.
    Named(String),
    /// A family spec JSON file.
    JsonFile(PathBuf),
    /// Shift weights given inline, repeated periodically.
    Weights(Vec<Rational>),
}

impl fmt::Display for FamilySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySource::Named(n) => f.write_str(n),
            FamilySource::JsonFile(p) => write!(f, "{}", p.display()),
            FamilySource::Weights(_) => f.write_str("inline-weights"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Registry key, e.g. `delta-search` or `verify identity`.
    pub command: String,
    pub family: Option<FamilySource>,
    pub params: Params,
    pub n: Option<usize>,
    pub k_max: Option<usize>,
    /// Start of the tail enclosure in compressions.
    pub tail_start: Option<usize>,
    pub backend: Backend,
    pub slack_factor: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub catalog_dir: Option<PathBuf>,
    pub claim: Option<String>,
    pub delta1: Option<Rational>,
    pub delta2: Option<Rational>,
    pub gamma: Option<f64>,
    pub p0: Option<Rational>,
    pub n_zero: Option<i64>,
    pub d_prefix: Vec<Rational>,
    pub d_tail: Option<Rational>,
    pub matrix: Option<PathBuf>,
    pub r: Vec<Rational>,
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            family: None,
            params: Params::new(),
            n: None,
            k_max: None,
            tail_start: None,
            backend: Backend::Exact,
            slack_factor: crate::numerics::SLACK_FACTOR,
            format: OutputFormat::Json,
            out: None,
            catalog_dir: None,
            claim: None,
            delta1: None,
            delta2: None,
            gamma: None,
            p0: None,
            n_zero: None,
            d_prefix: Vec::new(),
            d_tail: None,
            matrix: None,
            r: Vec::new(),
        }
    }

    pub fn family(mut self, name: &str) -> Self {
        self.family = Some(FamilySource::Named(name.to_string()));
        self
    }

    pub fn param(mut self, key: &str, value: Rational) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n", self.n), ("K", self.tail_start)] {
            if v == Some(0) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(self.slack_factor >= 0.0 && self.slack_factor.is_finite()) {
            return Err(Error::Config("slack must be a finite number >= 0".into()));
        }
        if let Some(g) = self.gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Config("gamma must be a finite number >= 0".into()));
            }
        }
        Ok(())
    }
}

/// Inputs shared by every command.
pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub registry: &'a FamilyRegistry,
}

impl Context<'_> {
    pub fn resolve_family(&self) -> Result<Family> {
        let cfg = self.config;
        match &cfg.family {
            None => Err(Error::Config(
                "this command needs --family, --family-json or --weights".into(),
            )),
            Some(FamilySource::Named(name)) => self.registry.build(name, &cfg.params),
            Some(FamilySource::JsonFile(path)) => {
                FamilySpec::from_json(&std::fs::read_to_string(path)?)?.build(&cfg.params)
            }
            Some(FamilySource::Weights(w)) => {
                if w.is_empty() {
                    return Err(Error::Config("--weights needs at least one value".into()));
                }
                Ok(Family::Shift(WeightSequence::periodic("inline-weights", w.clone())))
            }
        }
    }
}

/// One CLI command.
pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Whether `--float` means anything for this command.
    fn float_capable(&self) -> bool {
        false
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value>;
}

/// Commands keyed by name.
#[derive(Clone, Default)]
pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Arc<dyn Command>>,
}

impl CommandRegistry {
    pub fn builtin() -> Self {
        let mut reg = Self::default();
        for c in builtin_commands() {
            reg.register(c);
        }
        reg
    }

    pub fn register(&mut self, command: Arc<dyn Command>) {
        self.commands.insert(command.name(), command);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn Command>> {
        self.commands.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.commands.keys().copied()
    }
}

/// The built-in catalog plus every family JSON in `catalog_dir`.
pub fn load_registry(config: &RunConfig) -> Result<FamilyRegistry> {
    let mut reg = FamilyRegistry::with_catalog();
    if let Some(dir) = &config.catalog_dir {
        reg.load_dir(dir)?;
    }
    Ok(reg)
}

/// Runs the command and wraps its result in the report envelope.
pub fn execute(config: &RunConfig) -> Result<Value> {
    execute_with(config, &CommandRegistry::builtin())
}

pub fn execute_with(config: &RunConfig, commands: &CommandRegistry) -> Result<Value> {
    config.validate()?;
    let command = commands
        .get(&config.command)
        .ok_or_else(|| Error::Config(format!("unknown command {:?}", config.command)))?;
    if config.backend == Backend::Float && !command.float_capable() {
        return Err(Error::Config(format!(
            "{} is decided in exact arithmetic; --float does not apply",
            command.name()
        )));
    }
    let registry = load_registry(config)?;
    let result = command.run(&Context {
        config,
        registry: &registry,
    })?;
    let mut env = Map::new();
    env.insert("command".into(), Value::String(command.name().into()));
    if let Some(f) = &config.family {
        env.insert("family".into(), Value::String(f.to_string()));
    }
    if !config.params.is_empty() {
        let params = config
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.to_string())));
        env.insert("params".into(), Value::Object(params.collect()));
    }
    env.insert("result".into(), result);
    Ok(Value::Object(env))
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, rows)),
        Value::Array(a) if a.is_empty() => rows.push((prefix.to_string(), String::new())),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&key(&i.to_string()), x, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// JSON (pretty, key order as produced) or a two-column `field,value` CSV
/// of the flattened report.
pub fn render(report: &Value, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            flatten("", report, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["field", "value"])?;
            for (k, v) in rows {
                w.write_record([k, v])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Executes, renders, and writes to `--out` when given. Returns the
/// rendered report.
pub fn run(config: &RunConfig) -> Result<String> {
    let text = render(&execute(config)?, config.format)?;
    if let Some(path) = &config.out {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

/// 0 is reserved for a produced verdict; 2 marks a violated hypothesis,
/// 1 everything else.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_hypothesis_violation() {
        2
    } else {
        1
    }
}
