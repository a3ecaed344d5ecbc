//! Experiment configuration: a flat `key = value` file (TOML syntax) plus
//! command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use polarsolve_core::{CostFunction, CostSpec, ModelError, ModelParams, TabulatedCost};
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SolveSingleTwoPeriod,
    SolveSingleInfinite,
    SolveStackelberg,
    SolveMpe,
    Sweep,
    OracleCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::SolveSingleTwoPeriod,
        ExperimentKind::SolveSingleInfinite,
        ExperimentKind::SolveStackelberg,
        ExperimentKind::SolveMpe,
        ExperimentKind::Sweep,
        ExperimentKind::OracleCheck,
    ];

    /// The subcommand name, also accepted as the `experiment` value.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SolveSingleTwoPeriod => "solve-single2p",
            ExperimentKind::SolveSingleInfinite => "solve-single",
            ExperimentKind::SolveStackelberg => "solve-stackelberg",
            ExperimentKind::SolveMpe => "solve-mpe",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::OracleCheck => "oracle-check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    K,
    Pi,
    Beta,
    H,
    GridN,
    Horizon,
}

impl Axis {
    pub const ALL: [Axis; 6] = [Axis::K, Axis::Pi, Axis::Beta, Axis::H, Axis::GridN, Axis::Horizon];

    pub fn key(self) -> &'static str {
        match self {
            Axis::K => "k",
            Axis::Pi => "pi",
            Axis::Beta => "beta",
            Axis::H => "H",
            Axis::GridN => "grid_n",
            Axis::Horizon => "horizon",
        }
    }

    fn from_key(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.key() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostDescriptor {
    Quadratic { k: f64 },
    /// `c` sampled at evenly spaced points of `[0, 1]`.
    Custom { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub description: Option<String>,
    pub pi: f64,
    pub beta: f64,
    pub h: f64,
    pub cost: CostDescriptor,
    pub grid_n: usize,
    pub horizon: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub oracle_n: usize,
    pub scan_n: usize,
    pub profile_p0: Option<f64>,
    pub sweep_target: Option<ExperimentKind>,
    pub sweep_axes: Vec<(Axis, Vec<f64>)>,
    pub sweep_cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    /// 1-based line in the config file, when the field came from there.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "invalid config: field `{}` (line {line}): {}", self.field, self.message),
            None => write!(f, "invalid config: field `{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

const KNOWN_KEYS: [&str; 18] = [
    "experiment",
    "description",
    "pi",
    "beta",
    "H",
    "cost",
    "k",
    "cost_table",
    "grid_n",
    "horizon",
    "tol",
    "max_iter",
    "oracle_n",
    "scan_n",
    "profile_p0",
    "sweep_target",
    "sweep_cap",
    "sweep",
];

/// Raw key-value pairs with enough context to point diagnostics at lines.
#[derive(Debug, Clone)]
pub struct RawConfig {
    table: Table,
    source: String,
    base_dir: PathBuf,
    overridden: Vec<String>,
}

impl RawConfig {
    pub fn parse(source: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let table: Table = source.parse().map_err(|e: toml::de::Error| ConfigError {
            field: "<syntax>".into(),
            line: e.span().map(|s| source[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        Ok(Self {
            table,
            source: source.to_string(),
            base_dir: base_dir.to_path_buf(),
            overridden: Vec::new(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
            field: "<file>".into(),
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&source, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn empty() -> Self {
        Self {
            table: Table::new(),
            source: String::new(),
            base_dir: PathBuf::from("."),
            overridden: Vec::new(),
        }
    }

    /// Applies one `key=value` override. The value is read as a TOML value
    /// and falls back to a bare string. Dotted keys address the sweep table.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError {
            field: assignment.to_string(),
            line: None,
            message: "override must have the form key=value".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let parsed = format!("v = {value}")
            .parse::<Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(value.to_string()));
        match key.split_once('.') {
            Some(("sweep", axis)) => {
                let sweep = self
                    .table
                    .entry("sweep")
                    .or_insert_with(|| Value::Table(Table::new()));
                match sweep {
                    Value::Table(t) => {
                        t.insert(axis.to_string(), parsed);
                    }
                    _ => {
                        return Err(ConfigError {
                            field: "sweep".into(),
                            line: self.line_of("sweep"),
                            message: "expected a table of axes".into(),
                        })
                    }
                }
            }
            _ => {
                self.table.insert(key.to_string(), parsed);
            }
        }
        self.overridden.push(key.to_string());
        Ok(())
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        if self.overridden.iter().any(|k| k == key) {
            return None;
        }
        let (head, tail) = key.split_once('.').unwrap_or((key, ""));
        self.source.lines().position(|line| {
            let line = line.trim_start();
            let rest = if tail.is_empty() {
                line.strip_prefix(head)
            } else {
                line.strip_prefix(head)
                    .and_then(|r| r.trim_start().strip_prefix('.'))
                    .and_then(|r| r.trim_start().strip_prefix(tail))
            };
            rest.is_some_and(|r| r.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
    }

    fn error(&self, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            field: field.to_string(),
            line: self.line_of(field),
            message: message.into(),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(self.error(key, format!("expected a number, got {}", other.type_str()))),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(Value::Float(x)) if x.fract() == 0.0 && *x >= 0.0 => Ok(Some(*x as usize)),
            Some(other) => Err(self.error(key, format!("expected a non-negative integer, got {other}"))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(self.error(key, format!("expected a string, got {}", other.type_str()))),
        }
    }

    fn numbers(&self, field: &str, value: &Value) -> Result<Vec<f64>, ConfigError> {
        let items = value
            .as_array()
            .ok_or_else(|| self.error(field, "expected a list of numbers"))?;
        items
            .iter()
            .map(|v| match v {
                Value::Float(x) => Ok(*x),
                Value::Integer(i) => Ok(*i as f64),
                _ => Err(self.error(field, "expected a list of numbers")),
            })
            .collect()
    }

    /// Validates every field and resolves defaults. `kind` is the experiment
    /// selected on the command line.
    pub fn resolve(&self, kind: ExperimentKind) -> Result<ExperimentConfig, ConfigError> {
        for key in self.table.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(self.error(key, "unknown field"));
            }
        }
        if let Some(name) = self.string("experiment")? {
            match ExperimentKind::from_name(&name) {
                Some(k) if k == kind => {}
                Some(k) => {
                    return Err(self.error(
                        "experiment",
                        format!("config is for `{k}` but `{kind}` was requested"),
                    ))
                }
                None => return Err(self.error("experiment", format!("unknown experiment `{name}`"))),
            }
        }

        let sweep_target = match self.string("sweep_target")? {
            None => None,
            Some(name) => match ExperimentKind::from_name(&name) {
                Some(ExperimentKind::Sweep) | None => {
                    return Err(self.error("sweep_target", format!("`{name}` cannot be swept")))
                }
                Some(k) => Some(k),
            },
        };
        if kind == ExperimentKind::Sweep && sweep_target.is_none() {
            return Err(self.error("sweep_target", "a sweep needs a target experiment"));
        }
        // defaults follow the experiment that actually runs
        let effective = sweep_target.unwrap_or(kind);
        let is_mpe = effective == ExperimentKind::SolveMpe;

        let pi = self.number("pi")?.unwrap_or(0.5);
        let beta = self.number("beta")?.unwrap_or(0.9);
        let h = self.number("H")?.unwrap_or(1.0);

        let cost = match self.string("cost")?.as_deref().unwrap_or("quadratic") {
            "quadratic" => CostDescriptor::Quadratic {
                k: self.number("k")?.unwrap_or(10.0),
            },
            "custom" => CostDescriptor::Custom {
                values: self.cost_table()?,
            },
            other => return Err(self.error("cost", format!("expected `quadratic` or `custom`, got `{other}`"))),
        };

        let mut sweep_axes = Vec::new();
        if let Some(sweep) = self.table.get("sweep") {
            let table = sweep
                .as_table()
                .ok_or_else(|| self.error("sweep", "expected axes such as sweep.k = [..]"))?;
            for (key, value) in table {
                let field = format!("sweep.{key}");
                let axis = Axis::from_key(key).ok_or_else(|| {
                    self.error(&field, "sweep axes are k, pi, beta, H, grid_n and horizon")
                })?;
                let values = self.numbers(&field, value)?;
                if values.is_empty() {
                    return Err(self.error(&field, "an axis needs at least one value"));
                }
                sweep_axes.push((axis, values));
            }
            sweep_axes.sort_by_key(|(a, _)| *a);
        }

        let config = ExperimentConfig {
            experiment: kind,
            description: self.string("description")?,
            pi,
            beta,
            h,
            cost,
            grid_n: self.count("grid_n")?.unwrap_or(if is_mpe { 501 } else { 1001 }),
            horizon: self.count("horizon")?.unwrap_or(600),
            tol: self.number("tol")?.unwrap_or(if is_mpe { 1e-9 } else { 1e-10 }),
            max_iter: self.count("max_iter")?.unwrap_or(10_000),
            oracle_n: self.count("oracle_n")?.unwrap_or(2001),
            scan_n: self.count("scan_n")?.unwrap_or(201),
            profile_p0: self.number("profile_p0")?,
            sweep_target,
            sweep_axes,
            sweep_cap: self.count("sweep_cap")?.unwrap_or(256),
        };
        config.validate().map_err(|(field, message)| self.error(field, message))?;
        if kind == ExperimentKind::Sweep {
            if config.sweep_axes.is_empty() {
                return Err(self.error("sweep", "a sweep needs at least one axis"));
            }
            let size: usize = config.sweep_axes.iter().map(|(_, v)| v.len()).product();
            if size > config.sweep_cap {
                return Err(self.error(
                    "sweep_cap",
                    format!("{size} combinations exceed the cap of {}", config.sweep_cap),
                ));
            }
            for combo in config.combinations() {
                combo
                    .validate()
                    .map_err(|(field, message)| self.error(&format!("sweep.{field}"), message))?;
            }
        }
        Ok(config)
    }

    fn cost_table(&self) -> Result<Vec<f64>, ConfigError> {
        match self.table.get("cost_table") {
            None => Err(self.error("cost_table", "a custom cost needs cost_table")),
            Some(Value::String(path)) => {
                let path = self.base_dir.join(path);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| self.error("cost_table", format!("cannot read {}: {e}", path.display())))?;
                text.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| self.error("cost_table", format!("`{t}` is not a number")))
                    })
                    .collect()
            }
            Some(value) => self.numbers("cost_table", value),
        }
    }
}

fn model_error_field(e: &ModelError) -> (&'static str, String) {
    match e {
        ModelError::OutOfRange { name, .. } => {
            let field = match *name {
                "h" => "H",
                other => other,
            };
            (field, e.to_string())
        }
        ModelError::InvalidGridSize(_) => ("grid_n", e.to_string()),
        ModelError::InvalidCostTable(_) => ("cost_table", e.to_string()),
        _ => ("cost", e.to_string()),
    }
}

impl ExperimentConfig {
    /// Range checks shared by plain runs and every sweep combination.
    fn validate(&self) -> Result<(), (&'static str, String)> {
        self.params().map_err(|e| model_error_field(&e))?;
        self.cost_spec().map_err(|e| model_error_field(&e))?;
        polarsolve_core::Grid::new(self.grid_n).map_err(|e| model_error_field(&e))?;
        if self.horizon < 2 {
            return Err(("horizon", format!("must be at least 2, got {}", self.horizon)));
        }
        if !(self.tol > 0.0) {
            return Err(("tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(("max_iter", "must be positive".into()));
        }
        if self.oracle_n < 3 || self.oracle_n.is_multiple_of(2) {
            return Err(("oracle_n", format!("must be odd and at least 3, got {}", self.oracle_n)));
        }
        if self.scan_n < 2 {
            return Err(("scan_n", format!("must be at least 2, got {}", self.scan_n)));
        }
        if let Some(p0) = self.profile_p0 {
            if !(0.0..=1.0).contains(&p0) {
                return Err(("profile_p0", format!("must lie in [0, 1], got {p0}")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> polarsolve_core::Result<ModelParams> {
        ModelParams::new(self.pi, self.beta, self.h)
    }

    pub fn cost_spec(&self) -> polarsolve_core::Result<CostSpec> {
        let function = match &self.cost {
            CostDescriptor::Quadratic { k } => CostFunction::quadratic(*k)?,
            CostDescriptor::Custom { values } => {
                CostFunction::Custom(TabulatedCost::from_values(values.clone())?)
            }
        };
        CostSpec::new(function, self.h)
    }

    /// One config per point of the sweep grid, in row-major order over the
    /// axes sorted as in [`Axis::ALL`].
    pub fn combinations(&self) -> Vec<ExperimentConfig> {
        let mut out = vec![self.clone()];
        for (axis, values) in &self.sweep_axes {
            out = out
                .into_iter()
                .flat_map(|base| {
                    values.iter().map(move |&v| {
                        let mut c = base.clone();
                        c.set_axis(*axis, v);
                        c
                    })
                })
                .collect();
        }
        for c in &mut out {
            c.experiment = self.sweep_target.unwrap_or(self.experiment);
            c.sweep_axes.clear();
            c.sweep_target = None;
        }
        out
    }

    fn set_axis(&mut self, axis: Axis, v: f64) {
        match axis {
            Axis::K => self.cost = CostDescriptor::Quadratic { k: v },
            Axis::Pi => self.pi = v,
            Axis::Beta => self.beta = v,
            Axis::H => self.h = v,
            Axis::GridN => self.grid_n = v as usize,
            Axis::Horizon => self.horizon = v as usize,
        }
    }

    pub fn axis_value(&self, axis: Axis) -> f64 {
        match axis {
            Axis::K => match self.cost {
                CostDescriptor::Quadratic { k } => k,
                CostDescriptor::Custom { .. } => f64::NAN,
            },
            Axis::Pi => self.pi,
            Axis::Beta => self.beta,
            Axis::H => self.h,
            Axis::GridN => self.grid_n as f64,
            Axis::Horizon => self.horizon as f64,
        }
    }

    /// Resolved settings as a JSON object for the run manifest.
    pub fn echo(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("experiment".into(), self.experiment.name().into());
        if let Some(d) = &self.description {
            m.insert("description".into(), d.clone().into());
        }
        m.insert("pi".into(), self.pi.into());
        m.insert("beta".into(), self.beta.into());
        m.insert("H".into(), self.h.into());
        match &self.cost {
            CostDescriptor::Quadratic { k } => {
                m.insert("cost".into(), "quadratic".into());
                m.insert("k".into(), (*k).into());
            }
            CostDescriptor::Custom { values } => {
                m.insert("cost".into(), "custom".into());
                m.insert("cost_table".into(), values.clone().into());
            }
        }
        m.insert("grid_n".into(), self.grid_n.into());
        m.insert("horizon".into(), self.horizon.into());
        m.insert("tol".into(), self.tol.into());
        m.insert("max_iter".into(), self.max_iter.into());
        m.insert("oracle_n".into(), self.oracle_n.into());
        m.insert("scan_n".into(), self.scan_n.into());
        if let Some(p0) = self.profile_p0 {
            m.insert("profile_p0".into(), p0.into());
        }
        if let Some(t) = self.sweep_target {
            m.insert("sweep_target".into(), t.name().into());
            let axes: serde_json::Map<String, serde_json::Value> = self
                .sweep_axes
                .iter()
                .map(|(a, v)| (a.key().to_string(), v.clone().into()))
                .collect();
            m.insert("sweep".into(), axes.into());
            m.insert("sweep_cap".into(), self.sweep_cap.into());
        }
        serde_json::Value::Object(m)
    }
}
