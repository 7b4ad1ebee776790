//! Flat `key = value` scenario configuration.
//!
//! The same grammar is used for config files, command-line overrides and the
//! run manifest, so a manifest can be fed back as a config.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;

use crate::model::{ChainModel, IonRamanParams};
use crate::propagate::{IntegratorConfig, DEFAULT_MAX_CUTOFF};

pub const MAX_CUTOFF_ENV: &str = "FOCKBLOCH_MAX_CUTOFF";

/// Keys a manifest records about a finished run. They are accepted and
/// ignored when a manifest is read back as a config.
pub const INFO_KEYS: &[&str] = &[
    "program",
    "version",
    "command",
    "units",
    "cutoff_used",
    "boundary_population",
    "final_drift",
    "steps_accepted",
    "steps_rejected",
    "wall_time_s",
    "regime",
    "predicted_period",
    "detected_period",
    "max_discrepancy",
    "verdict",
    "note",
    "max_drift",
    "drift_threshold",
    "pin_tol",
    "expected_spacing",
    "measured_spacing",
    "ion_delta_eff",
    "ion_eps_eff_abs",
    "ion_eps_eff_phase",
    "ion_period",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Parametric,
    Driven,
    Chain,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Parametric => "parametric",
            ModelKind::Driven => "driven",
            ModelKind::Chain => "chain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn extension(self) -> &'static str {
        self.name()
    }
}

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    Env,
    Line { source: String, line: usize },
    Flag(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::Env => write!(f, "environment {MAX_CUTOFF_ENV}"),
            Origin::Line { source, line } => write!(f, "{source}:{line}"),
            Origin::Flag(name) => write!(f, "flag --{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: Origin,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: field `{}`: {}", self.origin, self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelKind,
    pub g_abs: f64,
    pub g_phase: f64,
    pub eps_abs: f64,
    pub eps_phase: f64,
    pub beta: f64,
    pub two_sided: bool,
    pub delta: f64,
    pub t_max: f64,
    pub samples: usize,
    pub n: Vec<u32>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub leak_tol: f64,
    pub max_cutoff: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub cutoffs: Vec<usize>,
    pub levels: usize,
    pub threshold: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub nu: f64,
    pub e1_abs: f64,
    pub e1_phase: f64,
    pub e2_abs: f64,
    pub e2_phase: f64,
    pub kappa: f64,
    origins: HashMap<&'static str, Origin>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let integ = IntegratorConfig::new(Vec::new());
        ScenarioConfig {
            model: ModelKind::Parametric,
            g_abs: 1.0,
            g_phase: 0.0,
            eps_abs: 1.0,
            eps_phase: 0.0,
            beta: 1.0,
            two_sided: true,
            delta: 0.0,
            t_max: 4.0,
            samples: 401,
            n: vec![0, 1, 2, 3],
            rel_tol: integ.rel_tol,
            abs_tol: integ.abs_tol,
            leak_tol: integ.leak_tol,
            max_cutoff: DEFAULT_MAX_CUTOFF,
            format: Format::Csv,
            output: None,
            cutoffs: vec![100, 200, 400],
            levels: 10,
            threshold: crate::analysis::DEFAULT_THRESHOLD,
            omega1: 100.0,
            omega2: 98.9,
            nu: 1.0,
            e1_abs: 1.0,
            e1_phase: 0.0,
            e2_abs: 1.0,
            e2_phase: 0.0,
            kappa: 1.0,
            origins: HashMap::new(),
        }
    }
}

/// Every settable key, in manifest order.
pub const KEYS: &[&str] = &[
    "model",
    "g_abs",
    "g_phase",
    "eps_abs",
    "eps_phase",
    "beta",
    "two_sided",
    "delta",
    "t_max",
    "samples",
    "n",
    "rel_tol",
    "abs_tol",
    "leak_tol",
    "max_cutoff",
    "format",
    "output",
    "cutoffs",
    "levels",
    "threshold",
    "omega1",
    "omega2",
    "nu",
    "e1_abs",
    "e1_phase",
    "e2_abs",
    "e2_phase",
    "kappa",
];

fn parse_f64(value: &str) -> Result<f64, String> {
    let x: f64 = value.parse().map_err(|_| format!("expected a number, got `{value}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite, got `{value}`"))
    }
}

fn parse_usize(value: &str) -> Result<usize, String> {
    value
        .parse()
        .map_err(|_| format!("expected a non-negative integer, got `{value}`"))
}

fn parse_list<T>(value: &str, item: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if value.trim().is_empty() {
        return Err("empty list".into());
    }
    value.split(',').map(|s| item(s.trim())).collect()
}

fn parse_index(value: &str) -> Result<u32, String> {
    value
        .parse()
        .map_err(|_| format!("expected an index >= 0, got `{value}`"))
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{value}`")),
    }
}

/// Shortest representation that parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ScenarioConfig {
    /// Config with the truncation ceiling taken from the environment when
    /// set.
    pub fn from_env() -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        if let Ok(v) = std::env::var(MAX_CUTOFF_ENV) {
            cfg.set("max_cutoff", v.trim(), Origin::Env)?;
        }
        Ok(cfg)
    }

    /// Sets one key. Informational manifest keys are ignored.
    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if INFO_KEYS.contains(&key) {
            return Ok(());
        }
        let Some(&key) = KEYS.iter().find(|&&k| k == key) else {
            return Err(ConfigError {
                origin,
                field: key.to_string(),
                message: "unknown key".into(),
            });
        };
        let r: Result<(), String> = (|| {
            match key {
                "model" => {
                    self.model = match value {
                        "parametric" => ModelKind::Parametric,
                        "driven" => ModelKind::Driven,
                        "chain" => ModelKind::Chain,
                        _ => return Err(format!("expected parametric, driven or chain, got `{value}`")),
                    }
                }
                "g_abs" => self.g_abs = parse_f64(value)?,
                "g_phase" => self.g_phase = parse_f64(value)?,
                "eps_abs" => self.eps_abs = parse_f64(value)?,
                "eps_phase" => self.eps_phase = parse_f64(value)?,
                "beta" => self.beta = parse_f64(value)?,
                "two_sided" => self.two_sided = parse_bool(value)?,
                "delta" => self.delta = parse_f64(value)?,
                "t_max" => self.t_max = parse_f64(value)?,
                "samples" => self.samples = parse_usize(value)?,
                "n" => self.n = parse_list(value, parse_index)?,
                "rel_tol" => self.rel_tol = parse_f64(value)?,
                "abs_tol" => self.abs_tol = parse_f64(value)?,
                "leak_tol" => self.leak_tol = parse_f64(value)?,
                "max_cutoff" => self.max_cutoff = parse_usize(value)?,
                "format" => {
                    self.format = match value {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(format!("expected csv or json, got `{value}`")),
                    }
                }
                "output" => {
                    self.output = if value.is_empty() || value == "-" {
                        None
                    } else {
                        Some(PathBuf::from(value))
                    }
                }
                "cutoffs" => self.cutoffs = parse_list(value, parse_usize)?,
                "levels" => self.levels = parse_usize(value)?,
                "threshold" => self.threshold = parse_f64(value)?,
                "omega1" => self.omega1 = parse_f64(value)?,
                "omega2" => self.omega2 = parse_f64(value)?,
                "nu" => self.nu = parse_f64(value)?,
                "e1_abs" => self.e1_abs = parse_f64(value)?,
                "e1_phase" => self.e1_phase = parse_f64(value)?,
                "e2_abs" => self.e2_abs = parse_f64(value)?,
                "e2_phase" => self.e2_phase = parse_f64(value)?,
                "kappa" => self.kappa = parse_f64(value)?,
                _ => unreachable!("key list and match arms disagree"),
            }
            Ok(())
        })();
        match r {
            Ok(()) => {
                self.origins.insert(key, origin);
                Ok(())
            }
            Err(message) => Err(ConfigError {
                origin,
                field: key.to_string(),
                message,
            }),
        }
    }

    /// Applies a config text. `source` names the file in diagnostics.
    pub fn apply_text(&mut self, text: &str, source: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let origin = Origin::Line {
                source: source.to_string(),
                line: i + 1,
            };
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError {
                    origin,
                    field: line.to_string(),
                    message: "expected `key = value`".into(),
                });
            };
            self.set(key.trim(), value.trim(), origin)?;
        }
        Ok(())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_text(text, source)?;
        Ok(cfg)
    }

    /// Whether `key` was set explicitly (file, flag or environment).
    pub fn is_set(&self, key: &str) -> bool {
        self.origins.contains_key(key)
    }

    fn origin(&self, key: &'static str) -> Origin {
        self.origins.get(key).cloned().unwrap_or(Origin::Default)
    }

    fn fail(&self, key: &'static str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: self.origin(key),
            field: key.to_string(),
            message: message.into(),
        }
    }

    /// The model described by the config.
    pub fn chain_model(&self) -> Result<ChainModel, ConfigError> {
        let built = match self.model {
            ModelKind::Parametric => {
                ChainModel::parametric(Complex64::from_polar(self.g_abs, self.g_phase), self.delta)
                    .map_err(|e| (if self.g_abs == 0.0 { "g_abs" } else { "delta" }, e))
            }
            ModelKind::Driven => ChainModel::driven(Complex64::from_polar(self.eps_abs, self.eps_phase), self.delta)
                .map_err(|e| (if self.eps_abs == 0.0 { "eps_abs" } else { "delta" }, e)),
            ModelKind::Chain => ChainModel::uniform_chain(self.beta, self.delta, self.two_sided)
                .map_err(|e| (if self.beta == 0.0 { "beta" } else { "delta" }, e)),
        };
        built.map_err(|(key, e)| self.fail(key, e.to_string()))
    }

    pub fn ion_params(&self) -> IonRamanParams {
        IonRamanParams {
            omega1: self.omega1,
            omega2: self.omega2,
            nu: self.nu,
            e1: Complex64::from_polar(self.e1_abs, self.e1_phase),
            e2: Complex64::from_polar(self.e2_abs, self.e2_phase),
            kappa: self.kappa,
        }
    }

    /// Checks the time window, index list and integrator settings.
    pub fn validate_run(&self) -> Result<(), ConfigError> {
        if !(self.t_max > 0.0) {
            return Err(self.fail("t_max", format!("must be > 0, got {}", self.t_max)));
        }
        if self.samples < 2 {
            return Err(self.fail("samples", format!("must be >= 2, got {}", self.samples)));
        }
        if self.n.is_empty() {
            return Err(self.fail("n", "at least one index required"));
        }
        if self.max_cutoff == 0 {
            return Err(self.fail("max_cutoff", "must be >= 1"));
        }
        for (key, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("leak_tol", self.leak_tol),
        ] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(self.fail(key, format!("must lie in (0, 1e-3), got {v}")));
            }
        }
        Ok(())
    }

    pub fn validate_threshold(&self) -> Result<(), ConfigError> {
        if !(self.threshold > 0.5 && self.threshold < 1.0) {
            return Err(self.fail("threshold", format!("must lie in (0.5, 1), got {}", self.threshold)));
        }
        Ok(())
    }

    pub fn validate_spectrum(&self) -> Result<(), ConfigError> {
        if self.levels == 0 {
            return Err(self.fail("levels", "must be >= 1"));
        }
        if self.cutoffs.len() < 3 {
            return Err(self.fail("cutoffs", "need at least 3 cutoffs"));
        }
        if self.cutoffs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(self.fail("cutoffs", "must be strictly increasing"));
        }
        if self.cutoffs[0] < self.levels + 1 {
            return Err(self.fail(
                "cutoffs",
                format!("each cutoff must be >= levels + 1 = {}", self.levels + 1),
            ));
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let mut cfg = IntegratorConfig::uniform(self.t_max, self.samples);
        cfg.rel_tol = self.rel_tol;
        cfg.abs_tol = self.abs_tol;
        cfg.leak_tol = self.leak_tol;
        cfg.max_cutoff = self.max_cutoff;
        cfg
    }

    /// The settable keys relevant to this config, as manifest lines.
    pub fn manifest_pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push("model", self.model.name().to_string());
        match self.model {
            ModelKind::Parametric => {
                push("g_abs", num(self.g_abs));
                push("g_phase", num(self.g_phase));
            }
            ModelKind::Driven => {
                push("eps_abs", num(self.eps_abs));
                push("eps_phase", num(self.eps_phase));
            }
            ModelKind::Chain => {
                push("beta", num(self.beta));
                push("two_sided", self.two_sided.to_string());
            }
        }
        push("delta", num(self.delta));
        push("t_max", num(self.t_max));
        push("samples", self.samples.to_string());
        push("n", join(&self.n));
        push("rel_tol", num(self.rel_tol));
        push("abs_tol", num(self.abs_tol));
        push("leak_tol", num(self.leak_tol));
        push("max_cutoff", self.max_cutoff.to_string());
        push("cutoffs", join(&self.cutoffs));
        push("levels", self.levels.to_string());
        push("threshold", num(self.threshold));
        push("format", self.format.name().to_string());
        push(
            "output",
            self.output
                .as_ref()
                .map_or_else(|| "-".to_string(), |p| p.display().to_string()),
        );
        out
    }

    pub fn ion_manifest_pairs(&self) -> Vec<(String, String)> {
        [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("nu", self.nu),
            ("e1_abs", self.e1_abs),
            ("e1_phase", self.e1_phase),
            ("e2_abs", self.e2_abs),
            ("e2_phase", self.e2_phase),
            ("kappa", self.kappa),
        ]
        .iter()
        .map(|(k, v)| (k.to_string(), num(*v)))
        .collect()
    }
}
