//! The subcommands as library calls returning tables and manifests.

use std::fmt;
use std::time::Instant;

use crate::analysis::build_report;
use crate::analytic::{self, map_raman_to_effective, Regime};
use crate::error::Error;
use crate::model::ChainModel;
use crate::propagate::{observables, propagate_vacuum, PropagationResult};
use crate::spectrum::{convergence_scan, diagonalize, spacing_check, SpectralVerdict};

use super::config::{num, ConfigError, ModelKind, Origin, ScenarioConfig};
use super::output::{Manifest, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Truncation(Error),
    Run(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Truncation(_) => EXIT_TRUNCATION,
            CliError::Run(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "invalid config: {e}"),
            CliError::Truncation(e) => write!(f, "{e}"),
            CliError::Run(e) => write!(f, "run failed: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn classify(e: Error) -> CliError {
    match e {
        Error::TruncationInsufficient { .. } => CliError::Truncation(e),
        Error::InvalidParameter { name, reason } => CliError::Config(ConfigError {
            origin: Origin::Default,
            field: name.to_string(),
            message: reason,
        }),
        other => CliError::Run(other),
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub manifest: Manifest,
    /// Human-readable notes for stderr (never part of the table).
    pub messages: Vec<String>,
}

fn header(command: &str, cfg: &ScenarioConfig, model: &ChainModel) -> Manifest {
    let mut m = Manifest::default();
    m.push("program", env!("CARGO_PKG_NAME"));
    m.push("version", env!("CARGO_PKG_VERSION"));
    m.push("command", command);
    m.push(
        "units",
        format!("hbar=1; t in units of {} at unit coupling", model.time_unit()),
    );
    m.extend(cfg.manifest_pairs());
    m
}

fn preamble(command: &str, model: &ChainModel) -> Vec<String> {
    let unit = model.time_unit();
    let dimensionless = match model {
        ChainModel::ParametricTwoMode { .. } => "|G|t",
        ChainModel::DrivenOscillator { .. } => "|epsilon|t",
        ChainModel::UniformChain { .. } => "beta t",
    };
    vec![
        format!("fockbloch {command}: {model:?}"),
        format!(
            "hbar = 1; t is in units of {unit} when the coupling is 1 (dimensionless time {dimensionless} = {} * t)",
            num(model.coupling())
        ),
    ]
}

fn propagate_config(cfg: &ScenarioConfig) -> Result<(ChainModel, PropagationResult, f64), CliError> {
    cfg.validate_run()?;
    let model = cfg.chain_model()?;
    let start = Instant::now();
    let result = propagate_vacuum(&model, &cfg.integrator()).map_err(classify)?;
    Ok((model, result, start.elapsed().as_secs_f64()))
}

fn push_run_stats(m: &mut Manifest, result: &PropagationResult, wall: f64) {
    m.push("cutoff_used", result.cutoff_used.to_string());
    m.push("boundary_population", num(result.boundary_population));
    m.push("final_drift", num(result.final_drift()));
    m.push("steps_accepted", result.stats.accepted.to_string());
    m.push("steps_rejected", result.stats.rejected.to_string());
    m.push("wall_time_s", num(wall));
}

/// Time series `t, p_n…, survival, mean_n, norm_leak` for the vacuum start.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let (model, result, wall) = propagate_config(cfg)?;
    let obs = observables(&result);
    let mut table = Table::new(preamble("simulate", &model));
    table.push("t", result.times.clone());
    for &n in &cfg.n {
        table.push(format!("p{n}"), result.series(n as i64));
    }
    table.push("survival", obs.iter().map(|o| o.survival).collect());
    table.push("mean_n", obs.iter().map(|o| o.mean_n).collect());
    table.push("norm_leak", result.norm_leak.clone());

    let mut manifest = header("simulate", cfg, &model);
    push_run_stats(&mut manifest, &result, wall);
    Ok(RunOutput {
        table,
        manifest,
        messages: Vec::new(),
    })
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Discrete => "discrete",
        Regime::Critical => "critical",
        Regime::Continuum => "continuum",
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), num)
}

/// Detected revivals of the survival probability against the prediction.
pub fn run_revivals(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    cfg.validate_threshold()?;
    let (model, result, wall) = propagate_config(cfg)?;
    let report = build_report(&model, &result, cfg.threshold).map_err(|e| match e {
        Error::InsufficientSpan { span, period } => CliError::Config(ConfigError {
            origin: Origin::Default,
            field: "t_max".into(),
            message: format!("window {span} must cover two predicted periods ({period})"),
        }),
        other => classify(other),
    })?;

    let predicted: Vec<f64> = report
        .detected_times
        .iter()
        .map(|&t| report.predicted_period.map_or(f64::NAN, |p| (t / p).round() * p))
        .collect();
    let mut table = Table::new(preamble("revivals", &model));
    table.push("detected_time", report.detected_times.clone());
    table.push("survival", report.detected_values.clone());
    table.push("predicted_time", predicted.clone());
    table.push(
        "discrepancy",
        report
            .detected_times
            .iter()
            .zip(&predicted)
            .map(|(d, p)| (d - p).abs())
            .collect(),
    );

    let mut manifest = header("revivals", cfg, &model);
    push_run_stats(&mut manifest, &result, wall);
    manifest.push("regime", regime_name(report.regime));
    manifest.push("predicted_period", opt(report.predicted_period));
    manifest.push("detected_period", opt(report.detected_period));
    manifest.push("max_discrepancy", opt(report.max_discrepancy));
    manifest.push("verdict", format!("{:?}", report.verdict));
    let mut messages = vec![format!("verdict: {:?}", report.verdict)];
    if let Some(note) = &report.note {
        manifest.push("note", note.clone());
        messages.push(format!("note: {note}"));
    }
    Ok(RunOutput {
        table,
        manifest,
        messages,
    })
}

fn predicted_ladder(model: &ChainModel, levels: usize) -> Option<Vec<f64>> {
    match *model {
        ChainModel::ParametricTwoMode { g, delta } => analytic::eigenvalues_parametric(g, delta, 0, levels - 1).ok(),
        ChainModel::DrivenOscillator { epsilon, delta } => {
            analytic::eigenvalues_driven(epsilon, delta, levels - 1).ok()
        }
        ChainModel::UniformChain { .. } => None,
    }
}

/// Lowest eigenvalues across the configured cutoffs with the convergence
/// verdict.
pub fn run_spectrum(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    cfg.validate_spectrum()?;
    let model = cfg.chain_model()?;
    let start = Instant::now();
    let scan = convergence_scan(&model, &cfg.cutoffs, cfg.levels).map_err(classify)?;
    let largest = *cfg.cutoffs.last().expect("validated non-empty");
    let top = diagonalize(&model, largest).map_err(classify)?;
    let wall = start.elapsed().as_secs_f64();

    let k = cfg.levels;
    let mut table = Table::new(preamble("spectrum", &model));
    table.push("level", (0..k).map(|m| m as f64).collect());
    for (c, lowest) in scan.cutoffs.iter().zip(&scan.lowest) {
        table.push(format!("E_N{c}"), lowest.clone());
    }
    table.push(
        "converged",
        (0..k)
            .map(|m| {
                if top.converged_mask.get(m).copied().unwrap_or(false) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
    );
    let ladder = predicted_ladder(&model, k).unwrap_or_else(|| vec![f64::NAN; k]);
    table.push("predicted", ladder);

    let verdict = match scan.verdict {
        Some(SpectralVerdict::Discrete) => "Discrete",
        Some(SpectralVerdict::ContinuumLike) => "ContinuumLike",
        None => "withheld",
    };
    let mut manifest = header("spectrum", cfg, &model);
    manifest.push("verdict", verdict);
    manifest.push("max_drift", num(scan.max_drift));
    manifest.push("drift_threshold", num(scan.drift_threshold));
    manifest.push("pin_tol", num(scan.pin_tol));
    let spacing = spacing_check(&top, &model).ok();
    manifest.push("expected_spacing", opt(spacing.map(|s| s.expected)));
    manifest.push("measured_spacing", opt(spacing.map(|s| s.measured_mean)));
    manifest.push("wall_time_s", num(wall));
    Ok(RunOutput {
        table,
        manifest,
        messages: vec![format!("verdict: {verdict} (max drift {:.3e})", scan.max_drift)],
    })
}

/// Maps the Raman drive onto the driven oscillator and runs it.
///
/// Without an explicit `t_max` the window covers 2.25 predicted periods
/// (or `4/|ε|` for a resonant drive).
pub fn run_ion(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let params = cfg.ion_params();
    let eff = map_raman_to_effective(&params).map_err(classify)?;
    let ChainModel::DrivenOscillator { epsilon, delta } = eff.model else {
        unreachable!("the Raman mapping yields a driven oscillator")
    };
    let mut messages = vec![
        format!("effective detuning Delta = omega1 - omega2 - nu = {}", num(delta)),
        format!(
            "effective drive epsilon = {} (|epsilon| = {}, phase {})",
            epsilon,
            num(epsilon.norm()),
            num(epsilon.arg())
        ),
    ];
    match eff.revival_period() {
        Some(p) => messages.push(format!(
            "predicted ground-state revival period 2*pi/|Delta| = {}",
            num(p)
        )),
        None => messages.push(
            "warning: omega1 - omega2 = nu, resonant drive: no revival, p0 decays as exp(-|epsilon|^2 t^2)".to_string(),
        ),
    }

    let mut driven = cfg.clone();
    driven.model = ModelKind::Driven;
    driven.eps_abs = epsilon.norm();
    driven.eps_phase = epsilon.arg();
    driven.delta = delta;
    if !cfg.is_set("t_max") {
        driven.t_max = eff.revival_period().map_or(4.0 / epsilon.norm(), |p| 2.25 * p);
    }
    let mut out = run_scenario(&driven)?;
    out.manifest.entries[2].1 = "ion".into();
    out.manifest.extend(cfg.ion_manifest_pairs());
    out.manifest.push("ion_delta_eff", num(delta));
    out.manifest.push("ion_eps_eff_abs", num(epsilon.norm()));
    out.manifest.push("ion_eps_eff_phase", num(epsilon.arg()));
    out.manifest.push("ion_period", opt(eff.revival_period()));
    messages.append(&mut out.messages);
    out.messages = messages;
    Ok(out)
}
