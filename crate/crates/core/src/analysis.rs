//! Revival detection, peak extraction and prediction-vs-measurement reports.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Regime, RevivalPrediction};
use crate::error::{Error, Result};
use crate::model::ChainModel;
use crate::propagate::PropagationResult;

pub const DEFAULT_THRESHOLD: f64 = 0.99;

/// A refined local maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub time: f64,
    pub value: f64,
}

/// Vertex of the parabola through three samples, clamped to the bracket.
pub fn refine_quadratic(t: [f64; 3], y: [f64; 3]) -> Peak {
    let (x0, x1, x2) = (t[0], t[1], t[2]);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 || !den.is_finite() {
        return Peak { time: x1, value: y1 };
    }
    let xv = (x1 - 0.5 * num / den).clamp(x0, x2);
    let l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    Peak {
        time: xv,
        value: y0 * l0 + y1 * l1 + y2 * l2,
    }
}

/// Interior local maxima of a sampled series, refined quadratically.
pub fn local_maxima(times: &[f64], values: &[f64]) -> Vec<Peak> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
            b >= a && b >= c && (b > a || b > c)
        })
        .map(|i| {
            refine_quadratic(
                [times[i - 1], times[i], times[i + 1]],
                [values[i - 1], values[i], values[i + 1]],
            )
        })
        .collect()
}

fn check_series(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::invalid("series", "times and values differ in length"));
    }
    if times.len() < 3 {
        return Err(Error::ShortSeries {
            needed: 3,
            got: times.len(),
        });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("series", "times must be strictly increasing"));
    }
    Ok(())
}

/// Revival peaks: local maxima of the survival probability at or above
/// `threshold`, at least `min_gap` apart (the higher one wins a clash).
pub fn detect_revival_peaks(times: &[f64], survival: &[f64], threshold: f64, min_gap: f64) -> Result<Vec<Peak>> {
    check_series(times, survival)?;
    if !(threshold > 0.5 && threshold < 1.0) {
        return Err(Error::invalid(
            "threshold",
            format!("must lie in (0.5, 1), got {threshold}"),
        ));
    }
    if !(min_gap > 0.0) {
        return Err(Error::invalid("min_gap", "must be positive"));
    }
    let mut out: Vec<Peak> = Vec::new();
    for p in local_maxima(times, survival) {
        if p.value < threshold {
            continue;
        }
        match out.last_mut() {
            Some(last) if p.time - last.time < min_gap => {
                if p.value > last.value {
                    *last = p;
                }
            }
            _ => out.push(p),
        }
    }
    Ok(out)
}

pub fn detect_revivals(times: &[f64], survival: &[f64], threshold: f64, min_gap: f64) -> Result<Vec<f64>> {
    Ok(detect_revival_peaks(times, survival, threshold, min_gap)?
        .into_iter()
        .map(|p| p.time)
        .collect())
}

/// Interior maximum of `p_n(t)`; among equally high maxima the earliest
/// is reported.
pub fn measure_peaks(result: &PropagationResult, n: u32) -> Result<Peak> {
    if n == 0 {
        return Err(Error::invalid("n", "peak measurement needs n >= 1"));
    }
    let index = n as i64;
    if index > result.cutoff_used as i64 {
        return Err(Error::IndexOutOfRange { index: n as usize });
    }
    let series = result.series(index);
    check_series(&result.times, &series)?;
    let maxima = local_maxima(&result.times, &series);
    let (edge_idx, edge_val) = series
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &v)| (i, v))
        .unwrap();
    let best = maxima.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    if maxima.is_empty() || (edge_idx == 0 || edge_idx + 1 == series.len()) && edge_val > best {
        return Err(Error::BoundaryMaximum {
            t: result.times[edge_idx],
        });
    }
    let cut = best - 1e-9 * best.abs();
    Ok(*maxima.iter().find(|p| p.value >= cut).unwrap())
}

/// Revival period of the survival probability for any model.
pub fn predicted_revival(model: &ChainModel) -> RevivalPrediction {
    match *model {
        ChainModel::ParametricTwoMode { g, delta } => {
            analytic::revival_period_parametric(g, delta).unwrap_or(RevivalPrediction {
                period: None,
                regime: Regime::Continuum,
            })
        }
        ChainModel::DrivenOscillator { delta, .. } | ChainModel::UniformChain { delta, .. } => {
            if delta == 0.0 {
                RevivalPrediction {
                    period: None,
                    regime: Regime::Continuum,
                }
            } else {
                RevivalPrediction {
                    period: Some(2.0 * PI / delta.abs()),
                    regime: Regime::Discrete,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RevivalVerdict {
    RevivalConfirmed,
    NoRevival,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalReport {
    pub predicted_period: Option<f64>,
    pub regime: Regime,
    pub detected_times: Vec<f64>,
    pub detected_values: Vec<f64>,
    pub threshold: f64,
    /// Largest |detected − predicted| revival time; `None` unless both exist.
    pub max_discrepancy: Option<f64>,
    /// Mean gap between consecutive detections.
    pub detected_period: Option<f64>,
    pub verdict: RevivalVerdict,
    pub note: Option<String>,
}

/// Confronts the predicted revival period with the survival probability
/// of a propagation.
pub fn build_report(model: &ChainModel, result: &PropagationResult, threshold: f64) -> Result<RevivalReport> {
    let times = &result.times;
    let survival = result.series(0);
    check_series(times, &survival)?;
    let prediction = predicted_revival(model);
    let span = times[times.len() - 1] - times[0];
    let step = span / (times.len() - 1) as f64;
    if let Some(p) = prediction.period {
        if span < 2.0 * p {
            return Err(Error::InsufficientSpan { span, period: p });
        }
    }
    let min_gap = prediction.period.map_or(10.0 * step, |p| p / 2.0);
    let peaks = detect_revival_peaks(times, &survival, threshold, min_gap)?;
    let detected_times: Vec<f64> = peaks.iter().map(|p| p.time).collect();

    let detected_period = (detected_times.len() >= 2)
        .then(|| (detected_times[detected_times.len() - 1] - detected_times[0]) / (detected_times.len() - 1) as f64);

    let (verdict, max_discrepancy) = match prediction.period {
        Some(period) => {
            let last = times[times.len() - 1] - step;
            let tol = (2.0 * step).max(1e-3 * period);
            let mut worst: f64 = 0.0;
            let mut all_found = true;
            let mut k = 1;
            while times[0] + k as f64 * period <= last {
                let target = times[0] + k as f64 * period;
                let nearest = detected_times
                    .iter()
                    .map(|t| (t - target).abs())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(nearest);
                all_found &= nearest <= tol;
                k += 1;
            }
            let disc = (!detected_times.is_empty()).then_some(worst);
            if all_found && k > 1 {
                (RevivalVerdict::RevivalConfirmed, disc)
            } else {
                (RevivalVerdict::Inconclusive, disc)
            }
        }
        None if detected_times.is_empty() => (RevivalVerdict::NoRevival, None),
        None => (RevivalVerdict::Inconclusive, None),
    };

    let note = match (model, prediction.regime) {
        (ChainModel::ParametricTwoMode { .. }, Regime::Critical) => {
            Some("critical detuning: algebraic decay |Gamma3| = 1/(1 + |G|^2 t^2)".to_string())
        }
        (ChainModel::ParametricTwoMode { .. }, Regime::Continuum) => {
            Some("continuum regime: exponential decay of the survival probability".to_string())
        }
        (_, Regime::Continuum) => Some("zero detuning: continuum spectrum, no revival".to_string()),
        _ => None,
    };

    Ok(RevivalReport {
        predicted_period: prediction.period,
        regime: prediction.regime,
        detected_values: peaks.iter().map(|p| p.value).collect(),
        detected_times,
        threshold,
        max_discrepancy,
        detected_period,
        verdict,
        note,
    })
}
