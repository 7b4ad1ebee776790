//! Numerical propagation of the truncated chain with adaptive truncation.
//!
//! The truncation is a hard wall. Whenever the population on the outermost
//! retained sites exceeds `leak_tol` the run is restarted on a window of
//! twice the size, up to `max_cutoff`.

use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, Regime};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, initial_vacuum, ChainModel, StateVector};
use crate::ode::{Dopri5, Halt, StepStats};

/// Number of outermost sites per open edge whose population is monitored.
pub const EDGE_WIDTH: usize = 2;

pub const DEFAULT_MAX_CUTOFF: usize = 4096;

const MAX_STEPS: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub leak_tol: f64,
    pub max_cutoff: usize,
    pub sample_times: Vec<f64>,
}

impl IntegratorConfig {
    pub fn new(sample_times: Vec<f64>) -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            leak_tol: 1e-10,
            max_cutoff: DEFAULT_MAX_CUTOFF,
            sample_times,
        }
    }

    /// `samples` equally spaced points on `[0, t_max]`.
    pub fn uniform(t_max: f64, samples: usize) -> Self {
        Self::new(uniform_grid(t_max, samples))
    }

    pub fn t_max(&self) -> f64 {
        self.sample_times.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("leak_tol", self.leak_tol),
        ] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(Error::invalid(name, format!("must lie in (0, 1e-3), got {v}")));
            }
        }
        if self.max_cutoff == 0 {
            return Err(Error::DegenerateTruncation { min: 1, got: 0 });
        }
        let Some(&first) = self.sample_times.first() else {
            return Err(Error::invalid("sample_times", "at least one sample time required"));
        };
        if !(first >= 0.0) {
            return Err(Error::invalid("sample_times", "must start at t >= 0"));
        }
        if self.sample_times.iter().any(|t| !t.is_finite()) || self.sample_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("sample_times", "must be finite and strictly increasing"));
        }
        Ok(())
    }
}

pub fn uniform_grid(t_max: f64, samples: usize) -> Vec<f64> {
    if samples < 2 {
        return vec![t_max];
    }
    let step = t_max / (samples - 1) as f64;
    (0..samples)
        .map(|k| if k + 1 == samples { t_max } else { k as f64 * step })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    /// `distributions[k][j]` is `p` at `times[k]` for site `base_index + j`.
    pub distributions: Vec<Vec<f64>>,
    /// `1 − Σ p` at each sample time.
    pub norm_leak: Vec<f64>,
    pub cutoff_used: usize,
    pub base_index: i64,
    /// Largest edge population seen over accepted steps.
    pub boundary_population: f64,
    pub final_state: StateVector,
    pub stats: StepStats,
}

impl PropagationResult {
    /// `p` at sample `time_idx` for physical index `index` (zero outside
    /// the retained window).
    pub fn probability(&self, time_idx: usize, index: i64) -> f64 {
        let local = index - self.base_index;
        if local < 0 {
            return 0.0;
        }
        self.distributions[time_idx].get(local as usize).copied().unwrap_or(0.0)
    }

    /// Time series of `p` for one index.
    pub fn series(&self, index: i64) -> Vec<f64> {
        (0..self.times.len()).map(|k| self.probability(k, index)).collect()
    }

    pub fn final_drift(&self) -> f64 {
        self.norm_leak.last().map_or(0.0, |d| d.abs())
    }
}

fn edge_population(amps: &[Complex64], two_sided: bool) -> f64 {
    let n = amps.len();
    let w = EDGE_WIDTH.min(n);
    let mut pop: f64 = amps[n - w..].iter().map(|c| c.norm_sqr()).sum();
    if two_sided {
        pop += amps[..w].iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    pop
}

struct Attempt {
    states: Vec<Vec<Complex64>>,
    stats: StepStats,
    boundary: f64,
}

fn run_fixed(
    model: &ChainModel,
    initial: &StateVector,
    cfg: &IntegratorConfig,
) -> Result<std::result::Result<Attempt, f64>> {
    let h = build_hamiltonian(model, initial.cutoff())?;
    let two_sided = model.is_two_sided();
    let radius = h.gershgorin_radius().max(1e-300);
    let solver = Dopri5 {
        rtol: cfg.rel_tol,
        atol: cfg.abs_tol,
        max_steps: MAX_STEPS,
        h0: 0.5 / radius,
    };
    let mut boundary: f64 = 0.0;
    let leak_tol = cfg.leak_tol;
    let r = solver.integrate(
        |_, y, dy| h.apply_minus_i(y, dy),
        0.0,
        initial.amplitudes(),
        &cfg.sample_times,
        |_, y| {
            let pop = edge_population(y, two_sided);
            boundary = boundary.max(pop);
            if pop > leak_tol {
                ControlFlow::Break(pop)
            } else {
                ControlFlow::Continue(())
            }
        },
    );
    match r {
        Ok((states, stats)) => Ok(Ok(Attempt {
            states,
            stats,
            boundary,
        })),
        Err(Halt::Observer(pop)) => Ok(Err(pop)),
        Err(Halt::Failed(e)) => Err(e),
    }
}

fn check_initial(model: &ChainModel, initial: &StateVector, cfg: &IntegratorConfig) -> Result<()> {
    model.validate()?;
    cfg.validate()?;
    if initial.base_index() != model.base_index(initial.cutoff()) {
        return Err(Error::invalid(
            "initial",
            format!(
                "window starts at {} but the model expects {}",
                initial.base_index(),
                model.base_index(initial.cutoff())
            ),
        ));
    }
    if initial.cutoff() > cfg.max_cutoff {
        return Err(Error::invalid(
            "initial",
            format!("cutoff {} exceeds max_cutoff {}", initial.cutoff(), cfg.max_cutoff),
        ));
    }
    let drift = (1.0 - initial.norm_sqr()).abs();
    if drift > cfg.leak_tol {
        return Err(Error::invalid(
            "initial",
            format!("state not normalized (|1 - norm²| = {drift:.3e})"),
        ));
    }
    Ok(())
}

/// Integrates `i dC/dt = H C` and records `|C_n|²` at every sample time.
///
/// The window is doubled whenever the edge population exceeds `leak_tol`.
pub fn propagate(model: &ChainModel, initial: &StateVector, cfg: &IntegratorConfig) -> Result<PropagationResult> {
    check_initial(model, initial, cfg)?;
    let mut state = initial.clone();
    loop {
        match run_fixed(model, &state, cfg)? {
            Ok(attempt) => return finish(model, cfg, &state, attempt),
            Err(pop) => {
                let cutoff = state.cutoff();
                if cutoff >= cfg.max_cutoff {
                    return Err(Error::TruncationInsufficient {
                        cutoff,
                        max_cutoff: cfg.max_cutoff,
                        boundary_population: pop,
                        leak_tol: cfg.leak_tol,
                    });
                }
                let wider = (2 * cutoff).min(cfg.max_cutoff);
                state = state.widened(wider, model.base_index(wider))?;
            }
        }
    }
}

fn finish(
    model: &ChainModel,
    cfg: &IntegratorConfig,
    state: &StateVector,
    attempt: Attempt,
) -> Result<PropagationResult> {
    let distributions: Vec<Vec<f64>> = attempt
        .states
        .iter()
        .map(|s| s.iter().map(|c| c.norm_sqr()).collect())
        .collect();
    let norm_leak: Vec<f64> = distributions.iter().map(|p| 1.0 - p.iter().sum::<f64>()).collect();
    let allowed = 10.0 * cfg.leak_tol;
    let drift = norm_leak.last().map_or(0.0, |d| d.abs());
    if drift > allowed {
        return Err(Error::NormDrift { drift, allowed });
    }
    let final_state = StateVector::new(
        attempt.states.last().cloned().unwrap_or_default(),
        state.cutoff(),
        model.base_index(state.cutoff()),
    )?;
    Ok(PropagationResult {
        times: cfg.sample_times.clone(),
        distributions,
        norm_leak,
        cutoff_used: state.cutoff(),
        base_index: state.base_index(),
        boundary_population: attempt.boundary,
        final_state,
        stats: attempt.stats,
    })
}

/// Propagates the vacuum (site-0 excitation) starting from the analytic
/// cutoff estimate.
pub fn propagate_vacuum(model: &ChainModel, cfg: &IntegratorConfig) -> Result<PropagationResult> {
    cfg.validate()?;
    let seed = seed_cutoff(model, cfg.t_max(), cfg.leak_tol).clamp(1, cfg.max_cutoff);
    let initial = initial_vacuum(seed, model.base_index(seed))?;
    propagate(model, &initial, cfg)
}

fn geometric_tail_cutoff(mean: f64, leak_tol: f64) -> usize {
    if mean <= 0.0 {
        return 1;
    }
    // P(n > N) = r^(N+1) with r = m/(1+m)
    let r = mean / (1.0 + mean);
    let n = (leak_tol.ln() / r.ln()).ceil();
    if n.is_finite() {
        n.max(1.0) as usize
    } else {
        usize::MAX / 4
    }
}

fn poisson_tail_cutoff(mean: f64, leak_tol: f64) -> usize {
    if mean <= 0.0 {
        return 1;
    }
    let limit = (mean + 40.0 * mean.sqrt() + 100.0) as usize;
    for n in (mean.floor() as usize)..=limit {
        // P(k > n) <= p(n+1) / (1 - m/(n+2))
        let next = analytic::poisson(mean, n as u32 + 1);
        let bound = next / (1.0 - mean / (n as f64 + 2.0));
        if bound < leak_tol {
            return n.max(1);
        }
    }
    limit
}

/// Analytic estimate of the cutoff for a vacuum start.
///
/// Where the population stays bounded (detuned driving, discrete parametric
/// regime) the wave reflected off the wall returns coherently and perturbs
/// `p_n` at amplitude level, so the tail is cut at `leak_tol²` instead of
/// `leak_tol`.
pub fn seed_cutoff(model: &ChainModel, t_max: f64, leak_tol: f64) -> usize {
    let t_max = t_max.max(0.0);
    let tail = match *model {
        ChainModel::ParametricTwoMode { g, delta } => {
            let g_abs = g.norm();
            match analytic::parametric_regime(g_abs, delta) {
                Regime::Discrete => {
                    let beta0 = analytic::beta0_squared(g_abs, delta).sqrt();
                    let mean = if beta0 * t_max >= std::f64::consts::FRAC_PI_2 {
                        (g_abs / beta0).powi(2)
                    } else {
                        analytic::mean_pairs_detuned(g_abs, delta, t_max)
                    };
                    geometric_tail_cutoff(mean, leak_tol * leak_tol)
                }
                _ => geometric_tail_cutoff(analytic::mean_pairs_detuned(g_abs, delta, t_max), leak_tol),
            }
        }
        ChainModel::DrivenOscillator { epsilon, delta } => {
            let mean = if delta != 0.0 && delta.abs() * t_max >= std::f64::consts::PI {
                (2.0 * epsilon.norm() / delta).powi(2)
            } else {
                analytic::coherent_amplitude(epsilon, delta, t_max).0.norm_sqr()
            };
            poisson_tail_cutoff(mean, leak_tol * leak_tol)
        }
        ChainModel::UniformChain { beta, delta, .. } => {
            let ballistic = 2.0 * beta.abs() * t_max;
            let reach = if delta != 0.0 {
                ballistic.min(4.0 * beta.abs() / delta.abs())
            } else {
                ballistic
            };
            reach.ceil() as usize + 20
        }
    };
    tail.saturating_add(EDGE_WIDTH + 2)
}

/// Smallest cutoff for which a vacuum start propagated to `t_max` keeps the
/// edge population below `leak_tol` at every accepted step.
///
/// The analytic seed is doubled (or halved) until it brackets the answer,
/// then bisected.
pub fn adaptive_cutoff(model: &ChainModel, t_max: f64, leak_tol: f64, max_cutoff: usize) -> Result<usize> {
    model.validate()?;
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::invalid("t_max", "must be finite and >= 0"));
    }
    let mut cfg = IntegratorConfig::new(vec![t_max]);
    cfg.leak_tol = leak_tol;
    cfg.max_cutoff = max_cutoff;
    cfg.validate()?;

    let holds = |cutoff: usize| -> Result<std::result::Result<(), f64>> {
        let initial = initial_vacuum(cutoff, model.base_index(cutoff))?;
        Ok(run_fixed(model, &initial, &cfg)?.map(|_| ()))
    };

    let seed = seed_cutoff(model, t_max, leak_tol).clamp(1, max_cutoff);
    let (mut lo, mut hi);
    match holds(seed)? {
        Ok(()) => {
            hi = seed;
            lo = 0;
            let mut probe = seed / 2;
            while probe >= 1 {
                if holds(probe)?.is_ok() {
                    hi = probe;
                    probe /= 2;
                } else {
                    lo = probe;
                    break;
                }
            }
        }
        Err(mut pop) => {
            lo = seed;
            loop {
                if lo >= max_cutoff {
                    return Err(Error::TruncationInsufficient {
                        cutoff: lo,
                        max_cutoff,
                        boundary_population: pop,
                        leak_tol,
                    });
                }
                let probe = (2 * lo).min(max_cutoff);
                match holds(probe)? {
                    Ok(()) => {
                        hi = probe;
                        break;
                    }
                    Err(p) => {
                        pop = p;
                        lo = probe;
                    }
                }
            }
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)?.is_ok() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub survival: f64,
    pub mean_n: f64,
    pub entropy: f64,
}

/// Survival `p_0`, mean index `Σ n p_n` and Shannon entropy `−Σ p ln p`
/// at every sample time.
pub fn observables(result: &PropagationResult) -> Vec<Observables> {
    result
        .distributions
        .iter()
        .map(|p| {
            let mut mean_n = 0.0;
            let mut entropy = 0.0;
            for (j, &pj) in p.iter().enumerate() {
                let n = (result.base_index + j as i64) as f64;
                mean_n += n * pj;
                if pj > 0.0 {
                    entropy -= pj * pj.ln();
                }
            }
            let survival = p.get((-result.base_index) as usize).copied().unwrap_or(0.0);
            Observables {
                survival,
                mean_n,
                entropy,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::uniform(1.0, 10).validate().is_ok());
        let mut cfg = IntegratorConfig::uniform(1.0, 10);
        cfg.rel_tol = 1e-2;
        assert!(cfg.validate().is_err());
        let cfg = IntegratorConfig::new(vec![0.0, 1.0, 1.0]);
        assert!(cfg.validate().is_err());
        let cfg = IntegratorConfig::new(vec![-1.0, 1.0]);
        assert!(cfg.validate().is_err());
        assert!(IntegratorConfig::new(vec![]).validate().is_err());
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(4.0, 201);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], 4.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn resonant_parametric_survival_at_unit_time() {
        let m = ChainModel::parametric(c(1.0), 0.0).unwrap();
        let r = propagate_vacuum(&m, &IntegratorConfig::new(vec![1.0])).unwrap();
        assert_abs_diff_eq!(r.probability(0, 0), 0.4199743, epsilon = 1e-7);
        assert_abs_diff_eq!(
            r.probability(0, 0),
            analytic::p0_resonant_parametric(1.0, 1.0),
            epsilon = 1e-8
        );
    }

    #[test]
    fn driven_revival() {
        let m = ChainModel::driven(c(1.0), 2.0).unwrap();
        let r = propagate_vacuum(&m, &IntegratorConfig::new(vec![PI])).unwrap();
        assert_abs_diff_eq!(r.probability(0, 0), 1.0, epsilon = 1e-8);
        let obs = observables(&r);
        assert_abs_diff_eq!(obs[0].entropy, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn observables_at_start() {
        for m in [
            ChainModel::parametric(c(1.0), 0.5).unwrap(),
            ChainModel::driven(c(1.0), 0.0).unwrap(),
            ChainModel::uniform_chain(1.0, 0.0, true).unwrap(),
        ] {
            let r = propagate_vacuum(&m, &IntegratorConfig::new(vec![0.0, 0.5])).unwrap();
            let o = observables(&r)[0];
            assert_eq!(o.survival, 1.0);
            assert_eq!(o.mean_n, 0.0);
            assert_eq!(o.entropy, 0.0);
        }
    }

    #[test]
    fn escalation_widens_window() {
        let m = ChainModel::parametric(c(1.0), 0.0).unwrap();
        let initial = initial_vacuum(2, 0).unwrap();
        let r = propagate(&m, &initial, &IntegratorConfig::new(vec![1.0])).unwrap();
        assert!(r.cutoff_used >= 32, "cutoff {}", r.cutoff_used);
        assert!(r.boundary_population <= 1e-10);
        assert_abs_diff_eq!(r.probability(0, 0), 0.4199743, epsilon = 1e-7);
    }

    #[test]
    fn truncation_failure_reports_boundary() {
        let m = ChainModel::parametric(c(1.0), 0.0).unwrap();
        let mut cfg = IntegratorConfig::new(vec![3.0]);
        cfg.max_cutoff = 16;
        let err = propagate_vacuum(&m, &cfg).unwrap_err();
        match err {
            Error::TruncationInsufficient {
                cutoff,
                boundary_population,
                ..
            } => {
                assert_eq!(cutoff, 16);
                assert!(boundary_population > 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_initial_state() {
        let m = ChainModel::driven(c(1.0), 1.0).unwrap();
        let cfg = IntegratorConfig::new(vec![1.0]);
        let amps = vec![c(0.5), c(0.5), c(0.0)];
        let s = StateVector::new(amps, 2, 0).unwrap();
        assert!(propagate(&m, &s, &cfg).is_err());
        let chain = ChainModel::uniform_chain(1.0, 0.0, true).unwrap();
        assert!(propagate(&chain, &initial_vacuum(3, 0).unwrap(), &cfg).is_err());
        let mut small = cfg.clone();
        small.max_cutoff = 2;
        assert!(propagate(&m, &initial_vacuum(3, 0).unwrap(), &small).is_err());
    }

    #[test]
    fn seeds_are_sensible() {
        let driven = ChainModel::driven(c(1.0), 2.0).unwrap();
        let s = seed_cutoff(&driven, 100.0, 1e-10);
        assert!((10..=40).contains(&s), "seed {s}");
        let res = ChainModel::parametric(c(1.0), 0.0).unwrap();
        assert!(seed_cutoff(&res, 5.0, 1e-10) > 4096);
    }
}
