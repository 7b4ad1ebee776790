//! Spectra of the truncated Hamiltonians and the continuum-vs-discrete
//! diagnostic based on cutoff convergence.

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Regime};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, ChainModel, Tridiagonal};

/// Eigenvalues whose shift under a cutoff change stays below this
/// (relative to `max(1, |e|)`) are flagged converged.
pub const CONVERGED_TOL: f64 = 1e-9;
/// Verdict thresholds of [`convergence_scan`].
pub const PIN_TOL: f64 = 1e-6;
pub const DRIFT_FRACTION: f64 = 1e-2;

const MAX_QL_ITERATIONS: usize = 60;

/// Real symmetric tridiagonal matrix unitarily equivalent to a Hermitian
/// one, with the diagonal gauge that connects them.
#[derive(Debug, Clone, PartialEq)]
pub struct Rephased {
    pub diag: Vec<f64>,
    /// Non-negative off-diagonal `|H[k+1][k]|`.
    pub off: Vec<f64>,
    /// `θ_k` with `D = diag(e^{iθ_k})` and `D† H D` real.
    pub phases: Vec<f64>,
}

pub fn rephase(h: &Tridiagonal) -> Rephased {
    let mut phases = Vec::with_capacity(h.dim());
    let mut theta = 0.0;
    phases.push(theta);
    for s in &h.sub {
        theta += s.arg();
        phases.push(theta);
    }
    Rephased {
        diag: h.diag.clone(),
        off: h.sub.iter().map(|s| s.norm()).collect(),
        phases,
    }
}

/// All eigenvalues of a real symmetric tridiagonal matrix, ascending
/// (implicit QL with Wilkinson-type shifts).
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::invalid("off", "length must be one less than the diagonal"));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::invalid("matrix", "QL iteration failed to converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Eigenvalues of the truncated Hamiltonian.
pub fn truncated_eigenvalues(model: &ChainModel, cutoff: usize) -> Result<Vec<f64>> {
    let h = build_hamiltonian(model, cutoff)?;
    let r = rephase(&h);
    symmetric_tridiagonal_eigenvalues(&r.diag, &r.off)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub cutoff: usize,
    pub eigenvalues: Vec<f64>,
    pub converged_mask: Vec<bool>,
    pub spacings: Vec<f64>,
}

impl SpectrumResult {
    pub fn converged_count(&self) -> usize {
        self.converged_mask.iter().filter(|&&c| c).count()
    }
}

/// Cutoff used as the convergence reference for `cutoff`.
pub fn reference_cutoff(cutoff: usize) -> usize {
    cutoff - (cutoff / 4).max(1)
}

/// Diagonalizes the truncation at `cutoff`. An eigenvalue counts as
/// converged when the same-rank eigenvalue at [`reference_cutoff`] agrees
/// within [`CONVERGED_TOL`].
pub fn diagonalize(model: &ChainModel, cutoff: usize) -> Result<SpectrumResult> {
    if cutoff < 2 {
        return Err(Error::DegenerateTruncation { min: 2, got: cutoff });
    }
    let (eigenvalues, reference) = std::thread::scope(|s| {
        let r = s.spawn(|| truncated_eigenvalues(model, reference_cutoff(cutoff)));
        let e = truncated_eigenvalues(model, cutoff);
        (e, r.join().expect("eigen solver thread panicked"))
    });
    let eigenvalues = eigenvalues?;
    let reference = reference?;
    let converged_mask = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, e)| {
            reference
                .get(i)
                .is_some_and(|r| (e - r).abs() <= CONVERGED_TOL * e.abs().max(1.0))
        })
        .collect();
    let spacings = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(SpectrumResult {
        cutoff,
        eigenvalues,
        converged_mask,
        spacings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralVerdict {
    Discrete,
    ContinuumLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceScan {
    pub cutoffs: Vec<usize>,
    /// Lowest `k` eigenvalues at each cutoff.
    pub lowest: Vec<Vec<f64>>,
    /// Largest change of the lowest `k` between the two largest cutoffs.
    pub max_drift: f64,
    pub scale: f64,
    pub pin_tol: f64,
    pub drift_threshold: f64,
    /// `None` when the drift falls between the two thresholds.
    pub verdict: Option<SpectralVerdict>,
}

/// Tracks the lowest `k` eigenvalues across increasing cutoffs.
pub fn convergence_scan(model: &ChainModel, cutoffs: &[usize], k: usize) -> Result<ConvergenceScan> {
    if cutoffs.len() < 3 {
        return Err(Error::invalid("cutoffs", "need at least 3 cutoffs"));
    }
    if k == 0 {
        return Err(Error::invalid("k", "must be positive"));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("cutoffs", "must be strictly increasing"));
    }
    if cutoffs[0] < k + 1 {
        return Err(Error::invalid(
            "cutoffs",
            format!("each cutoff must be >= k + 1 = {}", k + 1),
        ));
    }
    let spectra: Vec<Result<Vec<f64>>> = std::thread::scope(|s| {
        let handles: Vec<_> = cutoffs
            .iter()
            .map(|&c| s.spawn(move || truncated_eigenvalues(model, c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("eigen solver thread panicked"))
            .collect()
    });
    let lowest = spectra
        .into_iter()
        .map(|r| {
            r.map(|mut e| {
                e.truncate(k);
                e
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = &lowest[lowest.len() - 1];
    let prev = &lowest[lowest.len() - 2];
    let max_drift = last.iter().zip(prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = model.scale();
    let drift_threshold = DRIFT_FRACTION * scale;
    let verdict = if max_drift < PIN_TOL {
        Some(SpectralVerdict::Discrete)
    } else if max_drift > drift_threshold {
        Some(SpectralVerdict::ContinuumLike)
    } else {
        None
    };
    Ok(ConvergenceScan {
        cutoffs: cutoffs.to_vec(),
        lowest,
        max_drift,
        scale,
        pin_tol: PIN_TOL,
        drift_threshold,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingCheck {
    pub expected: f64,
    pub measured_mean: f64,
    pub max_dev: f64,
}

/// Ladder spacing the model should show in its discrete regime.
pub fn expected_spacing(model: &ChainModel) -> Result<f64> {
    match *model {
        ChainModel::ParametricTwoMode { g, delta } => {
            let g_abs = g.norm();
            if analytic::parametric_regime(g_abs, delta) != Regime::Discrete {
                return Err(Error::NoDiscreteLadder {
                    delta,
                    threshold: 2.0 * g_abs,
                });
            }
            Ok(2.0 * analytic::beta0_squared(g_abs, delta).sqrt())
        }
        ChainModel::DrivenOscillator { delta, .. } | ChainModel::UniformChain { delta, .. } => {
            if delta == 0.0 {
                Err(Error::ContinuumSpectrum)
            } else {
                Ok(delta.abs())
            }
        }
    }
}

/// Compares the spacings of the lowest run of converged eigenvalues with
/// the expected ladder spacing.
pub fn spacing_check(spec: &SpectrumResult, model: &ChainModel) -> Result<SpacingCheck> {
    let expected = expected_spacing(model)?;
    let start = spec.converged_mask.iter().position(|&c| c);
    let run: Vec<f64> = match start {
        Some(s) => spec.eigenvalues[s..]
            .iter()
            .zip(&spec.converged_mask[s..])
            .take_while(|(_, &c)| c)
            .map(|(&e, _)| e)
            .collect(),
        None => Vec::new(),
    };
    if run.len() < 3 {
        return Err(Error::TooFewConverged {
            converged: spec.converged_count(),
        });
    }
    let gaps: Vec<f64> = run.windows(2).map(|w| w[1] - w[0]).collect();
    let measured_mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let max_dev = gaps.iter().map(|g| (g - expected).abs()).fold(0.0, f64::max);
    Ok(SpacingCheck {
        expected,
        measured_mean,
        max_dev,
    })
}
