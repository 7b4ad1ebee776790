//! Closed-form dynamics and spectra.
//!
//! Detuned parametric results are written through the even functions
//! `c(x²) = cos √(x²)` and `s(x²) = sin √(x²) / √(x²)` of `x² = β₀² t²`,
//! with `β₀² = Δ²/4 − |G|²` of either sign. For `x² < 0` they become
//! `cosh`/`sinh`, and near zero a Taylor series takes over, so one
//! formula covers the discrete, critical and continuum regimes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChainModel, IonRamanParams};

const SERIES_THRESHOLD: f64 = 1e-8;

/// Relative width of the band around `Δ = 2|G|` classified as critical.
pub const CRITICAL_REL_TOL: f64 = 1e-12;

/// `cos √(x²)` continued to negative arguments.
pub fn even_cos(x2: f64) -> f64 {
    if x2.abs() < SERIES_THRESHOLD {
        1.0 - x2 / 2.0 + x2 * x2 / 24.0
    } else if x2 > 0.0 {
        x2.sqrt().cos()
    } else {
        (-x2).sqrt().cosh()
    }
}

/// `sin √(x²) / √(x²)` continued to negative arguments.
pub fn even_sinc(x2: f64) -> f64 {
    if x2.abs() < SERIES_THRESHOLD {
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else if x2 > 0.0 {
        let x = x2.sqrt();
        x.sin() / x
    } else {
        let x = (-x2).sqrt();
        x.sinh() / x
    }
}

/// `β₀² = Δ²/4 − |G|²`.
pub fn beta0_squared(g_abs: f64, delta: f64) -> f64 {
    delta * delta / 4.0 - g_abs * g_abs
}

/// Survival probability of the two-mode vacuum under resonant pumping.
pub fn p0_resonant_parametric(g_abs: f64, t: f64) -> f64 {
    let c = (g_abs * t).cosh();
    1.0 / (c * c)
}

pub fn pn_resonant_parametric(g_abs: f64, n: u32, t: f64) -> f64 {
    let x = g_abs * t;
    let th = x.tanh();
    p0_resonant_parametric(g_abs, t) * th.powi(2 * n as i32)
}

/// Peak value of `p_n(t)` for `n ≥ 1`: `n^n / (n+1)^(n+1)`.
pub fn peak_pn_parametric(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid(
            "n",
            "p_0 peaks at t = 0 with value 1; the peak law needs n >= 1",
        ));
    }
    let n = n as f64;
    Ok((n * n.ln() - (n + 1.0) * (n + 1.0).ln()).exp())
}

/// Time of the resonant peak, `|G| t = artanh √(n/(n+1))`.
pub fn peak_time_resonant(g_abs: f64, n: u32) -> f64 {
    let n = n as f64;
    (n / (n + 1.0)).sqrt().atanh() / g_abs
}

/// Disentangling factors of `exp(-iHt)` acting on the pair vacuum.
///
/// `gamma_plus` and `gamma_minus` are the factors multiplying `K₊` and
/// `K₋` in the normal-ordered product, i.e. they already carry the
/// `t·G` prefactor, so the pair amplitudes are
/// `C_n = e^{iΔt/2} √Γ₃ Γ₊ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactors {
    pub gamma3: Complex64,
    pub gamma_plus: Complex64,
    pub gamma_minus: Complex64,
    pub beta0_squared: f64,
}

struct Disentangled {
    /// `c + iΔts/2`
    denom: Complex64,
    /// `t·s`
    ts: f64,
    beta0_squared: f64,
}

fn disentangle(g_abs: f64, delta: f64, t: f64) -> Disentangled {
    let b2 = beta0_squared(g_abs, delta);
    let x2 = b2 * t * t;
    let c = even_cos(x2);
    let ts = t * even_sinc(x2);
    Disentangled {
        denom: Complex64::new(c, delta * ts / 2.0),
        ts,
        beta0_squared: b2,
    }
}

pub fn gamma_factors(g: Complex64, delta: f64, t: f64) -> Result<GammaFactors> {
    if g.norm() == 0.0 {
        return Err(Error::invalid("g", "|G| must be positive"));
    }
    let d = disentangle(g.norm(), delta, t);
    let minus_i = Complex64::new(0.0, -1.0);
    Ok(GammaFactors {
        gamma3: 1.0 / (d.denom * d.denom),
        gamma_plus: minus_i * g * d.ts / d.denom,
        gamma_minus: minus_i * g.conj() * d.ts / d.denom,
        beta0_squared: d.beta0_squared,
    })
}

/// Complex pair amplitude `⟨n,n|e^{-iHt}|0,0⟩` for the chain Hamiltonian
/// with diagonal `nΔ`.
pub fn pair_amplitude(g: Complex64, delta: f64, n: u32, t: f64) -> Result<Complex64> {
    let gf = gamma_factors(g, delta, t)?;
    let d = disentangle(g.norm(), delta, t);
    let phase = Complex64::from_polar(1.0, delta * t / 2.0);
    Ok(phase / d.denom * gf.gamma_plus.powu(n))
}

pub fn pn_detuned_parametric(g: Complex64, delta: f64, n: u32, t: f64) -> Result<f64> {
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return Err(Error::invalid("g", "|G| must be positive"));
    }
    let d = disentangle(g_abs, delta, t);
    let den = d.denom.norm_sqr();
    let p0 = 1.0 / den;
    if n == 0 {
        return Ok(p0);
    }
    let ratio = g_abs * g_abs * d.ts * d.ts / den;
    Ok(p0 * ratio.powi(n as i32))
}

/// Mean pair number `Σ n p_n = |G|² t² s(β₀²t²)²`.
pub fn mean_pairs_detuned(g_abs: f64, delta: f64, t: f64) -> f64 {
    let d = disentangle(g_abs, delta, t);
    g_abs * g_abs * d.ts * d.ts
}

pub fn mean_photon_resonant(g_abs: f64, t: f64) -> f64 {
    let s = (g_abs * t).sinh();
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Discrete,
    Critical,
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevivalPrediction {
    pub period: Option<f64>,
    pub regime: Regime,
}

pub fn parametric_regime(g_abs: f64, delta: f64) -> Regime {
    let b2 = beta0_squared(g_abs, delta);
    if b2.abs() <= CRITICAL_REL_TOL * g_abs * g_abs {
        Regime::Critical
    } else if b2 > 0.0 {
        Regime::Discrete
    } else {
        Regime::Continuum
    }
}

/// Revival period `π/β₀` when `|Δ| > 2|G|`.
pub fn revival_period_parametric(g: Complex64, delta: f64) -> Result<RevivalPrediction> {
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return Err(Error::invalid("g", "|G| must be positive"));
    }
    let regime = parametric_regime(g_abs, delta);
    let period = match regime {
        Regime::Discrete => Some(PI / beta0_squared(g_abs, delta).sqrt()),
        _ => None,
    };
    Ok(RevivalPrediction { period, regime })
}

/// Location and value of the first maximum of detuned `p_n(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetunedPeak {
    pub time: f64,
    pub value: f64,
    /// `true` when `√n β₀ ≤ |G|`, so the value equals `n^n/(n+1)^(n+1)`.
    pub interior: bool,
}

/// First peak of `p_n(t)` for `n ≥ 1` in the discrete regime.
///
/// When `√n β₀/|G| > 1` the maximum sits at `β₀t = π/2`, where `sin²`
/// saturates, and its value is below the resonant peak law.
pub fn detuned_peak(g: Complex64, delta: f64, n: u32) -> Result<DetunedPeak> {
    let g_abs = g.norm();
    if n == 0 {
        return Err(Error::invalid("n", "peak location needs n >= 1"));
    }
    if parametric_regime(g_abs, delta) != Regime::Discrete {
        return Err(Error::NoDiscreteLadder {
            delta,
            threshold: 2.0 * g_abs,
        });
    }
    let beta0 = beta0_squared(g_abs, delta).sqrt();
    let arg = (n as f64).sqrt() * beta0 / g_abs;
    let (time, interior) = if arg <= 1.0 {
        (arg.asin() / beta0, true)
    } else {
        (PI / 2.0 / beta0, false)
    };
    let value = pn_detuned_parametric(g, delta, n, time)?;
    Ok(DetunedPeak { time, value, interior })
}

/// `E_qm = β₀(q + 2m + 1) − Δ/2` for `m = 0..=m_max`.
pub fn eigenvalues_parametric(g: Complex64, delta: f64, q: i64, m_max: usize) -> Result<Vec<f64>> {
    let g_abs = g.norm();
    if !(delta > 2.0 * g_abs) || parametric_regime(g_abs, delta) != Regime::Discrete {
        return Err(Error::NoDiscreteLadder {
            delta,
            threshold: 2.0 * g_abs,
        });
    }
    let beta0 = beta0_squared(g_abs, delta).sqrt();
    Ok((0..=m_max)
        .map(|m| beta0 * (q as f64 + 2.0 * m as f64 + 1.0) - delta / 2.0)
        .collect())
}

/// `(x − sin x)/x²`, series below `|x| < 0.1`.
fn phase_kernel(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * (1.0 / 6.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 5040.0 - x2 / 362_880.0)))
    } else {
        (x - x.sin()) / (x * x)
    }
}

/// Coherent amplitude `α(t) = −iε(1 − e^{−iΔt})/(iΔ)` and the global
/// phase `(|ε|²/Δ²)(Δt − sin Δt)` of the driven-oscillator state. Both are
/// continuous through `Δ = 0`.
pub fn coherent_amplitude(epsilon: Complex64, delta: f64, t: f64) -> (Complex64, f64) {
    let half = delta * t / 2.0;
    let sinc = if half.abs() < SERIES_THRESHOLD {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    let alpha = Complex64::new(0.0, -1.0) * epsilon * t * sinc * Complex64::from_polar(1.0, -half);
    let phase = epsilon.norm_sqr() * t * t * phase_kernel(delta * t);
    (alpha, phase)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Poisson probability with mean `mean`.
pub fn poisson(mean: f64, n: u32) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-mean + n as f64 * mean.ln() - ln_factorial(n)).exp()
}

pub fn pn_driven_oscillator(epsilon: Complex64, delta: f64, n: u32, t: f64) -> f64 {
    let (alpha, _) = coherent_amplitude(epsilon, delta, t);
    poisson(alpha.norm_sqr(), n)
}

/// Peak over time of the driven `p_n`, `e^{−n} nⁿ/n!`.
pub fn peak_pn_driven(n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    (-nf + nf * nf.ln() - ln_factorial(n)).exp()
}

/// Complex Fock amplitude of the driven-oscillator state.
pub fn driven_amplitude(epsilon: Complex64, delta: f64, n: u32, t: f64) -> Complex64 {
    let (alpha, phase) = coherent_amplitude(epsilon, delta, t);
    let mut amp = Complex64::from_polar((-alpha.norm_sqr() / 2.0).exp(), phase);
    for k in 1..=n {
        amp *= alpha / (k as f64).sqrt();
    }
    amp
}

/// `E_n = nΔ − |ε|²/Δ` for `n = 0..=n_max`.
pub fn eigenvalues_driven(epsilon: Complex64, delta: f64, n_max: usize) -> Result<Vec<f64>> {
    if delta == 0.0 {
        return Err(Error::ContinuumSpectrum);
    }
    let shift = epsilon.norm_sqr() / delta;
    Ok((0..=n_max).map(|n| n as f64 * delta - shift).collect())
}

/// Driven oscillator obtained from a two-field Raman drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDrive {
    pub model: ChainModel,
    /// Set when `ω₁ − ω₂ − ν = 0`: the drive is resonant and never revives.
    pub resonant: bool,
}

impl EffectiveDrive {
    /// Ground-state revival period `2π/|Δ|`, if any.
    pub fn revival_period(&self) -> Option<f64> {
        let delta = self.model.delta();
        (delta != 0.0).then(|| 2.0 * PI / delta.abs())
    }
}

/// Maps the Raman parameters onto `Δ_eff = ω₁ − ω₂ − ν`, `ε_eff = κ E₁ E₂*`.
pub fn map_raman_to_effective(p: &IonRamanParams) -> Result<EffectiveDrive> {
    p.validate()?;
    let delta = p.omega1 - p.omega2 - p.nu;
    let epsilon = p.e1 * p.e2.conj() * p.kappa;
    Ok(EffectiveDrive {
        model: ChainModel::driven(epsilon, delta)?,
        resonant: delta == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn resonant_survival_values() {
        assert_eq!(p0_resonant_parametric(1.0, 0.0), 1.0);
        assert_abs_diff_eq!(p0_resonant_parametric(1.0, 1.0), 0.4199743, epsilon = 1e-7);
        for &t in &[3.0, 4.0, 6.0, 10.0] {
            let ratio = p0_resonant_parametric(1.0, t) / (4.0 * (-2.0 * t).exp());
            assert!((ratio - 1.0).abs() < 0.01, "t = {t}: ratio {ratio}");
        }
    }

    #[test]
    fn resonant_pn_values() {
        for &t in &[0.0, 0.3, 1.0, 2.5] {
            assert_eq!(pn_resonant_parametric(1.0, 0, t), p0_resonant_parametric(1.0, t));
        }
        let t1 = 0.5f64.sqrt().atanh();
        assert_abs_diff_eq!(t1, 0.88137, epsilon = 1e-5);
        assert_abs_diff_eq!(pn_resonant_parametric(1.0, 1, t1), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(pn_resonant_parametric(1.0, 1, 1.0), 0.2435959, epsilon = 1e-7);
    }

    #[test]
    fn peak_law_values() {
        assert_abs_diff_eq!(peak_pn_parametric(1).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(peak_pn_parametric(2).unwrap(), 4.0 / 27.0, epsilon = 1e-15);
        assert_abs_diff_eq!(peak_pn_parametric(3).unwrap(), 27.0 / 256.0, epsilon = 1e-15);
        assert!(peak_pn_parametric(0).is_err());
        for n in 1..30 {
            assert!(peak_pn_parametric(n + 1).unwrap() < peak_pn_parametric(n).unwrap());
        }
    }

    #[test]
    fn gamma_factors_resonant_and_critical() {
        for &t in &[0.0, 0.5, 1.0, 3.0] {
            let gf = gamma_factors(c(1.0), 0.0, t).unwrap();
            assert_abs_diff_eq!(gf.gamma3.norm(), 1.0 / t.cosh().powi(2), epsilon = 1e-14);
            let crit = gamma_factors(c(1.0), 2.0, t).unwrap();
            assert_abs_diff_eq!(crit.gamma3.norm(), 1.0 / (1.0 + t * t), epsilon = 1e-14);
        }
        let zero = gamma_factors(c(1.0), 1.3, 0.0).unwrap();
        assert_eq!(zero.gamma3, c(1.0));
        assert_eq!(zero.gamma_plus.norm(), 0.0);
    }

    #[test]
    fn gamma_factors_at_revival() {
        let beta0 = 0.21f64.sqrt();
        assert_abs_diff_eq!(beta0, 0.458258, epsilon = 1e-6);
        let gf = gamma_factors(c(1.0), 2.2, PI / beta0).unwrap();
        assert_abs_diff_eq!(gf.gamma3.norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gf.gamma_plus.norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn gamma_factor_invariants() {
        let g = Complex64::new(0.6, -0.8);
        for &delta in &[0.0, 1.0, 2.0, 2.5, -3.0] {
            for &t in &[0.1, 1.0, 4.0] {
                let gf = gamma_factors(g, delta, t).unwrap();
                let g3 = gf.gamma3.norm();
                let gp2 = gf.gamma_plus.norm_sqr();
                assert!(g3 > 0.0 && g3 <= 1.0 + 1e-15);
                assert_abs_diff_eq!(gf.gamma_plus.norm(), gf.gamma_minus.norm(), epsilon = 1e-15);
                assert!(gp2 < 1.0);
                assert_abs_diff_eq!(g3 + g3 * gp2 / (1.0 - gp2), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn detuned_examples() {
        let beta0 = 0.0201f64.sqrt();
        let p0 = pn_detuned_parametric(c(1.0), 2.02, 0, PI / (2.0 * beta0)).unwrap();
        assert_abs_diff_eq!(p0, 1.0 / (1.0 + 1.0 / 0.0201), epsilon = 1e-12);
        assert_abs_diff_eq!(p0, 0.0197040, epsilon = 1e-7);

        let beta0 = 0.21f64.sqrt();
        let t = (beta0 / 1.0).asin() / beta0;
        assert_abs_diff_eq!(pn_detuned_parametric(c(1.0), 2.2, 1, t).unwrap(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn detuned_matches_beta0_real_closed_form() {
        // |Γ₃| = [1 + (|G|/β₀)² sin² β₀t]⁻¹, |Γ₊|² = sin²/(sin² + (β₀/|G|)²)
        let (g, delta) = (1.3, 3.1);
        let beta0 = beta0_squared(g, delta).sqrt();
        for k in 0..50 {
            let t = 0.17 * k as f64;
            let s2 = (beta0 * t).sin().powi(2);
            let g3 = 1.0 / (1.0 + (g / beta0).powi(2) * s2);
            let gp2 = s2 / (s2 + (beta0 / g).powi(2));
            for n in 0..6 {
                let got = pn_detuned_parametric(c(g), delta, n, t).unwrap();
                assert_abs_diff_eq!(got, g3 * gp2.powi(n as i32), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn small_detuning_matches_resonant() {
        for n in 0..6 {
            for k in 0..=40 {
                let t = 0.1 * k as f64;
                let a = pn_detuned_parametric(c(1.0), 1e-6, n, t).unwrap();
                let b = pn_resonant_parametric(1.0, n, t);
                assert!((a - b).abs() < 1e-8, "n={n} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn revival_periods() {
        let a = revival_period_parametric(c(1.0), 2.02).unwrap();
        assert_eq!(a.regime, Regime::Discrete);
        assert_abs_diff_eq!(a.period.unwrap(), 22.1591, epsilon = 1e-4);
        assert!((a.period.unwrap() / 22.1586 - 1.0).abs() < 1e-3);
        let b = revival_period_parametric(c(1.0), 2.2).unwrap();
        assert_abs_diff_eq!(b.period.unwrap(), 6.8555, epsilon = 1e-4);
        let r = revival_period_parametric(c(1.0), 0.0).unwrap();
        assert_eq!(
            r,
            RevivalPrediction {
                period: None,
                regime: Regime::Continuum
            }
        );
        let cr = revival_period_parametric(c(1.0), 2.0).unwrap();
        assert_eq!(cr.regime, Regime::Critical);
        assert_eq!(cr.period, None);
    }

    #[test]
    fn parametric_ladder() {
        let e = eigenvalues_parametric(c(1.0), 2.2, 0, 1).unwrap();
        assert_abs_diff_eq!(e[0], -0.6417424, epsilon = 1e-7);
        assert_abs_diff_eq!(e[1], 0.2747727, epsilon = 1e-7);
        let e = eigenvalues_parametric(c(1.0), 2.02, 0, 0).unwrap();
        assert_abs_diff_eq!(e[0], -0.8682255, epsilon = 1e-7);
        let beta0 = 0.21f64.sqrt();
        for q in [-2i64, 0, 3] {
            let e = eigenvalues_parametric(Complex64::new(0.0, 1.0), 2.2, q, 8).unwrap();
            for w in e.windows(2) {
                assert_abs_diff_eq!(w[1] - w[0], 2.0 * beta0, epsilon = 1e-14);
            }
        }
        assert!(eigenvalues_parametric(c(1.0), 2.0, 0, 3).is_err());
        assert!(eigenvalues_parametric(c(1.0), 0.5, 0, 3).is_err());
    }

    #[test]
    fn coherent_amplitude_values() {
        for &t in &[0.0, 0.7, 2.0] {
            let (alpha, phase) = coherent_amplitude(c(1.0), 0.0, t);
            assert_abs_diff_eq!(alpha.re, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(alpha.im, -t, epsilon = 1e-15);
            assert_eq!(phase, 0.0);
        }
        let (alpha, _) = coherent_amplitude(c(1.0), 2.0, PI);
        assert!(alpha.norm() < 1e-15);
        let (alpha, _) = coherent_amplitude(c(1.0), 2.0, PI / 2.0);
        assert_abs_diff_eq!(alpha.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_amplitude_matches_direct_formula() {
        let eps = Complex64::new(0.4, 0.9);
        for &delta in &[0.3, -1.7, 2.0, 1e-3] {
            for &t in &[0.2, 1.0, 5.0] {
                let direct = Complex64::new(0.0, -1.0) * eps * (1.0 - Complex64::from_polar(1.0, -delta * t))
                    / Complex64::new(0.0, delta);
                let phase = eps.norm_sqr() / (delta * delta) * (delta * t - (delta * t).sin());
                let (alpha, ph) = coherent_amplitude(eps, delta, t);
                assert!((alpha - direct).norm() < 1e-12);
                assert!((ph - phase).abs() < 1e-6 * phase.abs().max(1.0));
                let mag = eps.norm() * t * ((delta * t / 2.0).sin().abs() / (delta * t / 2.0).abs());
                assert_abs_diff_eq!(alpha.norm(), mag, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn driven_probabilities() {
        assert_abs_diff_eq!(pn_driven_oscillator(c(1.0), 2.0, 0, PI), 1.0, epsilon = 1e-15);
        for n in 1..5 {
            assert!(pn_driven_oscillator(c(1.0), 2.0, n, PI) < 1e-30);
        }
        assert_abs_diff_eq!(
            pn_driven_oscillator(c(1.0), 2.0, 0, PI / 2.0),
            (-1.0f64).exp(),
            epsilon = 1e-15
        );
        for &t in &[0.5, 1.0, 2.0] {
            assert_abs_diff_eq!(pn_driven_oscillator(c(1.0), 0.0, 0, t), (-t * t).exp(), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(peak_pn_driven(1), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(peak_pn_driven(2), 2.0 * (-2.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn driven_ladder() {
        assert_eq!(eigenvalues_driven(c(1.0), 2.0, 1).unwrap(), vec![-0.5, 1.5]);
        let a = eigenvalues_driven(c(1.0), 2.0, 5).unwrap();
        let b = eigenvalues_driven(c(2.0), 2.0, 5).unwrap();
        for (wa, wb) in a.windows(2).zip(b.windows(2)) {
            assert_eq!(wa[1] - wa[0], 2.0);
            assert_eq!(wb[1] - wb[0], 2.0);
        }
        assert_eq!(eigenvalues_driven(c(1.5), 0.7, 0).unwrap()[0], -2.25 / 0.7);
        assert_eq!(eigenvalues_driven(c(1.0), 0.0, 3), Err(Error::ContinuumSpectrum));
    }

    #[test]
    fn raman_mapping() {
        let p = IonRamanParams {
            omega1: 100.0,
            omega2: 98.9,
            nu: 1.0,
            e1: c(1.0),
            e2: c(1.0),
            kappa: 1.0,
        };
        let eff = map_raman_to_effective(&p).unwrap();
        assert_eq!(eff.model.delta(), 100.0 - 98.9 - 1.0);
        assert_abs_diff_eq!(eff.model.delta(), 0.1, epsilon = 1e-12);
        assert_eq!(eff.model.coupling(), 1.0);
        assert!(!eff.resonant);
        assert_abs_diff_eq!(eff.revival_period().unwrap(), 20.0 * PI, epsilon = 1e-9);
        let at_revival = pn_driven_oscillator(c(1.0), eff.model.delta(), 0, 2.0 * PI / eff.model.delta());
        assert_abs_diff_eq!(at_revival, 1.0, epsilon = 1e-12);

        let res = map_raman_to_effective(&IonRamanParams { omega2: 99.0, ..p }).unwrap();
        assert!(res.resonant);
        assert_eq!(res.revival_period(), None);

        let strong = map_raman_to_effective(&IonRamanParams { kappa: 2.0, ..p }).unwrap();
        assert_eq!(strong.model.coupling(), 2.0);
        assert_eq!(strong.revival_period(), eff.revival_period());

        assert!(map_raman_to_effective(&IonRamanParams { e2: c(0.0), ..p }).is_err());
    }

    #[test]
    fn resonant_mean() {
        assert_eq!(mean_photon_resonant(1.0, 0.0), 0.0);
        assert_abs_diff_eq!(mean_photon_resonant(1.0, 1.0), 1.3810978, epsilon = 1e-7);
        for &t in &[0.3, 1.0, 2.0] {
            let c2 = f64::cosh(t).powi(2);
            assert_abs_diff_eq!(c2 - mean_photon_resonant(1.0, t), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p0_resonant_parametric(1.0, t) * c2, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn detuned_peak_location() {
        let beta0 = 0.21f64.sqrt();
        let pk = detuned_peak(c(1.0), 2.2, 1).unwrap();
        assert!(pk.interior);
        assert_abs_diff_eq!(pk.time * beta0, 0.4760338, epsilon = 1e-7);
        assert_abs_diff_eq!(pk.value, 0.25, epsilon = 1e-14);
        // √5 β₀ > |G|: boundary maximum, below the peak law
        let pk = detuned_peak(c(1.0), 2.2, 5).unwrap();
        assert!(!pk.interior);
        assert_abs_diff_eq!(pk.time * beta0, PI / 2.0, epsilon = 1e-14);
        assert!(pk.value < peak_pn_parametric(5).unwrap());
        assert!(detuned_peak(c(1.0), 1.0, 1).is_err());
    }
}
