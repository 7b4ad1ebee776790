//! C ABI for fockbloch.
//!
//! Every fallible call returns an [`FbStatus`]; on failure the message is
//! kept per thread and read back with [`fb_last_error_message`]. Objects
//! are opaque handles released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fockbloch::analysis::{build_report, RevivalVerdict};
use fockbloch::analytic;
use fockbloch::propagate::{propagate_vacuum, IntegratorConfig, PropagationResult, DEFAULT_MAX_CUTOFF};
use fockbloch::spectrum::{convergence_scan, diagonalize, SpectralVerdict, SpectrumResult};
use fockbloch::{ChainModel, Error, IonRamanParams};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DegenerateTruncation = 3,
    TruncationInsufficient = 4,
    NormDrift = 5,
    StepSizeUnderflow = 6,
    NoDiscreteLadder = 7,
    ContinuumSpectrum = 8,
    ShortSeries = 9,
    BoundaryMaximum = 10,
    InsufficientSpan = 11,
    TooFewConverged = 12,
    IndexOutOfRange = 13,
    BufferTooSmall = 14,
    Panic = 99,
}

impl From<&Error> for FbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DegenerateTruncation { .. } => FbStatus::DegenerateTruncation,
            Error::InvalidParameter { .. } => FbStatus::InvalidParameter,
            Error::NoDiscreteLadder { .. } => FbStatus::NoDiscreteLadder,
            Error::ContinuumSpectrum => FbStatus::ContinuumSpectrum,
            Error::TruncationInsufficient { .. } => FbStatus::TruncationInsufficient,
            Error::NormDrift { .. } => FbStatus::NormDrift,
            Error::StepSizeUnderflow { .. } => FbStatus::StepSizeUnderflow,
            Error::ShortSeries { .. } => FbStatus::ShortSeries,
            Error::BoundaryMaximum { .. } => FbStatus::BoundaryMaximum,
            Error::InsufficientSpan { .. } => FbStatus::InsufficientSpan,
            Error::TooFewConverged { .. } => FbStatus::TooFewConverged,
            Error::IndexOutOfRange { .. } => FbStatus::IndexOutOfRange,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(FbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(FbStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FbStatus::NullPointer, format!("null pointer: {what}"))
}

/// Runs `f`, recording any error or panic for `fb_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FbStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FbStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies `src` into a caller buffer of `len` elements, failing if it is
/// too short. `written` (optional) receives the element count needed.
unsafe fn fill<T: Copy>(src: &[T], buf: *mut T, len: usize, written: *mut usize) -> Result<(), Failure> {
    if let Some(w) = written.as_mut() {
        *w = src.len();
    }
    if len < src.len() {
        return Err(Failure(
            FbStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len` bytes. Returns the full message length in bytes
/// (excluding the NUL); 0 means no error was recorded.
#[no_mangle]
pub unsafe extern "C" fn fb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// NUL-terminated library version, static storage.
#[no_mangle]
pub extern "C" fn fb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// models

/// Opaque model handle.
pub struct FbModel(ChainModel);

fn new_model(m: fockbloch::Result<ChainModel>, out_model: *mut *mut FbModel) -> FbStatus {
    guard(|| {
        let slot = unsafe { out(out_model, "out_model")? };
        *slot = Box::into_raw(Box::new(FbModel(m?)));
        Ok(())
    })
}

/// Two-mode parametric amplifier with pump `G = g_re + i g_im`.
#[no_mangle]
pub unsafe extern "C" fn fb_model_parametric(
    g_re: f64,
    g_im: f64,
    delta: f64,
    out_model: *mut *mut FbModel,
) -> FbStatus {
    new_model(ChainModel::parametric(Complex64::new(g_re, g_im), delta), out_model)
}

/// Linearly driven oscillator with drive `ε = eps_re + i eps_im`.
#[no_mangle]
pub unsafe extern "C" fn fb_model_driven(
    eps_re: f64,
    eps_im: f64,
    delta: f64,
    out_model: *mut *mut FbModel,
) -> FbStatus {
    new_model(ChainModel::driven(Complex64::new(eps_re, eps_im), delta), out_model)
}

/// Biased tight-binding chain; `two_sided` keeps negative sites.
#[no_mangle]
pub unsafe extern "C" fn fb_model_chain(
    beta: f64,
    delta: f64,
    two_sided: bool,
    out_model: *mut *mut FbModel,
) -> FbStatus {
    new_model(ChainModel::uniform_chain(beta, delta, two_sided), out_model)
}

#[no_mangle]
pub unsafe extern "C" fn fb_model_free(model: *mut FbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Ladder detuning of the model.
#[no_mangle]
pub unsafe extern "C" fn fb_model_delta(model: *const FbModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.0.delta())
}

// propagation

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FbIntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub leak_tol: f64,
    pub max_cutoff: usize,
}

#[no_mangle]
pub extern "C" fn fb_integrator_defaults() -> FbIntegratorConfig {
    let d = IntegratorConfig::new(Vec::new());
    FbIntegratorConfig {
        rel_tol: d.rel_tol,
        abs_tol: d.abs_tol,
        leak_tol: d.leak_tol,
        max_cutoff: DEFAULT_MAX_CUTOFF,
    }
}

/// Opaque propagation result.
pub struct FbPropagation(PropagationResult);

/// Propagates the vacuum to `samples` equally spaced times on `[0, t_max]`
/// with an adaptive truncation. `config` may be NULL for the defaults.
#[no_mangle]
pub unsafe extern "C" fn fb_propagate_vacuum(
    model: *const FbModel,
    t_max: f64,
    samples: usize,
    config: *const FbIntegratorConfig,
    out_result: *mut *mut FbPropagation,
) -> FbStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let slot = out(out_result, "out_result")?;
        if !(t_max > 0.0 && t_max.is_finite()) || samples < 2 {
            return Err(Failure(
                FbStatus::InvalidParameter,
                format!("need t_max > 0 and samples >= 2, got {t_max} and {samples}"),
            ));
        }
        let c = config.as_ref().copied().unwrap_or_else(|| fb_integrator_defaults());
        let cfg = IntegratorConfig {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            leak_tol: c.leak_tol,
            max_cutoff: c.max_cutoff,
            ..IntegratorConfig::uniform(t_max, samples)
        };
        *slot = Box::into_raw(Box::new(FbPropagation(propagate_vacuum(&m.0, &cfg)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_propagation_free(result: *mut FbPropagation) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fb_propagation_samples(result: *const FbPropagation) -> usize {
    result.as_ref().map_or(0, |r| r.0.times.len())
}

#[no_mangle]
pub unsafe extern "C" fn fb_propagation_cutoff(result: *const FbPropagation) -> usize {
    result.as_ref().map_or(0, |r| r.0.cutoff_used)
}

/// `|1 − Σp|` at the final sample.
#[no_mangle]
pub unsafe extern "C" fn fb_propagation_final_drift(result: *const FbPropagation) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.final_drift())
}

#[no_mangle]
pub unsafe extern "C" fn fb_propagation_times(
    result: *const FbPropagation,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> FbStatus {
    guard(|| fill(&handle(result, "result")?.0.times, buf, len, written))
}

/// `p_index(t)` at every sample; zero outside the retained window.
#[no_mangle]
pub unsafe extern "C" fn fb_propagation_series(
    result: *const FbPropagation,
    index: i64,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> FbStatus {
    guard(|| fill(&handle(result, "result")?.0.series(index), buf, len, written))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbRevivalVerdict {
    Confirmed = 0,
    None = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FbRevivalSummary {
    pub verdict: FbRevivalVerdict,
    /// NaN when the model predicts no revival.
    pub predicted_period: f64,
    /// NaN with fewer than two detections.
    pub detected_period: f64,
    /// NaN unless both prediction and detections exist.
    pub max_discrepancy: f64,
    pub detections: usize,
}

/// Revival detection on the survival probability of `result`.
#[no_mangle]
pub unsafe extern "C" fn fb_revival_report(
    model: *const FbModel,
    result: *const FbPropagation,
    threshold: f64,
    out_summary: *mut FbRevivalSummary,
) -> FbStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let r = handle(result, "result")?;
        let slot = out(out_summary, "out_summary")?;
        let rep = build_report(&m.0, &r.0, threshold)?;
        *slot = FbRevivalSummary {
            verdict: match rep.verdict {
                RevivalVerdict::RevivalConfirmed => FbRevivalVerdict::Confirmed,
                RevivalVerdict::NoRevival => FbRevivalVerdict::None,
                RevivalVerdict::Inconclusive => FbRevivalVerdict::Inconclusive,
            },
            predicted_period: rep.predicted_period.unwrap_or(f64::NAN),
            detected_period: rep.detected_period.unwrap_or(f64::NAN),
            max_discrepancy: rep.max_discrepancy.unwrap_or(f64::NAN),
            detections: rep.detected_times.len(),
        };
        Ok(())
    })
}

// spectrum

/// Opaque truncated spectrum.
pub struct FbSpectrum(SpectrumResult);

#[no_mangle]
pub unsafe extern "C" fn fb_diagonalize(
    model: *const FbModel,
    cutoff: usize,
    out_spectrum: *mut *mut FbSpectrum,
) -> FbStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let slot = out(out_spectrum, "out_spectrum")?;
        *slot = Box::into_raw(Box::new(FbSpectrum(diagonalize(&m.0, cutoff)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fb_spectrum_free(spectrum: *mut FbSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fb_spectrum_len(spectrum: *const FbSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.eigenvalues.len())
}

/// Eigenvalues in ascending order.
#[no_mangle]
pub unsafe extern "C" fn fb_spectrum_eigenvalues(
    spectrum: *const FbSpectrum,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> FbStatus {
    guard(|| fill(&handle(spectrum, "spectrum")?.0.eigenvalues, buf, len, written))
}

/// 1 where the eigenvalue is stable against a larger cutoff, else 0.
#[no_mangle]
pub unsafe extern "C" fn fb_spectrum_converged(
    spectrum: *const FbSpectrum,
    buf: *mut u8,
    len: usize,
    written: *mut usize,
) -> FbStatus {
    guard(|| {
        let mask: Vec<u8> = handle(spectrum, "spectrum")?
            .0
            .converged_mask
            .iter()
            .map(|&c| c as u8)
            .collect();
        fill(&mask, buf, len, written)
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbSpectralVerdict {
    Discrete = 0,
    ContinuumLike = 1,
    Withheld = 2,
}

/// Tracks the lowest `levels` eigenvalues over `ncutoffs` increasing
/// cutoffs. `out_drift` (optional) receives the largest drift.
#[no_mangle]
pub unsafe extern "C" fn fb_convergence_scan(
    model: *const FbModel,
    cutoffs: *const usize,
    ncutoffs: usize,
    levels: usize,
    out_verdict: *mut FbSpectralVerdict,
    out_drift: *mut f64,
) -> FbStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let slot = out(out_verdict, "out_verdict")?;
        if cutoffs.is_null() {
            return Err(null("cutoffs"));
        }
        let cuts = std::slice::from_raw_parts(cutoffs, ncutoffs);
        let scan = convergence_scan(&m.0, cuts, levels)?;
        *slot = match scan.verdict {
            Some(SpectralVerdict::Discrete) => FbSpectralVerdict::Discrete,
            Some(SpectralVerdict::ContinuumLike) => FbSpectralVerdict::ContinuumLike,
            None => FbSpectralVerdict::Withheld,
        };
        if let Some(d) = out_drift.as_mut() {
            *d = scan.max_drift;
        }
        Ok(())
    })
}

// closed forms

/// `p_n(t)` of the parametric amplifier in any regime.
#[no_mangle]
pub unsafe extern "C" fn fb_pn_parametric(
    g_re: f64,
    g_im: f64,
    delta: f64,
    n: u32,
    t: f64,
    out_p: *mut f64,
) -> FbStatus {
    guard(|| {
        let slot = out(out_p, "out_p")?;
        *slot = analytic::pn_detuned_parametric(Complex64::new(g_re, g_im), delta, n, t)?;
        Ok(())
    })
}

/// Poisson `p_n(t)` of the driven oscillator.
#[no_mangle]
pub extern "C" fn fb_pn_driven(eps_re: f64, eps_im: f64, delta: f64, n: u32, t: f64) -> f64 {
    analytic::pn_driven_oscillator(Complex64::new(eps_re, eps_im), delta, n, t)
}

/// Peak value `n^n/(n+1)^(n+1)` of the pair distribution.
#[no_mangle]
pub extern "C" fn fb_peak_pn_parametric(n: u32) -> f64 {
    analytic::peak_pn_parametric(n).unwrap_or(f64::NAN)
}

/// Revival period `π/β₀`; fails with `NoDiscreteLadder` when `|Δ| ≤ 2|G|`.
#[no_mangle]
pub unsafe extern "C" fn fb_revival_period_parametric(
    g_re: f64,
    g_im: f64,
    delta: f64,
    out_period: *mut f64,
) -> FbStatus {
    guard(|| {
        let slot = out(out_period, "out_period")?;
        let g = Complex64::new(g_re, g_im);
        match analytic::revival_period_parametric(g, delta)?.period {
            Some(p) => {
                *slot = p;
                Ok(())
            }
            None => Err(Error::NoDiscreteLadder {
                delta,
                threshold: 2.0 * g.norm(),
            }
            .into()),
        }
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FbRamanParams {
    pub omega1: f64,
    pub omega2: f64,
    pub nu: f64,
    pub e1_re: f64,
    pub e1_im: f64,
    pub e2_re: f64,
    pub e2_im: f64,
    pub kappa: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FbEffectiveDrive {
    pub eps_re: f64,
    pub eps_im: f64,
    pub delta: f64,
    /// `2π/|Δ|`, or infinity for a resonant drive.
    pub period: f64,
    pub resonant: bool,
}

/// Raman-driven ion to driven oscillator.
#[no_mangle]
pub unsafe extern "C" fn fb_map_raman(params: *const FbRamanParams, out_drive: *mut FbEffectiveDrive) -> FbStatus {
    guard(|| {
        let p = handle(params, "params")?;
        let slot = out(out_drive, "out_drive")?;
        let eff = analytic::map_raman_to_effective(&IonRamanParams {
            omega1: p.omega1,
            omega2: p.omega2,
            nu: p.nu,
            e1: Complex64::new(p.e1_re, p.e1_im),
            e2: Complex64::new(p.e2_re, p.e2_im),
            kappa: p.kappa,
        })?;
        let ChainModel::DrivenOscillator { epsilon, delta } = eff.model else {
            unreachable!("Raman mapping yields a driven oscillator")
        };
        *slot = FbEffectiveDrive {
            eps_re: epsilon.re,
            eps_im: epsilon.im,
            delta,
            period: eff.revival_period().unwrap_or(f64::INFINITY),
            resonant: eff.resonant,
        };
        Ok(())
    })
}
