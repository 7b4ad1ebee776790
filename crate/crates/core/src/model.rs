//! Physical models and their truncated tridiagonal Hamiltonians.
//!
//! Units: ħ = 1, every energy is an angular frequency. The parametric pair
//! model lives in the `|n,n⟩` sector reachable from the two-mode vacuum, so
//! all three models reduce to a nearest-neighbour chain over a single index.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three chain-structured models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ChainModel {
    /// Tight-binding chain `i dC_n/dt = nΔ C_n + β (C_{n+1} + C_{n-1})`.
    UniformChain { beta: f64, delta: f64, two_sided: bool },
    /// Two-mode parametric amplifier `Δ/2 (a†a + b†b) + G a†b† + G* ab`
    /// restricted to the pair basis.
    ParametricTwoMode { g: Complex64, delta: f64 },
    /// Detuned driven oscillator `Δ a†a + ε a† + ε* a`.
    DrivenOscillator { epsilon: Complex64, delta: f64 },
}

fn finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {x}")))
    }
}

impl ChainModel {
    pub fn uniform_chain(beta: f64, delta: f64, two_sided: bool) -> Result<Self> {
        finite("beta", beta)?;
        finite("delta", delta)?;
        if beta == 0.0 {
            return Err(Error::invalid("beta", "zero hopping is degenerate"));
        }
        Ok(ChainModel::UniformChain { beta, delta, two_sided })
    }

    pub fn parametric(g: Complex64, delta: f64) -> Result<Self> {
        finite("g", g.re)?;
        finite("g", g.im)?;
        finite("delta", delta)?;
        if g.norm() == 0.0 {
            return Err(Error::invalid("g", "zero pump coupling is degenerate"));
        }
        Ok(ChainModel::ParametricTwoMode { g, delta })
    }

    pub fn driven(epsilon: Complex64, delta: f64) -> Result<Self> {
        finite("epsilon", epsilon.re)?;
        finite("epsilon", epsilon.im)?;
        finite("delta", delta)?;
        if epsilon.norm() == 0.0 {
            return Err(Error::invalid("epsilon", "zero drive is degenerate"));
        }
        Ok(ChainModel::DrivenOscillator { epsilon, delta })
    }

    /// Re-checks the invariants of a value built without the constructors
    /// (e.g. deserialized).
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChainModel::UniformChain { beta, delta, two_sided } => {
                Self::uniform_chain(beta, delta, two_sided).map(|_| ())
            }
            ChainModel::ParametricTwoMode { g, delta } => Self::parametric(g, delta).map(|_| ()),
            ChainModel::DrivenOscillator { epsilon, delta } => Self::driven(epsilon, delta).map(|_| ()),
        }
    }

    pub fn delta(&self) -> f64 {
        match *self {
            ChainModel::UniformChain { delta, .. }
            | ChainModel::ParametricTwoMode { delta, .. }
            | ChainModel::DrivenOscillator { delta, .. } => delta,
        }
    }

    /// Magnitude of the coupling that sets the natural time unit.
    pub fn coupling(&self) -> f64 {
        match *self {
            ChainModel::UniformChain { beta, .. } => beta.abs(),
            ChainModel::ParametricTwoMode { g, .. } => g.norm(),
            ChainModel::DrivenOscillator { epsilon, .. } => epsilon.norm(),
        }
    }

    /// `max(|G|, |ε|, |β|, |Δ|)`, the energy scale used by spectral verdicts.
    pub fn scale(&self) -> f64 {
        self.coupling().max(self.delta().abs())
    }

    /// Human-readable time unit, e.g. `1/|G|`.
    pub fn time_unit(&self) -> &'static str {
        match self {
            ChainModel::UniformChain { .. } => "1/beta",
            ChainModel::ParametricTwoMode { .. } => "1/|G|",
            ChainModel::DrivenOscillator { .. } => "1/|epsilon|",
        }
    }

    pub fn is_two_sided(&self) -> bool {
        matches!(self, ChainModel::UniformChain { two_sided: true, .. })
    }

    /// Lowest retained site index for a given cutoff.
    pub fn base_index(&self, cutoff: usize) -> i64 {
        if self.is_two_sided() {
            -(cutoff as i64)
        } else {
            0
        }
    }

    /// Number of retained basis states for a given cutoff.
    pub fn dimension(&self, cutoff: usize) -> usize {
        if self.is_two_sided() {
            2 * cutoff + 1
        } else {
            cutoff + 1
        }
    }
}

/// Hermitian tridiagonal matrix stored as its real diagonal and the
/// sub-diagonal `H[k+1][k]`; the super-diagonal is the conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub sub: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `H[row][col]` in local (zero-based) indices.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        if row == col {
            Complex64::new(self.diag[row], 0.0)
        } else if row == col + 1 {
            self.sub[col]
        } else if col == row + 1 {
            self.sub[row].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `out = -i H x`.
    pub fn apply_minus_i(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        let x = &x[..n];
        let out = &mut out[..n];
        let rot = |c: Complex64| Complex64::new(c.im, -c.re);
        if n == 1 {
            out[0] = rot(x[0] * self.diag[0]);
            return;
        }
        let sub = &self.sub[..n - 1];
        out[0] = rot(x[0] * self.diag[0] + sub[0].conj() * x[1]);
        for k in 1..n - 1 {
            out[k] = rot(x[k] * self.diag[k] + sub[k - 1] * x[k - 1] + sub[k].conj() * x[k + 1]);
        }
        out[n - 1] = rot(x[n - 1] * self.diag[n - 1] + sub[n - 2] * x[n - 2]);
    }

    /// Spectral-radius bound (Gershgorin).
    pub fn gershgorin_radius(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut r = self.diag[k].abs();
                if k > 0 {
                    r += self.sub[k - 1].norm();
                }
                if k + 1 < n {
                    r += self.sub[k].norm();
                }
                r
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the truncated Hamiltonian. Rows run over indices
/// `base_index(cutoff)..=cutoff`.
pub fn build_hamiltonian(model: &ChainModel, cutoff: usize) -> Result<Tridiagonal> {
    if cutoff == 0 {
        return Err(Error::DegenerateTruncation { min: 1, got: 0 });
    }
    let base = model.base_index(cutoff);
    let dim = model.dimension(cutoff);
    let delta = model.delta();
    let diag = (0..dim).map(|k| (base + k as i64) as f64 * delta).collect();
    let sub = (0..dim - 1)
        .map(|k| {
            // coupling between local k and k+1; Fock index of the upper state is k+1
            let upper = (k + 1) as f64;
            match *model {
                ChainModel::UniformChain { beta, .. } => Complex64::new(beta, 0.0),
                ChainModel::ParametricTwoMode { g, .. } => g * upper,
                ChainModel::DrivenOscillator { epsilon, .. } => epsilon * upper.sqrt(),
            }
        })
        .collect();
    Ok(Tridiagonal { diag, sub })
}

/// Truncated amplitude vector over indices `base_index..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    cutoff: usize,
    base_index: i64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, cutoff: usize, base_index: i64) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::DegenerateTruncation { min: 1, got: 0 });
        }
        if base_index > 0 {
            return Err(Error::invalid("base_index", "must not exceed 0"));
        }
        let expected = (cutoff as i64 - base_index + 1) as usize;
        if amplitudes.len() != expected {
            return Err(Error::invalid(
                "amplitudes",
                format!("expected {expected} entries, got {}", amplitudes.len()),
            ));
        }
        Ok(StateVector {
            amplitudes,
            cutoff,
            base_index,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn base_index(&self) -> i64 {
        self.base_index
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Amplitude at a physical site/Fock index, zero outside the window.
    pub fn amplitude(&self, index: i64) -> Complex64 {
        let local = index - self.base_index;
        if local < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes
            .get(local as usize)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Re-embeds the state into a larger window; `base_index` must not grow.
    pub fn widened(&self, cutoff: usize, base_index: i64) -> Result<Self> {
        if cutoff < self.cutoff || base_index > self.base_index {
            return Err(Error::invalid("cutoff", "widening cannot shrink the window"));
        }
        let amps = (base_index..=cutoff as i64).map(|i| self.amplitude(i)).collect();
        StateVector::new(amps, cutoff, base_index)
    }
}

/// Excitation localized at index 0 (Fock vacuum or the central chain site).
pub fn initial_vacuum(cutoff: usize, base_index: i64) -> Result<StateVector> {
    if cutoff == 0 {
        return Err(Error::DegenerateTruncation { min: 1, got: 0 });
    }
    if base_index > 0 {
        return Err(Error::invalid("base_index", "must not exceed 0"));
    }
    let len = (cutoff as i64 - base_index + 1) as usize;
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    amps[(-base_index) as usize] = Complex64::new(1.0, 0.0);
    StateVector::new(amps, cutoff, base_index)
}

/// Raman drive of a trapped ion's vibrational mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonRamanParams {
    pub omega1: f64,
    pub omega2: f64,
    pub nu: f64,
    pub e1: Complex64,
    pub e2: Complex64,
    pub kappa: f64,
}

impl IonRamanParams {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("nu", self.nu),
            ("kappa", self.kappa),
            ("e1", self.e1.re),
            ("e1", self.e1.im),
            ("e2", self.e2.re),
            ("e2", self.e2.im),
        ] {
            finite(name, x)?;
        }
        if self.nu <= 0.0 {
            return Err(Error::invalid("nu", "trap frequency must be positive"));
        }
        if self.kappa <= 0.0 {
            return Err(Error::invalid("kappa", "coupling constant must be positive"));
        }
        if self.e1.norm() == 0.0 || self.e2.norm() == 0.0 {
            return Err(Error::invalid("e1/e2", "zero field amplitude gives zero drive"));
        }
        Ok(())
    }
}
