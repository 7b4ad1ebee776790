//! Quantum revivals and Fock-space Bloch oscillations of detuned
//! parametric amplifiers and driven oscillators.
//!
//! * [`model`]: the three chain models and their truncated Hamiltonians.
//! * [`analytic`]: closed-form probabilities, revival periods and ladders.
//! * [`propagate`]: adaptive-truncation numerical propagation.
//! * [`spectrum`]: truncated diagonalization and the continuum diagnostic.
//! * [`analysis`]: revival detection and peak measurement.
//! * [`cli`]: scenario configs, presets and table output.

pub mod analysis;
pub mod analytic;
pub mod cli;
pub mod error;
pub mod model;
pub mod ode;
pub mod propagate;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{build_hamiltonian, initial_vacuum, ChainModel, IonRamanParams, StateVector, Tridiagonal};
pub use num_complex::Complex64;
