//! Phase-slip rate exponents and logarithmic-susceptibility (LS) spectra for
//! a parametrically driven nonlinear oscillator.
//!
//! The crate covers the classical-stochastic, zero-temperature quantum, and
//! finite-temperature quantum regimes of intrawell activation in the rotating
//! frame, plus the overdamped theory near the bifurcation point. Rate
//! exponents come from real-time instanton paths on the zero level set of an
//! effective Hamiltonian over action space; spectra come from saddle-point
//! evaluation of the per-harmonic response.

pub mod action_angle;
pub mod bifurcation;
pub mod classical;
pub mod elliptic;
pub mod error;
pub mod export;
pub mod gamma;
pub mod instanton;
pub mod interp;
pub mod keldysh;
pub mod ls;
pub mod params;
pub mod quad;
pub mod roots;

pub use error::{Error, Result};
pub use params::{DriveParams, Occupation, OscParams};
