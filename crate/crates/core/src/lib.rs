//! Numerical laboratory for Grover search under gate imperfections.
//!
//! The crate simulates three layers of the same physics and lets them be
//! compared quantitatively:
//!
//! * [`grover`] — the full `2^n`-dimensional register with per-qubit
//!   randomly tilted Hadamard gates,
//! * [`stlm`] — an effective stochastic two-level model: rotation by the
//!   Grover angle, random diagonal phases and uniform amplitude decay,
//! * [`analytic`] — closed-form decay predictions plus a Gaussian-walk
//!   Monte Carlo oracle that validates them.
//!
//! [`ensemble`] averages any of the three over independent seeded
//! realizations, and [`fit`] recovers effective-model parameters from
//! ensemble data. The `groverlab` binary drives everything from the command
//! line and persists results as CSV.

pub mod analytic;
pub mod cli;
pub mod csv_io;
pub mod ensemble;
pub mod error;
pub mod fit;
pub mod grover;
pub mod series;
mod simplex;
pub mod statevec;
pub mod stlm;
pub mod svg;

pub use analytic::AnalyticParams;
pub use ensemble::{merge_ensembles, run_ensemble, EnsembleSeries, ModelConfig, ModelTag};
pub use error::{Error, Result};
pub use fit::{fit_analytic, fit_stlm, FitResult};
pub use grover::{GaConfig, GroverGeometry, NoiseDraw};
pub use series::RealizationSeries;
pub use statevec::{QuantumState, SingleQubitGate};
pub use stlm::{StlmParams, TwoLevelState};
