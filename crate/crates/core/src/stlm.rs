//! Stochastic two-level model with dissipation: per iteration the amplitude
//! pair is multiplied by random diagonal phases, rotated by the Grover angle
//! and uniformly damped,
//!
//! ```text
//! (c_m, c_n) ← e^(−γ) · R(ω) · diag(e^(iφ_m), e^(iφ_n)) · (c_m, c_n)
//! ```
//!
//! with `φ_m(t)`, `φ_n(t)` drawn independently and uniformly from
//! `[−W_φ/2, W_φ/2]` each iteration, without time correlation. The model
//! deliberately decays to zero occupancy (no `1/N` floor), so comparisons
//! against the full register are meaningful before saturation only.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grover::{check_grid, series_push_checked, GroverGeometry};
use crate::series::RealizationSeries;

/// Amplitudes of the two-level model after `t` iterations. The squared norm
/// obeys `|c_m|² + |c_n|² = e^(−2γt)` for the `gamma` used to evolve it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub c_m: Complex64,
    pub c_n: Complex64,
    pub t: u32,
}

impl TwoLevelState {
    /// The model's initial condition `(cos ϑ₀, sin ϑ₀)` at `t = 0`.
    pub fn initial(theta0: f64) -> Self {
        Self {
            c_m: Complex64::new(theta0.cos(), 0.0),
            c_n: Complex64::new(theta0.sin(), 0.0),
            t: 0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_m.norm_sqr() + self.c_n.norm_sqr()
    }
}

/// Model parameters: decay per iteration, phase box width, and the rotation
/// angles inherited from the register geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlmParams {
    pub gamma: f64,
    pub w_phi: f64,
    pub omega: f64,
    pub theta0: f64,
}

impl StlmParams {
    pub fn new(gamma: f64, w_phi: f64, omega: f64, theta0: f64) -> Result<Self> {
        let params = Self {
            gamma,
            w_phi,
            omega,
            theta0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters sharing `omega` and `theta0` with a register geometry.
    pub fn for_geometry(gamma: f64, w_phi: f64, geometry: &GroverGeometry) -> Result<Self> {
        Self::new(gamma, w_phi, geometry.omega(), geometry.theta0())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::config(format!(
                "gamma: must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if !self.w_phi.is_finite() || self.w_phi < 0.0 {
            return Err(Error::config(format!(
                "w_phi: must be finite and >= 0, got {}",
                self.w_phi
            )));
        }
        if !self.omega.is_finite() || !self.theta0.is_finite() {
            return Err(Error::config("omega/theta0: must be finite".to_string()));
        }
        Ok(())
    }
}

/// The plane rotation ((cos ω, −sin ω), (sin ω, cos ω)).
pub fn rotation(omega: f64) -> [[f64; 2]; 2] {
    let (s, c) = omega.sin_cos();
    [[c, -s], [s, c]]
}

/// One exact model step; the decay factor is applied as a scalar multiply
/// after the matrix product (the order is immaterial).
pub fn stlm_step(
    state: &TwoLevelState,
    params: &StlmParams,
    phi_m: f64,
    phi_n: f64,
) -> TwoLevelState {
    let um = Complex64::from_polar(1.0, phi_m) * state.c_m;
    let un = Complex64::from_polar(1.0, phi_n) * state.c_n;
    let (s, c) = params.omega.sin_cos();
    let decay = (-params.gamma).exp();
    TwoLevelState {
        c_m: (c * um - s * un) * decay,
        c_n: (s * um + c * un) * decay,
        t: state.t + 1,
    }
}

/// Target probability and fidelity of a two-level state per the model's
/// observable definitions: `p = |c_n|²`,
/// `F = |c_m cos(ωt+ϑ₀) + c_n sin(ωt+ϑ₀)|²`.
pub fn observables(state: &TwoLevelState, params: &StlmParams) -> (f64, f64) {
    let p = state.c_n.norm_sqr();
    let angle = params.theta0 + params.omega * f64::from(state.t);
    let overlap = state.c_m * angle.cos() + state.c_n * angle.sin();
    (p, overlap.norm_sqr())
}

/// One uniform pair per iteration, `(u_m, u_n)` in `[0, 1)`; phases are
/// `(u − 1/2)·W_φ`. Pre-drawing the stream keeps objective evaluations under
/// common random numbers bit-deterministic.
pub(crate) fn stlm_uniform_draws(t_max: u32, rng: &mut impl Rng) -> Vec<[f64; 2]> {
    (0..t_max)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect()
}

/// Evolves the model over a pre-drawn uniform stream (`draws.len() >= t_max`)
/// and samples observables at every multiple of `sample_every`, including
/// `t = 0`.
pub(crate) fn run_stlm_from_draws(
    params: &StlmParams,
    draws: &[[f64; 2]],
    t_max: u32,
    sample_every: u32,
) -> RealizationSeries {
    debug_assert!(draws.len() >= t_max as usize);
    let n_samples = (t_max / sample_every + 1) as usize;
    let mut series = RealizationSeries::with_capacity(n_samples);
    let mut state = TwoLevelState::initial(params.theta0);
    let (p, f) = observables(&state, params);
    series_push_checked(&mut series, 0, p, f);
    for t in 1..=t_max {
        let [um, un] = draws[(t - 1) as usize];
        let phi_m = (um - 0.5) * params.w_phi;
        let phi_n = (un - 0.5) * params.w_phi;
        state = stlm_step(&state, params, phi_m, phi_n);
        if t % sample_every == 0 {
            let (p, f) = observables(&state, params);
            series_push_checked(&mut series, t, p, f);
        }
    }
    series
}

/// Runs one model realization with fresh phase draws from `rng`.
pub fn run_stlm_realization(
    params: &StlmParams,
    t_max: u32,
    sample_every: u32,
    rng: &mut impl Rng,
) -> Result<RealizationSeries> {
    params.validate()?;
    check_grid(t_max, sample_every)?;
    let draws = stlm_uniform_draws(t_max, rng);
    Ok(run_stlm_from_draws(params, &draws, t_max, sample_every))
}
