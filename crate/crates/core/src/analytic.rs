//! Closed-form decay predictions and the Gaussian-walk Monte Carlo oracle
//! that validates them.
//!
//! # Gaussian width convention
//!
//! Throughout this module a Gaussian of "width Δ" has density ∝ exp(−x²/Δ²),
//! i.e. standard deviation Δ/√2. This differs from the common σ-convention
//! by √2 and is the only convention under which the averages
//! `⟨cos 2x⟩ = e^(−Δ_ϑ² t)` (for the accumulated angle at time t) and
//! `⟨cos φ⟩ = e^(−Δ_φ²/4)` hold, which the closed forms below rely on.
//!
//! The walk model: the rotation angle advances by `ω + η` per iteration with
//! `η` i.i.d. Gaussian of width Δ_ϑ, so `ϑ(t) = ϑ₀ + ωt + Σηₖ`; a relative
//! phase `φ(t)` of width Δ_φ is drawn fresh at every sampled time, and the
//! amplitude pair is `(e^(−γt) cos ϑ(t), e^(−γt+iφ(t)) sin ϑ(t))`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::grover::{check_grid, series_push_checked, GroverGeometry};
use crate::series::RealizationSeries;

/// Decay rate and Gaussian widths, plus the rotation angles they apply to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub gamma: f64,
    pub delta_theta: f64,
    pub delta_phi: f64,
    pub omega: f64,
    pub theta0: f64,
}

impl AnalyticParams {
    pub fn new(
        gamma: f64,
        delta_theta: f64,
        delta_phi: f64,
        omega: f64,
        theta0: f64,
    ) -> Result<Self> {
        let params = Self {
            gamma,
            delta_theta,
            delta_phi,
            omega,
            theta0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn for_geometry(
        gamma: f64,
        delta_theta: f64,
        delta_phi: f64,
        geometry: &GroverGeometry,
    ) -> Result<Self> {
        Self::new(gamma, delta_theta, delta_phi, geometry.omega(), geometry.theta0())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma", self.gamma),
            ("delta_theta", self.delta_theta),
            ("delta_phi", self.delta_phi),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::config(format!(
                    "{name}: must be finite and >= 0, got {value}"
                )));
            }
        }
        if !self.omega.is_finite() || !self.theta0.is_finite() {
            return Err(Error::config("omega/theta0: must be finite".to_string()));
        }
        Ok(())
    }
}

/// Standard deviation of a Gaussian of the stated width (see module docs).
pub(crate) fn width_to_std(width: f64) -> f64 {
    width / SQRT_2
}

/// Ensemble-averaged target probability,
/// `p(t) = (e^(−2γt)/2)·[1 − cos(2ωt + 2ϑ₀)·e^(−Δ_ϑ² t)]`.
pub fn p_analytic(t: u32, params: &AnalyticParams) -> f64 {
    let tf = f64::from(t);
    let envelope = (-2.0 * params.gamma * tf).exp();
    let blur = (-params.delta_theta * params.delta_theta * tf).exp();
    let phase = 2.0 * params.omega * tf + 2.0 * params.theta0;
    envelope / 2.0 * (1.0 - phase.cos() * blur)
}

/// Ensemble-averaged fidelity,
/// `F(t) = (e^(−2γt)/2)·[1 + e^(−Δ_ϑ² t)·{1 − sin²(2ωt + 2ϑ₀)·(1 − e^(−Δ_φ²/4))}]`.
pub fn f_analytic(t: u32, params: &AnalyticParams) -> f64 {
    let tf = f64::from(t);
    let envelope = (-2.0 * params.gamma * tf).exp();
    let blur = (-params.delta_theta * params.delta_theta * tf).exp();
    let phase = 2.0 * params.omega * tf + 2.0 * params.theta0;
    let sin_sq = phase.sin() * phase.sin();
    let dephase = 1.0 - (-params.delta_phi * params.delta_phi / 4.0).exp();
    envelope / 2.0 * (1.0 + blur * (1.0 - sin_sq * dephase))
}

/// Lower envelope of the probability oscillation,
/// `(e^(−2γt)/2)·(1 − e^(−Δ_ϑ² t))`: nonzero once the angle uncertainty has
/// accumulated, which is why minima of the averaged probability do not reach
/// zero.
pub fn lower_envelope(t: u32, params: &AnalyticParams) -> f64 {
    let tf = f64::from(t);
    let envelope = (-2.0 * params.gamma * tf).exp();
    let blur = (-params.delta_theta * params.delta_theta * tf).exp();
    envelope / 2.0 * (1.0 - blur)
}

/// Upper envelope, `(e^(−2γt)/2)·(1 + e^(−Δ_ϑ² t))`.
pub fn upper_envelope(t: u32, params: &AnalyticParams) -> f64 {
    let tf = f64::from(t);
    let envelope = (-2.0 * params.gamma * tf).exp();
    let blur = (-params.delta_theta * params.delta_theta * tf).exp();
    envelope / 2.0 * (1.0 + blur)
}

/// Runs one Gaussian-walk realization, sampling
/// `p = e^(−2γt)·sin²ϑ(t)` and
/// `F = e^(−2γt)·|cos ϑ(t)·cos(ωt+ϑ₀) + e^(iφ(t))·sin ϑ(t)·sin(ωt+ϑ₀)|²`
/// at every multiple of `sample_every`, including `t = 0` (which also draws
/// a `φ`).
pub fn run_walk_realization(
    params: &AnalyticParams,
    t_max: u32,
    sample_every: u32,
    rng: &mut impl Rng,
) -> Result<RealizationSeries> {
    params.validate()?;
    check_grid(t_max, sample_every)?;
    let step_noise = Normal::new(0.0, width_to_std(params.delta_theta))
        .expect("validated non-negative width");
    let phase_noise =
        Normal::new(0.0, width_to_std(params.delta_phi)).expect("validated non-negative width");

    let n_samples = (t_max / sample_every + 1) as usize;
    let mut series = RealizationSeries::with_capacity(n_samples);
    // Only the accumulated noise is tracked; ϑ(t) = ϑ₀ + ωt + walk.
    let mut walk = 0.0f64;
    record_walk_sample(params, 0, walk, phase_noise.sample(rng), &mut series);
    for t in 1..=t_max {
        walk += step_noise.sample(rng);
        if t % sample_every == 0 {
            record_walk_sample(params, t, walk, phase_noise.sample(rng), &mut series);
        }
    }
    Ok(series)
}

fn record_walk_sample(
    params: &AnalyticParams,
    t: u32,
    walk: f64,
    phi: f64,
    series: &mut RealizationSeries,
) {
    let tf = f64::from(t);
    let envelope = (-2.0 * params.gamma * tf).exp();
    let ideal_angle = params.theta0 + params.omega * tf;
    let theta = ideal_angle + walk;
    let p = envelope * theta.sin() * theta.sin();
    let overlap = theta.cos() * ideal_angle.cos()
        + Complex64::from_polar(1.0, phi) * (theta.sin() * ideal_angle.sin());
    let f = envelope * overlap.norm_sqr();
    series_push_checked(series, t, p, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params_13(gamma: f64, delta_theta: f64, delta_phi: f64) -> AnalyticParams {
        let geometry = GroverGeometry::new(13).unwrap();
        AnalyticParams::for_geometry(gamma, delta_theta, delta_phi, &geometry).unwrap()
    }

    #[test]
    fn probability_formula_limits() {
        let p = params_13(3.4e-3, 0.02, 0.0);
        assert_abs_diff_eq!(p_analytic(0, &p), 1.0 / 8192.0, epsilon = 1e-15);

        let ideal = params_13(0.0, 0.0, 0.0);
        for t in [0u32, 35, 71, 213, 800] {
            let angle = ideal.theta0 + ideal.omega * f64::from(t);
            assert_abs_diff_eq!(p_analytic(t, &ideal), angle.sin().powi(2), epsilon = 1e-14);
        }
    }

    #[test]
    fn probability_formula_frozen_value() {
        // Frozen from a high-precision evaluation at the module parameters.
        let p = params_13(3.0e-3, 4.2e-2, 0.0);
        assert_abs_diff_eq!(p_analytic(71, &p), 0.6146259035474398, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_formula_limits() {
        let ideal = params_13(0.0, 0.0, 0.0);
        for t in [0u32, 17, 71, 400] {
            assert_eq!(f_analytic(t, &ideal), 1.0);
        }

        // With no relative-phase noise the fidelity is exactly the mean of
        // the two envelopes.
        let p = params_13(2e-3, 0.03, 0.0);
        for t in [0u32, 50, 300, 999] {
            let tf = f64::from(t);
            let expected = (-2.0 * p.gamma * tf).exp() / 2.0
                * (1.0 + (-p.delta_theta * p.delta_theta * tf).exp());
            assert_abs_diff_eq!(f_analytic(t, &p), expected, epsilon = 1e-15);
            assert_abs_diff_eq!(upper_envelope(t, &p), expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn relative_phase_noise_only_lowers_fidelity() {
        let base = params_13(1e-3, 0.02, 0.0);
        let noisy = params_13(1e-3, 0.02, 0.3);
        for t in 0..=500u32 {
            assert!(f_analytic(t, &noisy) <= f_analytic(t, &base) + 1e-15);
        }
    }

    #[test]
    fn formulas_stay_inside_the_decay_envelope() {
        let p = params_13(2.5e-3, 0.042, 0.3);
        for t in 1..=600u32 {
            let envelope = (-2.0 * p.gamma * f64::from(t)).exp();
            let pv = p_analytic(t, &p);
            let fv = f_analytic(t, &p);
            assert!(pv >= 0.0 && pv <= envelope + 1e-15);
            assert!(fv >= 0.0 && fv <= envelope + 1e-15);
        }
    }

    #[test]
    fn rescaled_fidelity_envelope_is_strictly_decreasing() {
        let p = params_13(1.7e-3, 0.03, 0.0);
        let mut last = f64::INFINITY;
        for t in 0..=400u32 {
            let rescaled = (2.0 * p.gamma * f64::from(t)).exp() * 2.0 * f_analytic(t, &p) - 1.0;
            assert!(rescaled < last);
            last = rescaled;
        }
    }

    #[test]
    fn noiseless_walk_is_the_ideal_series() {
        let params = params_13(0.0, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let series = run_walk_realization(&params, 300, 20, &mut rng).unwrap();
        for (i, &t) in series.sample_times.iter().enumerate() {
            let angle = params.theta0 + params.omega * f64::from(t);
            assert_abs_diff_eq!(series.p[i], angle.sin().powi(2), epsilon = 1e-15);
            assert_abs_diff_eq!(series.fidelity[i], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn walk_is_deterministic_per_seed() {
        let params = params_13(1e-3, 0.03, 0.2);
        let a = run_walk_realization(&params, 200, 10, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = run_walk_realization(&params, 200, 10, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn accumulated_walk_width_grows_as_sqrt_t() {
        // Sample width (std · √2) of Σηₖ at t = 400 should be Δ_ϑ·√t.
        let delta_theta = 0.03;
        let t = 400u32;
        let m = 100_000usize;
        let noise = Normal::new(0.0, width_to_std(delta_theta)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut sum_sq = 0.0;
        for _ in 0..m {
            let total: f64 = (0..t).map(|_| noise.sample(&mut rng)).sum();
            sum_sq += total * total;
        }
        let sample_width = (sum_sq / m as f64).sqrt() * SQRT_2;
        let expected = delta_theta * f64::from(t).sqrt();
        assert!(
            (sample_width / expected - 1.0).abs() < 0.05,
            "width {sample_width} vs {expected}"
        );
    }

    #[test]
    fn params_validation() {
        let geometry = GroverGeometry::new(13).unwrap();
        assert!(AnalyticParams::for_geometry(-1e-3, 0.0, 0.0, &geometry).is_err());
        assert!(AnalyticParams::for_geometry(0.0, -0.1, 0.0, &geometry).is_err());
        assert!(AnalyticParams::for_geometry(0.0, 0.0, f64::INFINITY, &geometry).is_err());
    }
}
