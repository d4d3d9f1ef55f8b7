//! Parameter recovery: effective-model parameters are fit to ensemble data
//! by minimizing the summed squared residuals of both observables over a
//! time window that excludes the saturated tail.
//!
//! Two fitters share one optimizer (multi-start grid seeding plus bounded
//! Nelder-Mead, see [`crate::simplex`]):
//!
//! * [`fit_analytic`] — fits the closed forms, parameters `(γ, Δ_ϑ[, Δ_φ])`.
//! * [`fit_stlm`] — fits a two-level-model ensemble, parameters `(γ, W_φ)`,
//!   evaluated with common random numbers: the model's noise streams are
//!   fixed by `fit_seed` across all objective evaluations, so the objective
//!   is deterministic (and smooth) in the parameters.
//!
//! The default fit window is `[0, t_hi]` with `t_hi` the first sample where
//! the mean fidelity drops below 0.02; past that point the saturation floor
//! of the full register, absent from the effective models by construction,
//! would bias the fit.

use rayon::prelude::*;

use crate::analytic::{f_analytic, p_analytic, AnalyticParams};
use crate::ensemble::{realization_rng, ModelTag};
use crate::error::{Error, Result};
use crate::grover::GroverGeometry;
use crate::series::{RealizationSeries, SeriesView};
use crate::simplex::minimize_multistart;
use crate::stlm::{run_stlm_from_draws, stlm_uniform_draws, StlmParams};

/// Mean-fidelity level below which samples are excluded from fitting.
pub const FIDELITY_FLOOR: f64 = 0.02;
/// Minimum number of samples inside the fit window.
pub const MIN_FIT_POINTS: usize = 10;
/// Simplex convergence tolerance, in box-scaled parameters.
pub const DIAMETER_TOL: f64 = 1e-6;
/// Iteration cap per simplex start.
const MAX_ITERS: usize = 400;

pub const GAMMA_BOUNDS: (f64, f64) = (0.0, 0.1);
pub const WIDTH_BOUNDS: (f64, f64) = (0.0, 0.5);

/// Recovered parameters with fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: Vec<(String, f64)>,
    pub sse: f64,
    pub n_points: usize,
    pub evaluations: u64,
    pub converged: bool,
    pub fit_window: (u32, u32),
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }
}

/// Knobs shared by both fitters. `window` overrides the automatic
/// fidelity-floor window; `f_weight` scales the fidelity residuals relative
/// to the probability residuals (1 = equal weighting).
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub window: Option<(u32, u32)>,
    pub f_weight: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            window: None,
            f_weight: 1.0,
        }
    }
}

/// `[0, t_hi]` with `t_hi` the first sample whose fidelity is below
/// [`FIDELITY_FLOOR`], or the last sample when none is.
pub fn default_fit_window(series: SeriesView<'_>) -> (u32, u32) {
    let t_hi = series
        .times
        .iter()
        .zip(series.f)
        .find(|(_, &f)| f < FIDELITY_FLOOR)
        .map(|(&t, _)| t)
        .or_else(|| series.times.last().copied())
        .unwrap_or(0);
    (0, t_hi)
}

/// Unweighted squared distance between two series over their common sample
/// times inside `window`: `Σ (Δp)² + (ΔF)²`.
pub fn series_sse(a: SeriesView<'_>, b: SeriesView<'_>, window: (u32, u32)) -> Result<f64> {
    let (sse, count) = sse_weighted(a, b, window, 1.0);
    if count == 0 {
        return Err(Error::invalid(
            "no overlapping sample times inside the fit window",
        ));
    }
    Ok(sse)
}

fn sse_weighted(a: SeriesView<'_>, b: SeriesView<'_>, window: (u32, u32), f_weight: f64) -> (f64, usize) {
    let mut i = 0;
    let mut j = 0;
    let mut sse = 0.0;
    let mut count = 0;
    while i < a.times.len() && j < b.times.len() {
        match a.times[i].cmp(&b.times[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let t = a.times[i];
                if t >= window.0 && t <= window.1 {
                    let dp = a.p[i] - b.p[j];
                    let df = a.f[i] - b.f[j];
                    sse += dp * dp + f_weight * df * df;
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    (sse, count)
}

fn validate_data(ga: SeriesView<'_>) -> Result<()> {
    if ga.times.len() != ga.p.len() || ga.times.len() != ga.f.len() {
        return Err(Error::data("series columns differ in length".to_string()));
    }
    if ga.p.iter().chain(ga.f).any(|v| !v.is_finite()) {
        return Err(Error::data("series contains non-finite values".to_string()));
    }
    Ok(())
}

fn resolve_window(ga: SeriesView<'_>, options: &FitOptions) -> Result<(u32, u32)> {
    let window = options.window.unwrap_or_else(|| default_fit_window(ga));
    let in_window = ga
        .times
        .iter()
        .filter(|&&t| t >= window.0 && t <= window.1)
        .count();
    if in_window < MIN_FIT_POINTS {
        return Err(Error::invalid(format!(
            "only {in_window} samples inside fit window [{}, {}], need at least {MIN_FIT_POINTS}",
            window.0, window.1
        )));
    }
    Ok(window)
}

/// Fits the closed-form curves to ensemble mean data over `(γ, Δ_ϑ)` — plus
/// `Δ_φ` unless `fix_delta_phi_zero` — with bounds γ ∈ [0, 0.1],
/// Δ ∈ [0, 0.5].
pub fn fit_analytic(
    ga: SeriesView<'_>,
    geometry: &GroverGeometry,
    fix_delta_phi_zero: bool,
) -> Result<FitResult> {
    fit_analytic_with(ga, geometry, fix_delta_phi_zero, &FitOptions::default())
}

pub fn fit_analytic_with(
    ga: SeriesView<'_>,
    geometry: &GroverGeometry,
    fix_delta_phi_zero: bool,
    options: &FitOptions,
) -> Result<FitResult> {
    validate_data(ga)?;
    let window = resolve_window(ga, options)?;

    let dim = if fix_delta_phi_zero { 2 } else { 3 };
    let lo = vec![GAMMA_BOUNDS.0, WIDTH_BOUNDS.0, WIDTH_BOUNDS.0];
    let hi = vec![GAMMA_BOUNDS.1, WIDTH_BOUNDS.1, WIDTH_BOUNDS.1];
    let mut n_points = 0;
    let mut objective = |x: &[f64]| {
        let params = AnalyticParams {
            gamma: x[0],
            delta_theta: x[1],
            delta_phi: if fix_delta_phi_zero { 0.0 } else { x[2] },
            omega: geometry.omega(),
            theta0: geometry.theta0(),
        };
        let mut sse = 0.0;
        let mut count = 0;
        for (i, &t) in ga.times.iter().enumerate() {
            if t < window.0 || t > window.1 {
                continue;
            }
            let dp = p_analytic(t, &params) - ga.p[i];
            let df = f_analytic(t, &params) - ga.f[i];
            sse += dp * dp + options.f_weight * df * df;
            count += 1;
        }
        n_points = count;
        sse
    };
    let outcome = minimize_multistart(&mut objective, &lo[..dim], &hi[..dim], DIAMETER_TOL, MAX_ITERS);

    let mut params = vec![
        ("gamma".to_string(), outcome.x[0]),
        ("delta_theta".to_string(), outcome.x[1]),
    ];
    if !fix_delta_phi_zero {
        params.push(("delta_phi".to_string(), outcome.x[2]));
    }
    Ok(FitResult {
        params,
        sse: outcome.value,
        n_points,
        evaluations: outcome.evaluations,
        converged: outcome.converged,
        fit_window: window,
    })
}

/// Fits a two-level-model ensemble of `m_stlm` realizations to ensemble mean
/// data over `(γ, W_φ)`. The model's uniform draws are generated once from
/// `fit_seed` (stream `i` identical to an ensemble run with that master
/// seed) and reused for every objective evaluation.
pub fn fit_stlm(
    ga: SeriesView<'_>,
    geometry: &GroverGeometry,
    m_stlm: usize,
    fit_seed: u64,
) -> Result<FitResult> {
    fit_stlm_with(ga, geometry, m_stlm, fit_seed, &FitOptions::default())
}

pub fn fit_stlm_with(
    ga: SeriesView<'_>,
    geometry: &GroverGeometry,
    m_stlm: usize,
    fit_seed: u64,
    options: &FitOptions,
) -> Result<FitResult> {
    validate_data(ga)?;
    let window = resolve_window(ga, options)?;
    if m_stlm < 1 {
        return Err(Error::invalid("m_stlm must be at least 1"));
    }
    let sample_every = uniform_grid_step(ga.times)?;
    let t_hi = window.1;

    // Common random numbers: one frozen uniform stream per realization.
    let draws: Vec<Vec<[f64; 2]>> = (0..m_stlm)
        .into_par_iter()
        .map(|i| {
            stlm_uniform_draws(t_hi, &mut realization_rng(fit_seed, ModelTag::Stlm, i as u64))
        })
        .collect();
    let grid = crate::series::sample_grid(t_hi, sample_every);

    let mut n_points = 0;
    let mut objective = |x: &[f64]| {
        let params = StlmParams {
            gamma: x[0],
            w_phi: x[1],
            omega: geometry.omega(),
            theta0: geometry.theta0(),
        };
        let runs: Vec<RealizationSeries> = draws
            .par_iter()
            .map(|d| run_stlm_from_draws(&params, d, t_hi, sample_every))
            .collect();
        let mut p_mean = vec![0.0; grid.len()];
        let mut f_mean = vec![0.0; grid.len()];
        for run in &runs {
            for (acc, v) in p_mean.iter_mut().zip(&run.p) {
                *acc += *v;
            }
            for (acc, v) in f_mean.iter_mut().zip(&run.fidelity) {
                *acc += *v;
            }
        }
        // Same fold-then-divide as the ensemble aggregation, so the model
        // means here are bit-identical to a `run_ensemble` with this seed.
        for v in p_mean.iter_mut().chain(f_mean.iter_mut()) {
            *v /= m_stlm as f64;
        }
        let model = SeriesView {
            times: &grid,
            p: &p_mean,
            f: &f_mean,
        };
        let (sse, count) = sse_weighted(model, ga, window, options.f_weight);
        n_points = count;
        sse
    };
    let lo = [GAMMA_BOUNDS.0, WIDTH_BOUNDS.0];
    let hi = [GAMMA_BOUNDS.1, WIDTH_BOUNDS.1];
    let outcome = minimize_multistart(&mut objective, &lo, &hi, DIAMETER_TOL, MAX_ITERS);

    Ok(FitResult {
        params: vec![
            ("gamma".to_string(), outcome.x[0]),
            ("w_phi".to_string(), outcome.x[1]),
        ],
        sse: outcome.value,
        n_points,
        evaluations: outcome.evaluations,
        converged: outcome.converged,
        fit_window: window,
    })
}

/// The model ensemble inside the objective needs the data's grid; require
/// the uniform `0, s, 2s, …` layout every producer in this crate emits.
fn uniform_grid_step(times: &[u32]) -> Result<u32> {
    if times.len() < 2 || times[0] != 0 {
        return Err(Error::invalid(
            "model fitting requires a uniform sample grid starting at t = 0",
        ));
    }
    let step = times[1] - times[0];
    if step == 0 || !times.windows(2).all(|w| w[1] - w[0] == step) {
        return Err(Error::invalid(
            "model fitting requires uniformly spaced sample times",
        ));
    }
    Ok(step)
}
