//! Command implementations behind the `groverlab` binary: configuration
//! resolution (flags over config file over defaults), experiment runs with
//! CSV output, fitting from CSV, and the standard figure pipeline.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use crate::analytic::{f_analytic, p_analytic, AnalyticParams};
use crate::csv_io::{self, CsvSeries};
use crate::ensemble::{run_ensemble, EnsembleSeries, ModelConfig};
use crate::error::{Error, Result};
use crate::fit::{fit_analytic_with, fit_stlm_with, FitOptions, FitResult};
use crate::grover::{GaConfig, GroverGeometry};
use crate::series::sample_grid;
use crate::stlm::StlmParams;
use crate::svg::{LineChart, SeriesMark};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GROVERLAB_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Ga,
    Stlm,
    Walk,
    Analytic,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ga => "ga",
            ModelKind::Stlm => "stlm",
            ModelKind::Walk => "walk",
            ModelKind::Analytic => "analytic",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "ga" => Ok(ModelKind::Ga),
            "stlm" => Ok(ModelKind::Stlm),
            "walk" => Ok(ModelKind::Walk),
            "analytic" => Ok(ModelKind::Analytic),
            other => Err(Error::config(format!(
                "model: unknown model `{other}` (expected ga|stlm|walk|analytic)"
            ))),
        }
    }
}

/// Option bag as collected from flags or a key=value config file; `None`
/// means "not given". Flags win over file entries on conflict.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawRunConfig {
    pub model: Option<String>,
    pub nq: Option<u32>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub wphi: Option<f64>,
    pub delta_theta: Option<f64>,
    pub delta_phi: Option<f64>,
    pub tmax: Option<u32>,
    pub sample_every: Option<u32>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub target_j: Option<usize>,
    pub shared_layer_draws: Option<bool>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RawRunConfig {
    /// `self` wins over `base` field by field.
    pub fn merged_over(self, base: RawRunConfig) -> RawRunConfig {
        RawRunConfig {
            model: self.model.or(base.model),
            nq: self.nq.or(base.nq),
            epsilon: self.epsilon.or(base.epsilon),
            gamma: self.gamma.or(base.gamma),
            wphi: self.wphi.or(base.wphi),
            delta_theta: self.delta_theta.or(base.delta_theta),
            delta_phi: self.delta_phi.or(base.delta_phi),
            tmax: self.tmax.or(base.tmax),
            sample_every: self.sample_every.or(base.sample_every),
            m: self.m.or(base.m),
            seed: self.seed.or(base.seed),
            target_j: self.target_j.or(base.target_j),
            shared_layer_draws: self.shared_layer_draws.or(base.shared_layer_draws),
            workers: self.workers.or(base.workers),
            out: self.out.or(base.out),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys are the long
    /// flag names.
    pub fn from_key_values(text: &str) -> Result<RawRunConfig> {
        let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected key=value, found `{line}`"),
            })?;
            entries.insert(key.trim(), value.trim());
        }

        let mut cfg = RawRunConfig::default();
        for (key, value) in entries {
            let bad = |e: String| Error::config(format!("{key}: {e}"));
            match key {
                "model" => cfg.model = Some(value.to_string()),
                "nq" => cfg.nq = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "epsilon" => cfg.epsilon = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "gamma" => cfg.gamma = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "wphi" => cfg.wphi = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "delta-theta" => {
                    cfg.delta_theta = Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "delta-phi" => {
                    cfg.delta_phi = Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "tmax" => cfg.tmax = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "sample-every" => {
                    cfg.sample_every = Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "m" => cfg.m = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "seed" => cfg.seed = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "target-j" => cfg.target_j = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "shared-layer-draws" => {
                    cfg.shared_layer_draws =
                        Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "workers" => cfg.workers = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::config(format!("unknown config key `{other}`")));
                }
            }
        }
        Ok(cfg)
    }

    /// Validates model-specific parameter presence and fills defaults.
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let model = ModelKind::parse(
            self.model
                .as_deref()
                .ok_or_else(|| Error::config("model: required (ga|stlm|walk|analytic)"))?,
        )?;

        let reject = |given: bool, field: &str| -> Result<()> {
            if given {
                Err(Error::config(format!(
                    "{field}: not a parameter of model `{}`",
                    model.as_str()
                )))
            } else {
                Ok(())
            }
        };
        let require_f64 = |value: Option<f64>, field: &str| -> Result<f64> {
            value.ok_or_else(|| {
                Error::config(format!(
                    "{field}: required for model `{}`",
                    model.as_str()
                ))
            })
        };

        match model {
            ModelKind::Ga => {
                reject(self.gamma.is_some(), "gamma")?;
                reject(self.wphi.is_some(), "wphi")?;
                reject(self.delta_theta.is_some(), "delta-theta")?;
                reject(self.delta_phi.is_some(), "delta-phi")?;
            }
            ModelKind::Stlm => {
                reject(self.epsilon.is_some(), "epsilon")?;
                reject(self.delta_theta.is_some(), "delta-theta")?;
                reject(self.delta_phi.is_some(), "delta-phi")?;
                reject(self.target_j.is_some(), "target-j")?;
                reject(self.shared_layer_draws.is_some(), "shared-layer-draws")?;
            }
            ModelKind::Walk | ModelKind::Analytic => {
                reject(self.epsilon.is_some(), "epsilon")?;
                reject(self.wphi.is_some(), "wphi")?;
                reject(self.target_j.is_some(), "target-j")?;
                reject(self.shared_layer_draws.is_some(), "shared-layer-draws")?;
                if model == ModelKind::Analytic {
                    reject(self.m.is_some(), "m")?;
                }
            }
        }

        let epsilon = match model {
            ModelKind::Ga => require_f64(self.epsilon, "epsilon")?,
            _ => 0.0,
        };
        let (gamma, w_phi) = match model {
            ModelKind::Stlm => (
                require_f64(self.gamma, "gamma")?,
                require_f64(self.wphi, "wphi")?,
            ),
            ModelKind::Walk | ModelKind::Analytic => (self.gamma.unwrap_or(0.0), 0.0),
            ModelKind::Ga => (0.0, 0.0),
        };

        let m_default = match model {
            ModelKind::Ga => 100,
            ModelKind::Stlm => 1000,
            ModelKind::Walk => 100_000,
            ModelKind::Analytic => 1,
        };
        let config = ExperimentConfig {
            model,
            n_qubits: self.nq.unwrap_or(13),
            epsilon,
            gamma,
            w_phi,
            delta_theta: self.delta_theta.unwrap_or(0.0),
            delta_phi: self.delta_phi.unwrap_or(0.0),
            t_max: self.tmax.unwrap_or(1400),
            sample_every: self.sample_every.unwrap_or(20),
            m: self.m.unwrap_or(m_default),
            seed: self.seed.unwrap_or(7),
            target_j: self.target_j.unwrap_or(0),
            shared_layer_draws: self.shared_layer_draws.unwrap_or(false),
            out: self.out,
        };
        config.model_config()?; // surface validation errors now
        Ok(config)
    }
}

/// A fully resolved run request.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub n_qubits: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub w_phi: f64,
    pub delta_theta: f64,
    pub delta_phi: f64,
    pub t_max: u32,
    pub sample_every: u32,
    pub m: usize,
    pub seed: u64,
    pub target_j: usize,
    pub shared_layer_draws: bool,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn geometry(&self) -> Result<GroverGeometry> {
        GroverGeometry::new(self.n_qubits)
    }

    /// The ensemble-layer config for simulation models; `None` for the
    /// closed-form model.
    pub fn model_config(&self) -> Result<Option<ModelConfig>> {
        let config = match self.model {
            ModelKind::Ga => {
                let cfg = GaConfig {
                    n_qubits: self.n_qubits,
                    target: self.target_j,
                    epsilon: self.epsilon,
                    shared_layer_draws: self.shared_layer_draws,
                    t_max: self.t_max,
                    sample_every: self.sample_every,
                };
                cfg.validate()?;
                Some(ModelConfig::Ga(cfg))
            }
            ModelKind::Stlm => {
                let geometry = self.geometry()?;
                let config = ModelConfig::Stlm {
                    params: StlmParams::for_geometry(self.gamma, self.w_phi, &geometry)?,
                    t_max: self.t_max,
                    sample_every: self.sample_every,
                };
                config.validate()?;
                Some(config)
            }
            ModelKind::Walk => {
                let geometry = self.geometry()?;
                let config = ModelConfig::Walk {
                    params: AnalyticParams::for_geometry(
                        self.gamma,
                        self.delta_theta,
                        self.delta_phi,
                        &geometry,
                    )?,
                    t_max: self.t_max,
                    sample_every: self.sample_every,
                };
                config.validate()?;
                Some(config)
            }
            ModelKind::Analytic => {
                let geometry = self.geometry()?;
                // Validate parameters even though no ensemble runs.
                AnalyticParams::for_geometry(
                    self.gamma,
                    self.delta_theta,
                    self.delta_phi,
                    &geometry,
                )?;
                crate::grover::check_grid(self.t_max, self.sample_every)?;
                None
            }
        };
        Ok(config)
    }

    /// Output path: explicit `out`, else `<model>.csv` inside the
    /// `GROVERLAB_OUT_DIR` directory (or the working directory).
    pub fn output_path(&self) -> PathBuf {
        match &self.out {
            Some(path) => path.clone(),
            None => default_out_dir().join(format!("{}.csv", self.model.as_str())),
        }
    }
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// What `cmd_run` reports on stdout.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub path: PathBuf,
    pub rows: usize,
    pub max_p_mean: f64,
    pub max_p_at: u32,
    pub wall_seconds: f64,
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "max p_mean = {:.6} at t = {}; wall time = {:.2} s; wrote {} rows to {}",
            self.max_p_mean,
            self.max_p_at,
            self.wall_seconds,
            self.rows,
            self.path.display()
        )
    }
}

/// Runs the configured experiment and writes its CSV.
pub fn cmd_run(config: &ExperimentConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let csv = match config.model_config()? {
        Some(model_config) => {
            let ensemble = run_ensemble(&model_config, config.m, config.seed)?;
            csv_io::ensemble_to_csv(&ensemble)
        }
        None => analytic_csv(config)?,
    };
    let path = config.output_path();
    csv_io::write_csv(&path, &csv)?;

    let parsed = csv_io::parse_csv(&csv).expect("writer emits valid csv");
    let (max_idx, max_p) = parsed
        .p_mean
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    Ok(RunSummary {
        path,
        rows: parsed.len(),
        max_p_mean: max_p,
        max_p_at: parsed.t[max_idx],
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

fn analytic_csv(config: &ExperimentConfig) -> Result<String> {
    let geometry = config.geometry()?;
    let params = AnalyticParams::for_geometry(
        config.gamma,
        config.delta_theta,
        config.delta_phi,
        &geometry,
    )?;
    let times = sample_grid(config.t_max, config.sample_every);
    let p: Vec<f64> = times.iter().map(|&t| p_analytic(t, &params)).collect();
    let f: Vec<f64> = times.iter().map(|&t| f_analytic(t, &params)).collect();
    let zeros = vec![0.0; times.len()];
    Ok(csv_io::format_csv(&times, &p, &zeros, &f, &zeros))
}

/// Fit request resolved from flags.
#[derive(Debug, Clone)]
pub struct FitRequest {
    pub csv_path: PathBuf,
    pub mode: FitMode,
    pub n_qubits: u32,
    pub fix_delta_phi_zero: bool,
    pub m_stlm: usize,
    pub seed: u64,
    pub f_weight: f64,
    pub window: Option<(u32, u32)>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    Stlm,
    Analytic,
}

impl FitMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "stlm" => Ok(FitMode::Stlm),
            "analytic" => Ok(FitMode::Analytic),
            other => Err(Error::config(format!(
                "mode: unknown fit mode `{other}` (expected stlm|analytic)"
            ))),
        }
    }
}

/// Loads the CSV, runs the requested fitter, optionally writes the fitted
/// curve, and returns the result for printing.
pub fn cmd_fit(request: &FitRequest) -> Result<FitResult> {
    let data = csv_io::read_csv(&request.csv_path)?;
    let geometry = GroverGeometry::new(request.n_qubits)?;
    let options = FitOptions {
        window: request.window,
        f_weight: request.f_weight,
    };
    let fit = match request.mode {
        FitMode::Analytic => fit_analytic_with(
            data.view(),
            &geometry,
            request.fix_delta_phi_zero,
            &options,
        )?,
        FitMode::Stlm => fit_stlm_with(
            data.view(),
            &geometry,
            request.m_stlm,
            request.seed,
            &options,
        )?,
    };

    if let Some(out) = &request.out {
        let csv = fitted_curve_csv(request, &geometry, &fit, &data)?;
        csv_io::write_csv(out, &csv)?;
    }
    Ok(fit)
}

/// The fitted model evaluated on the data's grid.
fn fitted_curve_csv(
    request: &FitRequest,
    geometry: &GroverGeometry,
    fit: &FitResult,
    data: &CsvSeries,
) -> Result<String> {
    match request.mode {
        FitMode::Analytic => {
            let params = AnalyticParams::for_geometry(
                fit.param("gamma").unwrap_or(0.0),
                fit.param("delta_theta").unwrap_or(0.0),
                fit.param("delta_phi").unwrap_or(0.0),
                geometry,
            )?;
            let p: Vec<f64> = data.t.iter().map(|&t| p_analytic(t, &params)).collect();
            let f: Vec<f64> = data.t.iter().map(|&t| f_analytic(t, &params)).collect();
            let zeros = vec![0.0; data.t.len()];
            Ok(csv_io::format_csv(&data.t, &p, &zeros, &f, &zeros))
        }
        FitMode::Stlm => {
            let step = data.t.get(1).copied().unwrap_or(1).max(1);
            let t_max = data.t.last().copied().unwrap_or(1).max(1);
            let config = ModelConfig::Stlm {
                params: StlmParams::for_geometry(
                    fit.param("gamma").unwrap_or(0.0),
                    fit.param("w_phi").unwrap_or(0.0),
                    geometry,
                )?,
                t_max,
                sample_every: step,
            };
            let ensemble = run_ensemble(&config, request.m_stlm, request.seed)?;
            Ok(csv_io::ensemble_to_csv(&ensemble))
        }
    }
}

/// Calibrated effective-model parameters per imperfection strength, used by
/// the figure pipeline as overlay curves: `(epsilon, gamma, w_phi,
/// delta_theta)`.
pub const OVERLAY_PARAMS: [(f64, f64, f64, f64); 3] = [
    (0.005, 7.6e-4, 0.089, 2.0e-2),
    (0.01, 3.0e-3, 0.19, 4.2e-2),
    (0.02, 1.3e-2, 0.25, 3.5e-2),
];

#[derive(Debug, Clone)]
pub struct FiguresRequest {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub m_ga: usize,
}

/// Runs the standard pipeline: register ensembles at four imperfection
/// strengths plus two-level and closed-form overlays, persisted as CSV files
/// and per-panel SVG charts. Returns the written paths.
pub fn cmd_figures(request: &FiguresRequest) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&request.out_dir)?;
    let n_qubits = 13;
    let t_max = 1400;
    let sample_every = 20;
    let geometry = GroverGeometry::new(n_qubits)?;
    let mut written = Vec::new();

    let write = |name: &str, content: &str, written: &mut Vec<PathBuf>| -> Result<()> {
        let path = request.out_dir.join(name);
        csv_io::write_csv(&path, content)?;
        written.push(path);
        Ok(())
    };

    // Ideal reference curve.
    let ideal_times = sample_grid(t_max, sample_every);
    let ideal_p: Vec<f64> = ideal_times
        .iter()
        .map(|&t| geometry.ideal_target_probability(t))
        .collect();
    let ones = vec![1.0; ideal_times.len()];
    let zeros = vec![0.0; ideal_times.len()];
    write(
        "ga-ideal.csv",
        &csv_io::format_csv(&ideal_times, &ideal_p, &zeros, &ones, &zeros),
        &mut written,
    )?;

    for (panel, &(epsilon, gamma, w_phi, delta_theta)) in OVERLAY_PARAMS.iter().enumerate() {
        let panel_name = ['a', 'b', 'c'][panel];

        let ga_config = ModelConfig::Ga(GaConfig {
            n_qubits,
            target: 0,
            epsilon,
            shared_layer_draws: false,
            t_max,
            sample_every,
        });
        let ga = run_ensemble(&ga_config, request.m_ga, request.seed)?;
        write(
            &format!("ga-eps{epsilon}.csv"),
            &csv_io::ensemble_to_csv(&ga),
            &mut written,
        )?;

        let stlm_config = ModelConfig::Stlm {
            params: StlmParams::for_geometry(gamma, w_phi, &geometry)?,
            t_max,
            sample_every,
        };
        let stlm = run_ensemble(&stlm_config, 1000, request.seed)?;
        write(
            &format!("stlm-eps{epsilon}.csv"),
            &csv_io::ensemble_to_csv(&stlm),
            &mut written,
        )?;

        let analytic_params = AnalyticParams::for_geometry(gamma, delta_theta, 0.0, &geometry)?;
        let times = sample_grid(t_max, sample_every);
        let p: Vec<f64> = times.iter().map(|&t| p_analytic(t, &analytic_params)).collect();
        let f: Vec<f64> = times.iter().map(|&t| f_analytic(t, &analytic_params)).collect();
        write(
            &format!("analytic-eps{epsilon}.csv"),
            &csv_io::format_csv(&times, &p, &zeros, &f, &zeros),
            &mut written,
        )?;

        // Panel 1: register data vs two-level model.
        let mut chart = LineChart::new(
            format!("register vs two-level model, epsilon = {epsilon}"),
            "iteration t",
            "probability / fidelity",
        );
        if panel == 0 {
            chart.add_series(
                "ideal p_j",
                "#999999",
                SeriesMark::DottedLine,
                zip_points(&ideal_times, &ideal_p),
            );
        }
        chart.add_series("p_j (register)", "#1f77b4", SeriesMark::Circles, ensemble_points_p(&ga));
        chart.add_series("F (register)", "#d62728", SeriesMark::Circles, ensemble_points_f(&ga));
        chart.add_series("p_j (two-level)", "#1f77b4", SeriesMark::Line, ensemble_points_p(&stlm));
        chart.add_series("F (two-level)", "#d62728", SeriesMark::Line, ensemble_points_f(&stlm));
        let path = request.out_dir.join(format!("fig1{panel_name}.svg"));
        std::fs::write(&path, chart.render())?;
        written.push(path);

        // Panel 2: register data vs closed forms.
        let mut chart = LineChart::new(
            format!("register vs closed forms, epsilon = {epsilon}"),
            "iteration t",
            "probability / fidelity",
        );
        chart.add_series("p_j (register)", "#1f77b4", SeriesMark::Circles, ensemble_points_p(&ga));
        chart.add_series("F (register)", "#d62728", SeriesMark::Circles, ensemble_points_f(&ga));
        chart.add_series("p_j (formula)", "#1f77b4", SeriesMark::Line, zip_points(&times, &p));
        chart.add_series("F (formula)", "#d62728", SeriesMark::Line, zip_points(&times, &f));
        let path = request.out_dir.join(format!("fig2{panel_name}.svg"));
        std::fs::write(&path, chart.render())?;
        written.push(path);
    }

    // The noise-free register run rounds out the set.
    let ga0 = ModelConfig::Ga(GaConfig {
        n_qubits,
        target: 0,
        epsilon: 0.0,
        shared_layer_draws: false,
        t_max: 400,
        sample_every: 1,
    });
    let ideal = run_ensemble(&ga0, 1, request.seed)?;
    write("ga-eps0.csv", &csv_io::ensemble_to_csv(&ideal), &mut written)?;

    Ok(written)
}

fn zip_points(t: &[u32], v: &[f64]) -> Vec<(f64, f64)> {
    t.iter().zip(v).map(|(&t, &v)| (f64::from(t), v)).collect()
}

fn ensemble_points_p(e: &EnsembleSeries) -> Vec<(f64, f64)> {
    zip_points(&e.sample_times, &e.p_mean)
}

fn ensemble_points_f(e: &EnsembleSeries) -> Vec<(f64, f64)> {
    zip_points(&e.sample_times, &e.f_mean)
}

/// Exit code mapping shared by every subcommand: configuration, argument,
/// data and parse problems exit 2, I/O problems exit 4 (fit
/// non-convergence exits 3, handled by the caller).
pub fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Io(_) => 4,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_ga() -> RawRunConfig {
        RawRunConfig {
            model: Some("ga".to_string()),
            epsilon: Some(0.01),
            ..RawRunConfig::default()
        }
    }

    #[test]
    fn resolve_fills_model_defaults() {
        let config = base_ga().resolve().unwrap();
        assert_eq!(config.n_qubits, 13);
        assert_eq!(config.t_max, 1400);
        assert_eq!(config.sample_every, 20);
        assert_eq!(config.m, 100);
        assert_eq!(config.seed, 7);
        assert!(!config.shared_layer_draws);

        let stlm = RawRunConfig {
            model: Some("stlm".to_string()),
            gamma: Some(1e-3),
            wphi: Some(0.1),
            ..RawRunConfig::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(stlm.m, 1000);
    }

    #[test]
    fn resolve_rejects_missing_and_foreign_params() {
        let missing = RawRunConfig {
            model: Some("ga".to_string()),
            ..RawRunConfig::default()
        };
        let err = missing.resolve().unwrap_err();
        assert!(err.to_string().contains("epsilon"));

        let foreign = RawRunConfig {
            gamma: Some(0.1),
            ..base_ga()
        };
        let err = foreign.resolve().unwrap_err();
        assert!(err.to_string().contains("gamma"));

        let foreign = RawRunConfig {
            model: Some("stlm".to_string()),
            gamma: Some(1e-3),
            wphi: Some(0.1),
            target_j: Some(3),
            ..RawRunConfig::default()
        };
        let err = foreign.resolve().unwrap_err();
        assert!(err.to_string().contains("target-j"));

        let no_model = RawRunConfig::default();
        assert!(no_model.resolve().is_err());
    }

    #[test]
    fn config_file_parsing_and_precedence() {
        let file = RawRunConfig::from_key_values(
            "# comment\nmodel = ga\nepsilon = 0.02\nseed = 5\n\ntmax=400 # trailing\n",
        )
        .unwrap();
        assert_eq!(file.model.as_deref(), Some("ga"));
        assert_eq!(file.epsilon, Some(0.02));
        assert_eq!(file.tmax, Some(400));

        let flags = RawRunConfig {
            epsilon: Some(0.005),
            ..RawRunConfig::default()
        };
        let merged = flags.merged_over(file);
        assert_eq!(merged.epsilon, Some(0.005)); // flag wins
        assert_eq!(merged.seed, Some(5)); // file fills the rest

        assert!(RawRunConfig::from_key_values("bogus-key = 3\n").is_err());
        assert!(RawRunConfig::from_key_values("no equals sign\n").is_err());
    }

    #[test]
    fn output_path_defaults_to_model_name() {
        let config = base_ga().resolve().unwrap();
        assert_eq!(
            config.output_path().file_name().unwrap().to_str().unwrap(),
            "ga.csv"
        );

        let explicit = RawRunConfig {
            out: Some(PathBuf::from("/tmp/custom.csv")),
            ..base_ga()
        }
        .resolve()
        .unwrap();
        assert_eq!(explicit.output_path(), PathBuf::from("/tmp/custom.csv"));
    }
}
