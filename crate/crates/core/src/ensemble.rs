//! Monte Carlo harness: runs M independent realizations of any model on a
//! common time grid and aggregates means and standard errors, fully
//! deterministic from a master seed.
//!
//! # Seeding scheme
//!
//! Realization `i` of a run uses an RNG stream seeded by the stable mixing
//! chain
//!
//! ```text
//! stream_i = splitmix64( splitmix64(master_seed ⊕ salt(model)) ⊕ i )
//! ```
//!
//! fed to `ChaCha8Rng::seed_from_u64`. Streams are therefore independent
//! across realizations and identical across runs, processes and degrees of
//! parallelism.
//!
//! # Determinism
//!
//! Workers buffer per-realization series and the aggregation is a sequential
//! fold in ascending realization index, so results are bit-identical no
//! matter how the work was scheduled. [`merge_ensembles`] re-folds the
//! buffered realizations of both inputs in index order, which makes a merge
//! of two half-ensembles bit-identical to the corresponding single run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{run_walk_realization, AnalyticParams};
use crate::error::{Error, Result};
use crate::grover::{check_grid, run_ga_realization, GaConfig};
use crate::series::{sample_grid, RealizationSeries};
use crate::stlm::{run_stlm_realization, StlmParams};

/// Which simulation layer an ensemble averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Ga,
    Stlm,
    Walk,
}

impl ModelTag {
    /// Per-model salt for the seed chain; fixed for all time.
    fn salt(self) -> u64 {
        match self {
            ModelTag::Ga => 0x4752_4f56_4552_0001,
            ModelTag::Stlm => 0x5354_4c4d_0000_0002,
            ModelTag::Walk => 0x5741_4c4b_0000_0003,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Ga => "ga",
            ModelTag::Stlm => "stlm",
            ModelTag::Walk => "walk",
        }
    }
}

/// Everything needed to run one realization of one model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Ga(GaConfig),
    Stlm {
        params: StlmParams,
        t_max: u32,
        sample_every: u32,
    },
    Walk {
        params: AnalyticParams,
        t_max: u32,
        sample_every: u32,
    },
}

impl ModelConfig {
    pub fn tag(&self) -> ModelTag {
        match self {
            ModelConfig::Ga(_) => ModelTag::Ga,
            ModelConfig::Stlm { .. } => ModelTag::Stlm,
            ModelConfig::Walk { .. } => ModelTag::Walk,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Ga(cfg) => cfg.validate(),
            ModelConfig::Stlm {
                params,
                t_max,
                sample_every,
            } => {
                params.validate()?;
                check_grid(*t_max, *sample_every)
            }
            ModelConfig::Walk {
                params,
                t_max,
                sample_every,
            } => {
                params.validate()?;
                check_grid(*t_max, *sample_every)
            }
        }
    }

    pub fn sample_times(&self) -> Vec<u32> {
        let (t_max, sample_every) = match self {
            ModelConfig::Ga(cfg) => (cfg.t_max, cfg.sample_every),
            ModelConfig::Stlm {
                t_max,
                sample_every,
                ..
            }
            | ModelConfig::Walk {
                t_max,
                sample_every,
                ..
            } => (*t_max, *sample_every),
        };
        sample_grid(t_max, sample_every)
    }

    fn run_one(&self, rng: &mut ChaCha8Rng) -> Result<RealizationSeries> {
        match self {
            ModelConfig::Ga(cfg) => run_ga_realization(cfg, rng),
            ModelConfig::Stlm {
                params,
                t_max,
                sample_every,
            } => run_stlm_realization(params, *t_max, *sample_every, rng),
            ModelConfig::Walk {
                params,
                t_max,
                sample_every,
            } => run_walk_realization(params, *t_max, *sample_every, rng),
        }
    }

    /// Canonical textual form hashed into the config digest.
    fn canonical_string(&self) -> String {
        match self {
            ModelConfig::Ga(c) => format!(
                "ga;n_qubits={};target={};epsilon={:?};shared={};t_max={};sample_every={}",
                c.n_qubits, c.target, c.epsilon, c.shared_layer_draws, c.t_max, c.sample_every
            ),
            ModelConfig::Stlm {
                params,
                t_max,
                sample_every,
            } => format!(
                "stlm;gamma={:?};w_phi={:?};omega={:?};theta0={:?};t_max={};sample_every={}",
                params.gamma, params.w_phi, params.omega, params.theta0, t_max, sample_every
            ),
            ModelConfig::Walk {
                params,
                t_max,
                sample_every,
            } => format!(
                "walk;gamma={:?};delta_theta={:?};delta_phi={:?};omega={:?};theta0={:?};t_max={};sample_every={}",
                params.gamma,
                params.delta_theta,
                params.delta_phi,
                params.omega,
                params.theta0,
                t_max,
                sample_every
            ),
        }
    }

    /// Digest binding a config and a master seed; ensembles may only be
    /// merged when these agree.
    pub fn digest(&self, master_seed: u64) -> u64 {
        fnv1a(format!("{};master_seed={}", self.canonical_string(), master_seed).as_bytes())
    }
}

/// Per-realization observables buffered row-major, keyed by realization
/// index; retained so merges can re-fold exactly.
#[derive(Debug, Clone, PartialEq)]
struct RawRealizations {
    indices: Vec<u64>,
    p: Vec<f64>,
    f: Vec<f64>,
}

/// Ensemble means and standard errors on a common time grid.
///
/// `stderr = sample standard deviation / √M`, and 0 by convention for M ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSeries {
    pub sample_times: Vec<u32>,
    pub p_mean: Vec<f64>,
    pub p_stderr: Vec<f64>,
    pub f_mean: Vec<f64>,
    pub f_stderr: Vec<f64>,
    pub m_realizations: usize,
    pub model_tag: ModelTag,
    pub config_digest: u64,
    raw: RawRealizations,
}

impl EnsembleSeries {
    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }

    fn from_raw(
        sample_times: Vec<u32>,
        raw: RawRealizations,
        model_tag: ModelTag,
        config_digest: u64,
    ) -> Self {
        let n = sample_times.len();
        let m = raw.indices.len();
        let (p_mean, p_stderr) = column_stats(&raw.p, m, n);
        let (f_mean, f_stderr) = column_stats(&raw.f, m, n);
        EnsembleSeries {
            sample_times,
            p_mean,
            p_stderr,
            f_mean,
            f_stderr,
            m_realizations: m,
            model_tag,
            config_digest,
            raw,
        }
    }

    /// Test-and-plumbing constructor from explicit per-realization rows.
    #[doc(hidden)]
    pub fn from_rows(
        sample_times: Vec<u32>,
        indices: Vec<u64>,
        p_rows: Vec<f64>,
        f_rows: Vec<f64>,
        model_tag: ModelTag,
        config_digest: u64,
    ) -> Result<Self> {
        let n = sample_times.len();
        let m = indices.len();
        if p_rows.len() != m * n || f_rows.len() != m * n {
            return Err(Error::invalid("row data does not match grid size"));
        }
        Ok(Self::from_raw(
            sample_times,
            RawRealizations {
                indices,
                p: p_rows,
                f: f_rows,
            },
            model_tag,
            config_digest,
        ))
    }
}

/// Two-pass mean and standard error per column, folding rows in ascending
/// storage order.
fn column_stats(rows: &[f64], m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mean = vec![0.0; n];
    let mut stderr = vec![0.0; n];
    if m == 0 {
        return (mean, stderr);
    }
    for j in 0..n {
        let mut sum = 0.0;
        for i in 0..m {
            sum += rows[i * n + j];
        }
        mean[j] = sum / m as f64;
    }
    if m > 1 {
        let norm = 1.0 / ((m - 1) as f64 * m as f64);
        for j in 0..n {
            let mut ss = 0.0;
            for i in 0..m {
                let d = rows[i * n + j] - mean[j];
                ss += d * d;
            }
            stderr[j] = (ss * norm).sqrt();
        }
    }
    (mean, stderr)
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// The RNG stream for realization `index`; see the module docs for the
/// mixing chain.
pub fn realization_rng(master_seed: u64, tag: ModelTag, index: u64) -> ChaCha8Rng {
    let lane = splitmix64(master_seed ^ tag.salt());
    ChaCha8Rng::seed_from_u64(splitmix64(lane ^ index))
}

/// Runs realizations `0..m` and aggregates them.
pub fn run_ensemble(config: &ModelConfig, m: usize, master_seed: u64) -> Result<EnsembleSeries> {
    if m < 1 {
        return Err(Error::config("m: must be at least 1".to_string()));
    }
    run_ensemble_slice(config, 0..m as u64, master_seed)
}

/// Runs an explicit index range of realizations; an empty range produces an
/// empty ensemble usable only as a merge identity. Slices of the same
/// `(config, master_seed)` merge bit-identically into the full run.
pub fn run_ensemble_slice(
    config: &ModelConfig,
    indices: std::ops::Range<u64>,
    master_seed: u64,
) -> Result<EnsembleSeries> {
    config.validate()?;
    let times = config.sample_times();
    let tag = config.tag();
    let digest = config.digest(master_seed);
    let count = (indices.end - indices.start) as usize;

    let runs: Vec<RealizationSeries> = (0..count)
        .into_par_iter()
        .map(|offset| {
            let index = indices.start + offset as u64;
            let mut rng = realization_rng(master_seed, tag, index);
            config
                .run_one(&mut rng)
                .expect("config validated before dispatch")
        })
        .collect();

    let n = times.len();
    let mut raw = RawRealizations {
        indices: indices.collect(),
        p: Vec::with_capacity(count * n),
        f: Vec::with_capacity(count * n),
    };
    for run in &runs {
        debug_assert_eq!(run.sample_times, times);
        raw.p.extend_from_slice(&run.p);
        raw.f.extend_from_slice(&run.fidelity);
    }
    Ok(EnsembleSeries::from_raw(times, raw, tag, digest))
}

/// Pools two ensembles of the same config into one, exactly as if their
/// realizations had been run together: rows are re-sorted by realization
/// index and re-folded.
pub fn merge_ensembles(a: &EnsembleSeries, b: &EnsembleSeries) -> Result<EnsembleSeries> {
    if a.model_tag != b.model_tag {
        return Err(Error::invalid(format!(
            "model tag mismatch: {} vs {}",
            a.model_tag.as_str(),
            b.model_tag.as_str()
        )));
    }
    if a.config_digest != b.config_digest {
        return Err(Error::invalid("config digest mismatch".to_string()));
    }
    if a.sample_times != b.sample_times {
        return Err(Error::invalid("sample grid mismatch".to_string()));
    }

    let n = a.sample_times.len();
    let total = a.m_realizations + b.m_realizations;
    // Stable sort of (origin, row) pairs by realization index.
    let mut order: Vec<(u64, bool, usize)> = Vec::with_capacity(total);
    order.extend(a.raw.indices.iter().enumerate().map(|(i, &ix)| (ix, false, i)));
    order.extend(b.raw.indices.iter().enumerate().map(|(i, &ix)| (ix, true, i)));
    order.sort_by_key(|&(ix, from_b, _)| (ix, from_b));

    let mut raw = RawRealizations {
        indices: Vec::with_capacity(total),
        p: Vec::with_capacity(total * n),
        f: Vec::with_capacity(total * n),
    };
    for &(ix, from_b, row) in &order {
        let src = if from_b { &b.raw } else { &a.raw };
        raw.indices.push(ix);
        raw.p.extend_from_slice(&src.p[row * n..(row + 1) * n]);
        raw.f.extend_from_slice(&src.f[row * n..(row + 1) * n]);
    }
    Ok(EnsembleSeries::from_raw(
        a.sample_times.clone(),
        raw,
        a.model_tag,
        a.config_digest,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::GroverGeometry;
    use approx::assert_abs_diff_eq;

    fn stlm_config(gamma: f64, w_phi: f64, t_max: u32, sample_every: u32) -> ModelConfig {
        let geometry = GroverGeometry::new(13).unwrap();
        ModelConfig::Stlm {
            params: StlmParams::for_geometry(gamma, w_phi, &geometry).unwrap(),
            t_max,
            sample_every,
        }
    }

    fn small_ga_config(epsilon: f64) -> ModelConfig {
        ModelConfig::Ga(GaConfig {
            n_qubits: 5,
            target: 0,
            epsilon,
            shared_layer_draws: false,
            t_max: 40,
            sample_every: 4,
        })
    }

    #[test]
    fn single_realization_has_zero_stderr() {
        let config = stlm_config(1e-3, 0.2, 100, 10);
        let ens = run_ensemble(&config, 1, 7).unwrap();
        assert_eq!(ens.m_realizations, 1);
        assert!(ens.p_stderr.iter().all(|&s| s == 0.0));
        assert!(ens.f_stderr.iter().all(|&s| s == 0.0));

        let mut rng = realization_rng(7, ModelTag::Stlm, 0);
        let single = match &config {
            ModelConfig::Stlm {
                params,
                t_max,
                sample_every,
            } => run_stlm_realization(params, *t_max, *sample_every, &mut rng).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(ens.p_mean, single.p);
        assert_eq!(ens.f_mean, single.fidelity);
    }

    #[test]
    fn noiseless_ga_ensemble_is_exact() {
        let config = small_ga_config(0.0);
        let geometry = GroverGeometry::new(5).unwrap();
        let ens = run_ensemble(&config, 4, 3).unwrap();
        for (i, &t) in ens.sample_times.iter().enumerate() {
            assert_abs_diff_eq!(
                ens.p_mean[i],
                geometry.ideal_target_probability(t),
                epsilon = 1e-12
            );
            assert!(ens.p_stderr[i] < 1e-12);
            assert_abs_diff_eq!(ens.f_mean[i], 1.0, epsilon = 1e-12);
            assert!(ens.f_stderr[i] < 1e-12);
        }
    }

    #[test]
    fn ensembles_are_reproducible() {
        let config = small_ga_config(0.05);
        let a = run_ensemble(&config, 6, 11).unwrap();
        let b = run_ensemble(&config, 6, 11).unwrap();
        assert_eq!(a, b);

        // Independent of the worker count.
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool3 = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool1.install(|| run_ensemble(&config, 6, 11)).unwrap();
        let d = pool3.install(|| run_ensemble(&config, 6, 11)).unwrap();
        assert_eq!(c, d);
        assert_eq!(a, c);
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let config = stlm_config(1e-3, 0.15, 60, 10);
        let full = run_ensemble(&config, 5, 9).unwrap();
        let empty = run_ensemble_slice(&config, 0..0, 9).unwrap();
        assert_eq!(empty.m_realizations, 0);
        let merged = merge_ensembles(&full, &empty).unwrap();
        assert_eq!(merged, full);
        let merged = merge_ensembles(&empty, &full).unwrap();
        assert_eq!(merged, full);
    }

    #[test]
    fn merged_halves_equal_the_direct_run() {
        let config = small_ga_config(0.03);
        let direct = run_ensemble(&config, 10, 21).unwrap();
        let lo = run_ensemble_slice(&config, 0..5, 21).unwrap();
        let hi = run_ensemble_slice(&config, 5..10, 21).unwrap();
        let merged = merge_ensembles(&lo, &hi).unwrap();
        assert_eq!(merged, direct);
        // Order of the halves must not matter either.
        let merged = merge_ensembles(&hi, &lo).unwrap();
        assert_eq!(merged, direct);
    }

    #[test]
    fn merge_is_associative() {
        let config = stlm_config(2e-3, 0.3, 80, 8);
        let a = run_ensemble_slice(&config, 0..3, 5).unwrap();
        let b = run_ensemble_slice(&config, 3..7, 5).unwrap();
        let c = run_ensemble_slice(&config, 7..12, 5).unwrap();
        let left = merge_ensembles(&merge_ensembles(&a, &b).unwrap(), &c).unwrap();
        let right = merge_ensembles(&a, &merge_ensembles(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(left, run_ensemble(&config, 12, 5).unwrap());
    }

    #[test]
    fn pooled_mean_is_the_weighted_mean() {
        let times = vec![0u32, 1];
        let a = EnsembleSeries::from_rows(
            times.clone(),
            (0..10).collect(),
            vec![0.2; 20],
            vec![0.5; 20],
            ModelTag::Stlm,
            42,
        )
        .unwrap();
        let b = EnsembleSeries::from_rows(
            times,
            (10..40).collect(),
            vec![0.4; 60],
            vec![0.5; 60],
            ModelTag::Stlm,
            42,
        )
        .unwrap();
        let merged = merge_ensembles(&a, &b).unwrap();
        assert_eq!(merged.m_realizations, 40);
        for &m in &merged.p_mean {
            assert_abs_diff_eq!(m, 0.35, epsilon = 1e-15);
        }
    }

    #[test]
    fn merge_rejects_mismatched_configs() {
        let a = run_ensemble(&stlm_config(1e-3, 0.1, 60, 10), 2, 3).unwrap();
        let b = run_ensemble(&stlm_config(2e-3, 0.1, 60, 10), 2, 3).unwrap();
        assert!(merge_ensembles(&a, &b).is_err());

        let c = run_ensemble(&stlm_config(1e-3, 0.1, 60, 10), 2, 4).unwrap();
        assert!(merge_ensembles(&a, &c).is_err());
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(run_ensemble(&small_ga_config(-0.1), 2, 1).is_err());
        assert!(run_ensemble(&small_ga_config(0.1), 0, 1).is_err());
        let bad_grid = ModelConfig::Stlm {
            params: StlmParams::new(0.0, 0.0, 0.02, 0.01).unwrap(),
            t_max: 10,
            sample_every: 20,
        };
        assert!(run_ensemble(&bad_grid, 2, 1).is_err());
    }

    /// Exact ensemble-mean oracle for the two-level model: averaging the
    /// random phases turns the density matrix evolution into a linear map
    /// where the off-diagonal is damped by |⟨e^(iφ)⟩|² per step.
    struct MeanOracle {
        rho_mm: f64,
        rho_nn: f64,
        rho_mn: num_complex::Complex64,
        damping: f64,
        decay_sq: f64,
        omega: f64,
        theta0: f64,
        t: u32,
    }

    impl MeanOracle {
        fn new(params: &StlmParams) -> Self {
            let half = params.w_phi / 2.0;
            let char_fn = if params.w_phi == 0.0 {
                1.0
            } else {
                half.sin() / half
            };
            let (c, s) = (params.theta0.cos(), params.theta0.sin());
            MeanOracle {
                rho_mm: c * c,
                rho_nn: s * s,
                rho_mn: num_complex::Complex64::new(c * s, 0.0),
                damping: char_fn * char_fn,
                decay_sq: (-2.0 * params.gamma).exp(),
                omega: params.omega,
                theta0: params.theta0,
                t: 0,
            }
        }

        fn step(&mut self) {
            let (s, c) = self.omega.sin_cos();
            let mn = self.rho_mn * self.damping;
            let mm = self.rho_mm;
            let nn = self.rho_nn;
            let rot_mm = c * c * mm - 2.0 * c * s * mn.re + s * s * nn;
            let rot_nn = s * s * mm + 2.0 * c * s * mn.re + c * c * nn;
            let rot_mn = c * s * (mm - nn) + (c * c) * mn - (s * s) * mn.conj();
            self.rho_mm = rot_mm * self.decay_sq;
            self.rho_nn = rot_nn * self.decay_sq;
            self.rho_mn = rot_mn * self.decay_sq;
            self.t += 1;
        }

        fn mean_p(&self) -> f64 {
            self.rho_nn
        }

        fn mean_f(&self) -> f64 {
            let angle = self.theta0 + self.omega * f64::from(self.t);
            let (s, c) = angle.sin_cos();
            c * c * self.rho_mm + s * s * self.rho_nn + 2.0 * s * c * self.rho_mn.re
        }
    }

    #[test]
    fn stlm_mean_matches_exact_linear_map() {
        let config = stlm_config(1.5e-3, 0.25, 300, 20);
        let ens = run_ensemble(&config, 1000, 1234).unwrap();
        let params = match &config {
            ModelConfig::Stlm { params, .. } => *params,
            _ => unreachable!(),
        };
        let mut oracle = MeanOracle::new(&params);
        let mut idx = 1;
        for t in 1..=300u32 {
            oracle.step();
            if t % 20 == 0 {
                let p_err = (ens.p_mean[idx] - oracle.mean_p()).abs();
                let f_err = (ens.f_mean[idx] - oracle.mean_f()).abs();
                assert!(
                    p_err <= 4.0 * ens.p_stderr[idx],
                    "t={t}: p deviates {p_err} > 4*{}",
                    ens.p_stderr[idx]
                );
                assert!(
                    f_err <= 4.0 * ens.f_stderr[idx],
                    "t={t}: f deviates {f_err} > 4*{}",
                    ens.f_stderr[idx]
                );
                idx += 1;
            }
        }
    }

    #[test]
    fn dephasing_free_stlm_mean_is_exact() {
        // W_phi = 0 makes every realization identical to the closed form.
        let gamma = 2e-3;
        let config = stlm_config(gamma, 0.0, 200, 25);
        let geometry = GroverGeometry::new(13).unwrap();
        let ens = run_ensemble(&config, 50, 3).unwrap();
        for (i, &t) in ens.sample_times.iter().enumerate() {
            let envelope = (-2.0 * gamma * f64::from(t)).exp();
            let exact = envelope * geometry.angle_at(t).sin().powi(2);
            assert_abs_diff_eq!(ens.p_mean[i], exact, epsilon = 1e-12);
            assert!(ens.p_stderr[i] < 1e-12);
        }
    }
}
