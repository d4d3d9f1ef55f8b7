//! Ideal and imperfect Grover iterations on the full register.
//!
//! One iteration is: phase flip of the target, a layer of per-qubit
//! Hadamards, the conditional phase shift, a second Hadamard layer. The
//! oracle and the conditional phase shift are always ideal; only the
//! Hadamards carry imperfections. Each imperfect Hadamard is the Pauli-axis
//! gate `m·σ` with the axis tilted away from the ideal `(1/√2, 0, 1/√2)` by
//! an angle `delta`, in a direction set by `phi`:
//!
//! ```text
//! m = ( (cos φ sin δ + cos δ)/√2,  sin φ sin δ,  (−cos φ sin δ + cos δ)/√2 )
//! ```
//!
//! `|m| = 1` identically, so the gate stays unitary and the register norm is
//! preserved for any imperfection strength.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Open01;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::series::RealizationSeries;
use crate::statevec::{QuantumState, SingleQubitGate};

/// Rotation-angle bookkeeping for an `n_qubits` register: the per-iteration
/// angle `omega` with `sin ω = 2√(N−1)/N` and the initial angle `theta0` with
/// `sin ϑ₀ = 1/√N`. The ideal target probability after `t` iterations is
/// `sin²(ϑ₀ + ωt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverGeometry {
    n_qubits: u32,
    dim: usize,
    omega: f64,
    theta0: f64,
}

impl GroverGeometry {
    pub fn new(n_qubits: u32) -> Result<Self> {
        if n_qubits < 1 {
            return Err(Error::invalid("qubit count must be at least 1"));
        }
        let dim = 1usize << n_qubits;
        let n = dim as f64;
        let theta0 = (1.0 / n.sqrt()).asin();
        let omega = (2.0 * (n - 1.0).sqrt() / n).asin();
        Ok(Self {
            n_qubits,
            dim,
            omega,
            theta0,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// `ϑ₀ + ωt`, the ideal rotation angle after `t` iterations.
    pub fn angle_at(&self, t: u32) -> f64 {
        self.theta0 + self.omega * f64::from(t)
    }

    /// Ideal `p_j(t) = sin²(ϑ₀ + ωt)`.
    pub fn ideal_target_probability(&self, t: u32) -> f64 {
        let s = self.angle_at(t).sin();
        s * s
    }

    /// Iteration count of the first ideal probability maximum,
    /// `round((π/2 − ϑ₀)/ω)`.
    pub fn first_peak(&self) -> u32 {
        ((FRAC_PI_2 - self.theta0) / self.omega).round() as u32
    }
}

/// Constructs `grover_geometry` by module-level convention; see
/// [`GroverGeometry::new`].
pub fn grover_geometry(n_qubits: u32) -> Result<GroverGeometry> {
    GroverGeometry::new(n_qubits)
}

/// The tilted Hadamard `m·σ` for tilt angle `delta` and azimuth `phi`.
/// `delta = 0` returns the ideal Hadamard exactly, for any `phi`.
pub fn imperfect_hadamard(delta: f64, phi: f64) -> SingleQubitGate {
    let (sd, cd) = delta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let mx = (cp * sd + cd) * FRAC_1_SQRT_2;
    let my = sp * sd;
    let mz = (-cp * sd + cd) * FRAC_1_SQRT_2;
    SingleQubitGate::new(
        Complex64::new(mz, 0.0),
        Complex64::new(mx, -my),
        Complex64::new(mx, my),
        Complex64::new(-mz, 0.0),
    )
}

/// Per-qubit `(delta, phi)` tilt samples for one Hadamard layer.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    deltas: Vec<f64>,
    phis: Vec<f64>,
}

impl NoiseDraw {
    /// Draws `delta_q` uniform on the open interval `(−ε/2, ε/2)` and
    /// `phi_q` uniform on `[0, 2π)`, independently per qubit. For each qubit
    /// the delta is drawn before the phi.
    pub fn draw(epsilon: f64, n_qubits: u32, rng: &mut impl Rng) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::invalid(format!(
                "epsilon must be finite and >= 0, got {epsilon}"
            )));
        }
        let mut draw = Self::ideal(n_qubits);
        draw.refill(epsilon, rng);
        Ok(draw)
    }

    /// An all-zero draw: every gate is the exact ideal Hadamard.
    pub fn ideal(n_qubits: u32) -> Self {
        Self {
            deltas: vec![0.0; n_qubits as usize],
            phis: vec![0.0; n_qubits as usize],
        }
    }

    /// Redraws in place; consumes the same RNG stream as [`NoiseDraw::draw`].
    pub fn refill(&mut self, epsilon: f64, rng: &mut impl Rng) {
        for q in 0..self.deltas.len() {
            let u: f64 = rng.sample(Open01);
            self.deltas[q] = (u - 0.5) * epsilon;
            self.phis[q] = rng.random::<f64>() * TAU;
        }
    }

    pub fn n_qubits(&self) -> u32 {
        self.deltas.len() as u32
    }

    /// Tilt angle for qubit `q` (1-based).
    pub fn delta(&self, q: u32) -> f64 {
        self.deltas[(q - 1) as usize]
    }

    /// Azimuth for qubit `q` (1-based).
    pub fn phi(&self, q: u32) -> f64 {
        self.phis[(q - 1) as usize]
    }
}

/// One Grover iteration with independently tilted Hadamard layers:
/// target phase flip, `layer1` Hadamards, conditional phase shift, `layer2`
/// Hadamards. With all tilts zero this is exactly the ideal Grover step.
pub fn grover_iteration(
    state: &mut QuantumState,
    target: usize,
    layer1: &NoiseDraw,
    layer2: &NoiseDraw,
) -> Result<()> {
    let n = state.n_qubits();
    if layer1.n_qubits() != n || layer2.n_qubits() != n {
        return Err(Error::invalid(format!(
            "noise draw qubit count does not match register size {n}"
        )));
    }
    state.phase_flip_target(target)?;
    for q in 1..=n {
        let gate = imperfect_hadamard(layer1.delta(q), layer1.phi(q));
        state.apply_single_qubit_gate(&gate, q)?;
    }
    state.conditional_phase_shift();
    for q in 1..=n {
        let gate = imperfect_hadamard(layer2.delta(q), layer2.phi(q));
        state.apply_single_qubit_gate(&gate, q)?;
    }
    Ok(())
}

/// The closed-form ideal state after `t` iterations: amplitude
/// `sin(ϑ₀ + ωt)` on the target and `cos(ϑ₀ + ωt)/√(N−1)` elsewhere.
pub fn ideal_state(geometry: &GroverGeometry, target: usize, t: u32) -> Result<QuantumState> {
    if target >= geometry.dim() {
        return Err(Error::invalid(format!(
            "target {target} out of range for dim {}",
            geometry.dim()
        )));
    }
    let theta = geometry.angle_at(t);
    let off = theta.cos() / ((geometry.dim() - 1) as f64).sqrt();
    let mut amps = vec![Complex64::new(off, 0.0); geometry.dim()];
    amps[target] = Complex64::new(theta.sin(), 0.0);
    QuantumState::from_amplitudes(amps)
}

/// Full configuration of one imperfect-Grover run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub n_qubits: u32,
    pub target: usize,
    pub epsilon: f64,
    /// When set, both Hadamard layers of an iteration reuse one draw instead
    /// of drawing independently per layer.
    pub shared_layer_draws: bool,
    pub t_max: u32,
    pub sample_every: u32,
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 1 || self.n_qubits > crate::statevec::MAX_QUBITS {
            return Err(Error::config(format!(
                "n_qubits: {} out of range 1..={}",
                self.n_qubits,
                crate::statevec::MAX_QUBITS
            )));
        }
        if self.target >= (1usize << self.n_qubits) {
            return Err(Error::config(format!(
                "target_j: {} out of range for {} qubits",
                self.target, self.n_qubits
            )));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::config(format!(
                "epsilon: must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        check_grid(self.t_max, self.sample_every)
    }

    pub fn geometry(&self) -> GroverGeometry {
        GroverGeometry::new(self.n_qubits).expect("validated qubit count")
    }
}

pub(crate) fn check_grid(t_max: u32, sample_every: u32) -> Result<()> {
    if t_max < 1 {
        return Err(Error::config("t_max: must be at least 1".to_string()));
    }
    if sample_every < 1 || sample_every > t_max {
        return Err(Error::config(format!(
            "sample_every: {sample_every} out of range 1..={t_max}"
        )));
    }
    Ok(())
}

/// Runs one noisy realization: iterates [`grover_iteration`] with fresh
/// draws each iteration (layer draws shared or independent per
/// [`GaConfig::shared_layer_draws`]) and records `p_j` and the fidelity
/// against [`ideal_state`] at every multiple of `sample_every`, including
/// `t = 0`.
pub fn run_ga_realization(cfg: &GaConfig, rng: &mut impl Rng) -> Result<RealizationSeries> {
    cfg.validate()?;
    let geometry = cfg.geometry();
    let mut state = QuantumState::uniform_superposition(cfg.n_qubits)?;
    let mut layer1 = NoiseDraw::ideal(cfg.n_qubits);
    let mut layer2 = NoiseDraw::ideal(cfg.n_qubits);

    let n_samples = (cfg.t_max / cfg.sample_every + 1) as usize;
    let mut series = RealizationSeries::with_capacity(n_samples);
    let mut record = |t: u32, state: &QuantumState| -> Result<()> {
        let p = state.target_probability(cfg.target)?;
        let f = ideal_state(&geometry, cfg.target, t)?.overlap_sq(state)?;
        series_push_checked(&mut series, t, p, f);
        Ok(())
    };
    record(0, &state)?;

    for t in 1..=cfg.t_max {
        layer1.refill(cfg.epsilon, rng);
        if cfg.shared_layer_draws {
            grover_iteration(&mut state, cfg.target, &layer1, &layer1)?;
        } else {
            layer2.refill(cfg.epsilon, rng);
            grover_iteration(&mut state, cfg.target, &layer1, &layer2)?;
        }
        if t % cfg.sample_every == 0 {
            record(t, &state)?;
        }
    }
    Ok(series)
}

/// Clamp tiny floating-point excursions outside [0,1] before recording.
/// Rounding drift over 10^3..10^4 iterations can push the raw observables a
/// few 1e-12 past the boundary; anything larger is a logic error.
pub(crate) fn series_push_checked(series: &mut RealizationSeries, t: u32, p: f64, f: f64) {
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&p), "p out of range: {p}");
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&f), "f out of range: {f}");
    series.push(t, p.clamp(0.0, 1.0), f.clamp(0.0, 1.0));
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn geometry_small_registers() {
        let g = GroverGeometry::new(2).unwrap();
        assert_abs_diff_eq!(g.omega(), FRAC_PI_3, epsilon = 1e-15);
        assert_abs_diff_eq!(g.theta0(), FRAC_PI_6, epsilon = 1e-15);

        let g = GroverGeometry::new(1).unwrap();
        assert_abs_diff_eq!(g.omega(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.theta0(), FRAC_PI_4, epsilon = 1e-15);

        assert!(GroverGeometry::new(0).is_err());
    }

    #[test]
    fn geometry_thirteen_qubits() {
        let g = GroverGeometry::new(13).unwrap();
        assert_abs_diff_eq!(g.theta0(), 0.011048768251580470, epsilon = 1e-15);
        assert_abs_diff_eq!(g.omega(), 0.022097536503160940, epsilon = 1e-15);
        assert_abs_diff_eq!(g.theta0().sin(), 1.0 / 8192f64.sqrt(), epsilon = 1e-16);
        assert_eq!(g.first_peak(), 71);
    }

    #[test]
    fn ideal_hadamard_recovered_at_zero_tilt() {
        for phi in [0.0, 1.0, PI, 5.5] {
            let gate = imperfect_hadamard(0.0, phi);
            assert_eq!(gate, SingleQubitGate::hadamard());
        }
    }

    #[test]
    fn tilted_axis_stays_unit_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let delta = (rng.random::<f64>() - 0.5) * 0.4;
            let phi = rng.random::<f64>() * TAU;
            let gate = imperfect_hadamard(delta, phi);
            // |m|^2 = g00^2 + |g01|^2 for a Pauli-axis gate.
            let m_sq = gate.g00.norm_sqr() + gate.g01.norm_sqr();
            assert_abs_diff_eq!(m_sq, 1.0, epsilon = 1e-15);
            assert!(gate.unitarity_defect() < 1e-13);
        }
    }

    #[test]
    fn tilted_gate_matches_direct_construction() {
        // Frozen from a high-precision evaluation of the axis formula and
        // the Pauli expansion at delta = 0.01, phi = pi/2.
        let gate = imperfect_hadamard(0.01, FRAC_PI_2);
        assert_abs_diff_eq!(gate.g00.re, 0.707071426142115040, epsilon = 1e-15);
        assert_abs_diff_eq!(gate.g01.re, 0.707071426142115040, epsilon = 1e-15);
        assert_abs_diff_eq!(gate.g01.im, -0.009999833334166665, epsilon = 1e-15);
        assert_abs_diff_eq!(gate.g10.im, 0.009999833334166665, epsilon = 1e-15);
        assert_abs_diff_eq!(gate.g11.re, -0.707071426142115040, epsilon = 1e-15);
        assert_eq!(gate.g00.im, 0.0);
        assert_eq!(gate.g11.im, 0.0);
    }

    #[test]
    fn noise_draw_zero_epsilon_is_ideal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draw = NoiseDraw::draw(0.0, 5, &mut rng).unwrap();
        for q in 1..=5 {
            assert_eq!(draw.delta(q), 0.0);
        }
    }

    #[test]
    fn noise_draw_is_deterministic_per_seed() {
        let a = NoiseDraw::draw(0.02, 13, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = NoiseDraw::draw(0.02, 13, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_draw_rejects_negative_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(NoiseDraw::draw(-0.01, 3, &mut rng).is_err());
        assert!(NoiseDraw::draw(f64::NAN, 3, &mut rng).is_err());
    }

    #[test]
    fn noise_draw_uniform_statistics() {
        // 10^6 individual tilt samples drawn as 13-qubit layers.
        let epsilon = 0.02;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut draw = NoiseDraw::ideal(13);
        let mut sum = 0.0;
        let mut max_abs: f64 = 0.0;
        let mut count = 0u64;
        while count < 1_000_000 {
            draw.refill(epsilon, &mut rng);
            for q in 1..=13 {
                sum += draw.delta(q);
                max_abs = max_abs.max(draw.delta(q).abs());
                count += 1;
            }
        }
        let mean = sum / count as f64;
        let bound = 3.0 * (epsilon / 12f64.sqrt()) / 1e3;
        assert!(mean.abs() < bound, "mean {mean} exceeds {bound}");
        assert!(max_abs < epsilon / 2.0);
    }

    /// Dense-matrix oracle: D·O_j with D_kl = −δ_kl + 2/N applied by hand.
    fn dense_grover_step(amps: &[Complex64], target: usize) -> Vec<Complex64> {
        let n = amps.len();
        let mut flipped: Vec<Complex64> = amps.to_vec();
        flipped[target] = -flipped[target];
        let total: Complex64 = flipped.iter().sum();
        let two_over_n = 2.0 / n as f64;
        flipped
            .iter()
            .map(|a| total * two_over_n - a)
            .collect()
    }

    #[test]
    fn one_ideal_iteration_solves_two_qubits() {
        let mut state = QuantumState::uniform_superposition(2).unwrap();
        let layer = NoiseDraw::ideal(2);
        grover_iteration(&mut state, 3, &layer, &layer).unwrap();
        assert_abs_diff_eq!(state.target_probability(3).unwrap(), 1.0, epsilon = 1e-12);

        // Against the dense-matrix route.
        let expected =
            dense_grover_step(QuantumState::uniform_superposition(2).unwrap().amplitudes(), 3);
        for (a, e) in state.amplitudes().iter().zip(&expected) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn ideal_iteration_matrix_equals_diffusion_times_oracle() {
        for n_qubits in 2..=8u32 {
            let dim = 1usize << n_qubits;
            let target = dim / 3;
            let layer = NoiseDraw::ideal(n_qubits);
            for k in 0..dim {
                let mut state = QuantumState::basis_state(n_qubits, k).unwrap();
                grover_iteration(&mut state, target, &layer, &layer).unwrap();
                let expected = dense_grover_step(
                    QuantumState::basis_state(n_qubits, k).unwrap().amplitudes(),
                    target,
                );
                for (a, e) in state.amplitudes().iter().zip(&expected) {
                    assert!(
                        (a - e).norm() < 1e-12,
                        "n_qubits={n_qubits} column={k} mismatch"
                    );
                }
            }
        }
    }

    #[test]
    fn noisy_iteration_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut state = QuantumState::uniform_superposition(6).unwrap();
        for _ in 0..200 {
            let layer1 = NoiseDraw::draw(0.01, 6, &mut rng).unwrap();
            let layer2 = NoiseDraw::draw(0.01, 6, &mut rng).unwrap();
            grover_iteration(&mut state, 17, &layer1, &layer2).unwrap();
        }
        assert_abs_diff_eq!(state.norm_sqr(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn ideal_state_limits() {
        let g = GroverGeometry::new(4).unwrap();
        let s = ideal_state(&g, 7, 0).unwrap();
        let u = QuantumState::uniform_superposition(4).unwrap();
        for (a, b) in s.amplitudes().iter().zip(u.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }

        let g = GroverGeometry::new(2).unwrap();
        let s = ideal_state(&g, 1, 1).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[1].re, 1.0, epsilon = 1e-14);
        for k in [0usize, 2, 3] {
            assert!(s.amplitudes()[k].norm() < 1e-14);
        }

        assert!(ideal_state(&g, 4, 0).is_err());
    }

    #[test]
    fn ideal_state_matches_simulation() {
        let g = GroverGeometry::new(5).unwrap();
        let layer = NoiseDraw::ideal(5);
        let mut state = QuantumState::uniform_superposition(5).unwrap();
        for t in 1..=37u32 {
            grover_iteration(&mut state, 11, &layer, &layer).unwrap();
            let reference = ideal_state(&g, 11, t).unwrap();
            assert_abs_diff_eq!(reference.overlap_sq(&state).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn noiseless_realization_follows_the_closed_form() {
        let cfg = GaConfig {
            n_qubits: 6,
            target: 0,
            epsilon: 0.0,
            shared_layer_draws: false,
            t_max: 60,
            sample_every: 5,
        };
        let g = cfg.geometry();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let series = run_ga_realization(&cfg, &mut rng).unwrap();
        assert_eq!(series.sample_times.first(), Some(&0));
        for (i, &t) in series.sample_times.iter().enumerate() {
            assert_abs_diff_eq!(series.fidelity[i], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(series.p[i], g.ideal_target_probability(t), epsilon = 1e-10);
        }
    }

    #[test]
    fn realization_is_bit_identical_per_seed() {
        let cfg = GaConfig {
            n_qubits: 5,
            target: 9,
            epsilon: 0.05,
            shared_layer_draws: false,
            t_max: 40,
            sample_every: 4,
        };
        let a = run_ga_realization(&cfg, &mut ChaCha8Rng::seed_from_u64(123)).unwrap();
        let b = run_ga_realization(&cfg, &mut ChaCha8Rng::seed_from_u64(123)).unwrap();
        assert_eq!(a, b);

        let shared = GaConfig {
            shared_layer_draws: true,
            ..cfg
        };
        let c = run_ga_realization(&shared, &mut ChaCha8Rng::seed_from_u64(123)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn realization_rejects_bad_config() {
        let mut cfg = GaConfig {
            n_qubits: 3,
            target: 0,
            epsilon: 0.01,
            shared_layer_draws: false,
            t_max: 10,
            sample_every: 2,
        };
        cfg.target = 8;
        assert!(run_ga_realization(&cfg, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        cfg.target = 0;
        cfg.sample_every = 11;
        assert!(run_ga_realization(&cfg, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        cfg.sample_every = 2;
        cfg.epsilon = -1.0;
        assert!(run_ga_realization(&cfg, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
