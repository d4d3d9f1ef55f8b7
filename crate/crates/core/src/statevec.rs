//! Dense state-vector representation of the qubit register and the primitive
//! gate/measurement kernels every simulation layer is built from.
//!
//! # Conventions
//!
//! * Qubit indices are 1-based: qubit `q = 1` maps to the **least significant
//!   bit** of the basis index, qubit `n_qubits` to the most significant. All
//!   observables are convention-independent, but every caller and test in
//!   this crate shares this mapping.
//! * [`QuantumState::conditional_phase_shift`] negates every amplitude except
//!   `|0⟩` (it omits an overall factor of −1 that some texts attach to the
//!   diffusion operator); global phase cancels in every observable.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on register size; 2^24 complex doubles is ~0.27 GB.
pub const MAX_QUBITS: u32 = 24;

/// A 2×2 single-qubit gate, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate {
    pub g00: Complex64,
    pub g01: Complex64,
    pub g10: Complex64,
    pub g11: Complex64,
}

impl SingleQubitGate {
    pub fn new(g00: Complex64, g01: Complex64, g10: Complex64, g11: Complex64) -> Self {
        Self { g00, g01, g10, g11 }
    }

    pub fn identity() -> Self {
        Self::new(
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ONE,
        )
    }

    /// The ideal Hadamard gate (1/√2)·((1,1),(1,−1)).
    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(h, h, h, -h)
    }

    pub fn pauli_x() -> Self {
        Self::new(
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ONE,
            Complex64::ZERO,
        )
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.g00.conj(),
            self.g10.conj(),
            self.g01.conj(),
            self.g11.conj(),
        )
    }

    /// Largest entrywise deviation of G†G from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let a = self.adjoint();
        let p00 = a.g00 * self.g00 + a.g01 * self.g10;
        let p01 = a.g00 * self.g01 + a.g01 * self.g11;
        let p10 = a.g10 * self.g00 + a.g11 * self.g10;
        let p11 = a.g10 * self.g01 + a.g11 * self.g11;
        let defects = [
            (p00 - Complex64::ONE).norm(),
            p01.norm(),
            p10.norm(),
            (p11 - Complex64::ONE).norm(),
        ];
        defects.into_iter().fold(0.0, f64::max)
    }
}

/// The register wavefunction: `2^n_qubits` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: u32,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// An equal superposition of all basis states, every amplitude `1/√2^n`.
    pub fn uniform_superposition(n_qubits: u32) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n_qubits,
            amps: vec![amp; dim],
        })
    }

    /// The computational basis state `|k⟩`.
    pub fn basis_state(n_qubits: u32, k: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if k >= dim {
            return Err(Error::invalid(format!(
                "basis index {k} out of range for {n_qubits} qubits (dim {dim})"
            )));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[k] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from explicit amplitudes; the length must be a power of
    /// two within the qubit cap.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros();
        check_qubit_count(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a 2×2 gate to qubit `qubit` (1-based, 1 = least significant
    /// bit): every amplitude pair differing only in that bit is replaced by
    /// the matrix product of the gate with the old pair.
    pub fn apply_single_qubit_gate(&mut self, gate: &SingleQubitGate, qubit: u32) -> Result<()> {
        if qubit < 1 || qubit > self.n_qubits {
            return Err(Error::invalid(format!(
                "qubit {qubit} out of range 1..={}",
                self.n_qubits
            )));
        }
        let stride = 1usize << (qubit - 1);
        let (g00, g01, g10, g11) = (gate.g00, gate.g01, gate.g10, gate.g11);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *a;
                let y = *b;
                *a = g00 * x + g01 * y;
                *b = g10 * x + g11 * y;
            }
        }
        Ok(())
    }

    /// Negates the amplitude of the marked basis state `target`.
    pub fn phase_flip_target(&mut self, target: usize) -> Result<()> {
        let dim = self.dim();
        if target >= dim {
            return Err(Error::invalid(format!(
                "target {target} out of range for dim {dim}"
            )));
        }
        self.amps[target] = -self.amps[target];
        Ok(())
    }

    /// Negates every amplitude except `|0⟩` (see module docs for the sign
    /// convention).
    pub fn conditional_phase_shift(&mut self) {
        for a in &mut self.amps[1..] {
            *a = -*a;
        }
    }

    /// `|⟨target|Ψ⟩|²`.
    pub fn target_probability(&self, target: usize) -> Result<f64> {
        let dim = self.dim();
        if target >= dim {
            return Err(Error::invalid(format!(
                "target {target} out of range for dim {dim}"
            )));
        }
        Ok(self.amps[target].norm_sqr())
    }

    /// Squared magnitude of the inner product `⟨self|other⟩`.
    pub fn overlap_sq(&self, other: &QuantumState) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::invalid(format!(
                "qubit count mismatch: {} vs {}",
                self.n_qubits, other.n_qubits
            )));
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }
}

fn check_qubit_count(n_qubits: u32) -> Result<()> {
    if n_qubits < 1 || n_qubits > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "qubit count {n_qubits} out of range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}
