//! Dense statevector simulation of ordered exponential ansatzes.
//!
//! Qubit q stores the occupation of spin orbital q; basis index bit q mirrors
//! that occupation. Every exponential of a generator whose Pauli strings
//! mutually commute is applied exactly (no Trotter error) by factoring into
//! single-string rotations with a cos/sin closed form. Noise enters in three
//! ways: Gaussian shot noise on expectation values, per-qubit readout flips,
//! and stochastic Pauli insertions during circuit application that reproduce
//! depolarizing statistics in expectation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Generator, OrderedAnsatz};
use crate::error::{Error, Result};
use crate::integrals::SpinOrbitalIndexing;
use crate::pauli::{PauliString, PauliSum};
use crate::qubit_map::jw_generator;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn parity_sign(bits: u64) -> f64 {
    if bits.count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// How expectation values are extracted from the simulated state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Exact inner products.
    Noiseless,
    /// Exact value plus Gaussian noise with the finite-shot standard error.
    ShotGaussian,
    /// Ensemble average over circuits with stochastic Pauli insertions.
    Trajectory,
}

/// Noise model parameters shared by every stochastic operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Depolarizing probability per single-qubit gate.
    #[serde(default)]
    pub p1: f64,
    /// Depolarizing probability per CNOT.
    #[serde(default)]
    pub p2: f64,
    /// Independent per-qubit flip probability on measurement.
    #[serde(default)]
    pub p_readout: f64,
    /// Shots behind each expectation value when the mode is stochastic.
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_mode")]
    pub mode: NoiseMode,
    /// Circuit repetitions averaged in trajectory mode.
    #[serde(default = "default_trajectories")]
    pub trajectories: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_shots() -> u64 {
    10_000
}

fn default_mode() -> NoiseMode {
    NoiseMode::Noiseless
}

fn default_trajectories() -> u64 {
    10
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            p1: 0.0,
            p2: 0.0,
            p_readout: 0.0,
            shots: default_shots(),
            mode: NoiseMode::Noiseless,
            trajectories: default_trajectories(),
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        NoiseConfig::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_readout", self.p_readout),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Mode(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.mode != NoiseMode::Noiseless && self.shots == 0 {
            return Err(Error::Mode(
                "stochastic modes need at least one shot".into(),
            ));
        }
        if self.mode == NoiseMode::Trajectory && self.trajectories == 0 {
            return Err(Error::Mode(
                "trajectory mode needs at least one trajectory".into(),
            ));
        }
        Ok(())
    }
}

/// A computational-basis configuration with its measured probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    /// Occupation bits: bit p set means spin orbital p occupied.
    pub bits: u64,
    /// Register width, kept so the bitstring renders at full length.
    pub n_qubits: usize,
    pub probability: f64,
}

impl Configuration {
    pub fn new(bits: u64, n_qubits: usize, probability: f64) -> Self {
        Configuration {
            bits,
            n_qubits,
            probability,
        }
    }

    /// Occupation pattern with spin orbital 0 leftmost.
    pub fn bitstring(&self) -> String {
        format_bitstring(self.bits, self.n_qubits)
    }
}

/// Gate counts for one ansatz factor under the staircase convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorGateCost {
    pub factor: String,
    pub cnot_count: u64,
    pub single_qubit_count: u64,
}

/// Circuit cost of an ordered ansatz: each Pauli string of each factor costs
/// 2(weight - 1) CNOTs (a CNOT staircase down and back up) plus basis-change
/// single-qubit gates (two per X or Y axis) and one rotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCostReport {
    pub cnot_count: u64,
    pub single_qubit_count: u64,
    pub factors: Vec<FactorGateCost>,
}

fn string_gate_cost(term: &PauliString) -> (u64, u64) {
    let w = term.weight() as u64;
    if w == 0 {
        return (0, 0);
    }
    let xy = (term.x_mask).count_ones() as u64;
    (2 * (w - 1), 2 * xy + 1)
}

fn factor_jw(gen: &Generator, n_spin: usize) -> PauliSum {
    // Weights do not depend on the total qubit count, so an ansatz whose
    // n_spin field undershoots its own indices still gets a defined cost.
    let n_eff = n_spin.max(gen.max_index() + 1);
    jw_generator(gen, n_eff).expect("indices fit the widened register")
}

/// Gate-cost report for an ansatz; deterministic and infallible.
pub fn cnot_cost(ansatz: &OrderedAnsatz) -> GateCostReport {
    let mut factors = Vec::with_capacity(ansatz.factors.len());
    let mut cnot_total = 0u64;
    let mut single_total = 0u64;
    for f in &ansatz.factors {
        let sum = factor_jw(&f.generator, ansatz.n_spin);
        let mut cnot = 0u64;
        let mut single = 0u64;
        for term in sum.terms() {
            let (c2, c1) = string_gate_cost(term);
            cnot += c2;
            single += c1;
        }
        cnot_total += cnot;
        single_total += single;
        factors.push(FactorGateCost {
            factor: f.generator.to_string(),
            cnot_count: cnot,
            single_qubit_count: single,
        });
    }
    GateCostReport {
        cnot_count: cnot_total,
        single_qubit_count: single_total,
        factors,
    }
}

/// Standard normal deviate via Box-Muller; two uniform draws per call.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Dense state of an n-qubit register, little-endian in the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// |index⟩ as a basis state.
    pub fn basis_state(n_qubits: usize, index: u64) -> Self {
        assert!(n_qubits <= 30, "statevector register too wide");
        assert!(
            (index >> n_qubits) == 0,
            "basis index {index} outside {n_qubits} qubits"
        );
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    /// The Hartree-Fock determinant of the given orbital indexing.
    pub fn prepare_reference(indexing: &SpinOrbitalIndexing) -> Self {
        Statevector::basis_state(indexing.n_spin, indexing.reference_determinant())
    }

    /// Wraps an existing amplitude vector; the length must be 2^n_qubits.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Arity {
                expected: 1 << n_qubits,
                got: amplitudes.len(),
            });
        }
        Ok(Statevector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amplitudes[index as usize]
    }

    pub fn probability_of(&self, index: u64) -> f64 {
        self.amplitudes[index as usize].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩. Dimension mismatch is an arity error.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Arity {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies the state by one Pauli string (including its coefficient).
    pub fn apply_pauli_string(&mut self, term: &PauliString) {
        let m = term.x_mask;
        let z = term.z_mask;
        let ipow = I_POW[((m & z).count_ones() % 4) as usize];
        let dim = self.amplitudes.len() as u64;
        if m == 0 {
            for x in 0..dim {
                self.amplitudes[x as usize] *= term.coeff * ipow * parity_sign(x & z);
            }
            return;
        }
        let pivot = 1u64 << (63 - m.leading_zeros());
        for x in 0..dim {
            if x & pivot != 0 {
                continue;
            }
            let y = x ^ m;
            let a = self.amplitudes[x as usize];
            let b = self.amplitudes[y as usize];
            self.amplitudes[y as usize] = term.coeff * ipow * parity_sign(x & z) * a;
            self.amplitudes[x as usize] = term.coeff * ipow * parity_sign(y & z) * b;
        }
    }

    /// φ = op·ψ as a fresh vector.
    pub fn apply_pauli_sum(&self, op: &PauliSum) -> Result<Statevector> {
        if op.n_qubits() != self.n_qubits {
            return Err(Error::Arity {
                expected: self.n_qubits,
                got: op.n_qubits(),
            });
        }
        let dim = self.amplitudes.len() as u64;
        let mut out = vec![Complex64::new(0.0, 0.0); dim as usize];
        for term in op.terms() {
            let m = term.x_mask;
            let z = term.z_mask;
            let scale = term.coeff * I_POW[((m & z).count_ones() % 4) as usize];
            for x in 0..dim {
                let a = self.amplitudes[x as usize];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                out[(x ^ m) as usize] += scale * parity_sign(x & z) * a;
            }
        }
        Ok(Statevector {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }

    /// Exact ⟨ψ|op|ψ⟩ for hermitian op.
    pub fn expectation_exact(&self, op: &PauliSum) -> Result<f64> {
        if op.n_qubits() != self.n_qubits {
            return Err(Error::Arity {
                expected: self.n_qubits,
                got: op.n_qubits(),
            });
        }
        if !op.is_hermitian(1e-10) {
            return Err(Error::Hermiticity(
                "expectation requires a hermitian operator".into(),
            ));
        }
        let dim = self.amplitudes.len() as u64;
        let mut acc = Complex64::new(0.0, 0.0);
        for term in op.terms() {
            let m = term.x_mask;
            let z = term.z_mask;
            let ipow = I_POW[((m & z).count_ones() % 4) as usize];
            let mut s = Complex64::new(0.0, 0.0);
            for x in 0..dim {
                let a = self.amplitudes[x as usize];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                s += self.amplitudes[(x ^ m) as usize].conj() * parity_sign(x & z) * a;
            }
            acc += term.coeff * ipow * s;
        }
        Ok(acc.re)
    }

    /// Exact (⟨op⟩, ⟨op²⟩ - ⟨op⟩²) from a single operator application:
    /// with φ = op·ψ, the mean is ⟨ψ|φ⟩ and the second moment is ‖φ‖².
    pub fn expectation_and_variance(&self, op: &PauliSum) -> Result<(f64, f64)> {
        if !op.is_hermitian(1e-10) {
            return Err(Error::Hermiticity(
                "expectation requires a hermitian operator".into(),
            ));
        }
        let phi = self.apply_pauli_sum(op)?;
        let mean = self.inner(&phi)?.re;
        let second = phi.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        Ok((mean, (second - mean * mean).max(0.0)))
    }

    /// Finite-shot variance proxy ⟨op²⟩ - ⟨op⟩², clamped at zero.
    pub fn variance_estimate(&self, op: &PauliSum) -> Result<f64> {
        Ok(self.expectation_and_variance(op)?.1)
    }

    /// exp(angle·K) for K given as a sum of Pauli strings with purely
    /// imaginary coefficients (an anti-hermitian operator). When the strings
    /// mutually commute each factor exp(i·angle·g·P) is applied in closed
    /// form; otherwise the exact exponential falls back to a scaled Taylor
    /// expansion, allowed only below 12 qubits.
    pub fn apply_exponential_sum(&mut self, k: &PauliSum, angle: f64) -> Result<()> {
        if k.n_qubits() != self.n_qubits {
            return Err(Error::Arity {
                expected: self.n_qubits,
                got: k.n_qubits(),
            });
        }
        if !k.is_anti_hermitian(1e-10) {
            return Err(Error::Hermiticity(
                "exponential generator must be anti-hermitian".into(),
            ));
        }
        if angle == 0.0 || k.is_empty() {
            return Ok(());
        }
        if k.mutually_commute() {
            for term in k.terms() {
                self.rotate_string(term, angle * term.coeff.im);
            }
            return Ok(());
        }
        if self.n_qubits >= 12 {
            return Err(Error::NonCommuting(format!(
                "generator strings do not commute and {} qubits is too wide \
                 for the dense fallback",
                self.n_qubits
            )));
        }
        self.exponential_taylor(k, angle);
        Ok(())
    }

    /// exp(i·phi·P) with P the bare string (coefficient ignored).
    fn rotate_string(&mut self, term: &PauliString, phi: f64) {
        let m = term.x_mask;
        let z = term.z_mask;
        let ipow = I_POW[((m & z).count_ones() % 4) as usize];
        let (c, s) = (phi.cos(), phi.sin());
        let dim = self.amplitudes.len() as u64;
        if m == 0 {
            let plus = Complex64::new(c, s);
            let minus = Complex64::new(c, -s);
            for x in 0..dim {
                self.amplitudes[x as usize] *= if (x & z).count_ones() & 1 == 0 {
                    plus
                } else {
                    minus
                };
            }
            return;
        }
        let is = Complex64::new(0.0, s);
        let pivot = 1u64 << (63 - m.leading_zeros());
        for x in 0..dim {
            if x & pivot != 0 {
                continue;
            }
            let y = x ^ m;
            let a = self.amplitudes[x as usize];
            let b = self.amplitudes[y as usize];
            let fa = ipow * parity_sign(x & z);
            let fb = ipow * parity_sign(y & z);
            self.amplitudes[x as usize] = c * a + is * fb * b;
            self.amplitudes[y as usize] = c * b + is * fa * a;
        }
    }

    /// Matrix-free scaled Taylor expansion of exp(angle·K); exact to machine
    /// precision for the modest norms that reach this path.
    fn exponential_taylor(&mut self, k: &PauliSum, angle: f64) {
        let coeff_norm: f64 = k.terms().iter().map(|t| t.coeff.norm()).sum();
        let scale = (angle.abs() * coeff_norm).max(1.0);
        let steps = scale.log2().ceil().max(0.0) as u32;
        let step_angle = angle / f64::powi(2.0, steps as i32);
        for _ in 0..(1u64 << steps) {
            let mut term = self.clone();
            let mut order = 1.0;
            loop {
                term = term.apply_pauli_sum(k).expect("dimensions already checked");
                let factor = step_angle / order;
                let mut largest = 0.0f64;
                for (dst, src) in self.amplitudes.iter_mut().zip(&mut term.amplitudes) {
                    *src *= factor;
                    *dst += *src;
                    largest = largest.max(src.norm_sqr());
                }
                if largest < 1e-34 || order > 60.0 {
                    break;
                }
                order += 1.0;
            }
        }
    }

    /// exp(angle·κ) for the generator's qubit image.
    pub fn apply_exponential(&mut self, gen: &Generator, angle: f64) -> Result<()> {
        let k = jw_generator(gen, self.n_qubits)?;
        self.apply_exponential_sum(&k, angle)
    }

    /// Applies every factor in order (first-listed factor acts first).
    pub fn apply_ansatz(&mut self, ansatz: &OrderedAnsatz, params: &[f64]) -> Result<()> {
        if params.len() != ansatz.factors.len() {
            return Err(Error::Arity {
                expected: ansatz.factors.len(),
                got: params.len(),
            });
        }
        for (f, &theta) in ansatz.factors.iter().zip(params) {
            self.apply_exponential(&f.generator, theta)?;
        }
        Ok(())
    }

    /// All configurations with probability ≥ threshold, sorted by descending
    /// probability (ties broken by ascending determinant).
    pub fn basis_probabilities(&self, threshold: f64) -> Vec<Configuration> {
        let mut out: Vec<Configuration> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter_map(|(x, a)| {
                let p = a.norm_sqr();
                (p >= threshold && p > 0.0)
                    .then_some(Configuration::new(x as u64, self.n_qubits, p))
            })
            .collect();
        out.sort_by(|l, r| {
            r.probability
                .partial_cmp(&l.probability)
                .expect("probabilities are finite")
                .then(l.bits.cmp(&r.bits))
        });
        out
    }

    /// Samples `shots` measurement outcomes, each bit then flipped
    /// independently with probability p_readout.
    pub fn sample_readout(&self, noise: &NoiseConfig) -> Result<BTreeMap<u64, u64>> {
        noise.validate()?;
        if noise.shots == 0 {
            return Err(Error::Mode("sampling needs at least one shot".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        let mut cdf = Vec::with_capacity(self.amplitudes.len());
        let mut acc = 0.0;
        for a in &self.amplitudes {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..noise.shots {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            let mut outcome = idx as u64;
            if noise.p_readout > 0.0 {
                for q in 0..self.n_qubits {
                    if rng.gen::<f64>() < noise.p_readout {
                        outcome ^= 1 << q;
                    }
                }
            }
            *histogram.entry(outcome).or_insert(0) += 1;
        }
        Ok(histogram)
    }
}

/// Scales each string by (1 - 2p)^weight, the exact survival factor of its
/// expectation value under independent per-qubit readout flips.
pub fn attenuate_by_readout(op: &PauliSum, p_readout: f64) -> PauliSum {
    let f = 1.0 - 2.0 * p_readout;
    let terms = op
        .terms()
        .iter()
        .map(|t| PauliString {
            coeff: t.coeff * f.powi(t.weight() as i32),
            ..*t
        })
        .collect();
    PauliSum::from_terms(op.n_qubits(), terms)
}

/// Expectation value of a hermitian operator under the configured mode.
///
/// Gate noise cannot act here because no circuit is available: trajectory
/// mode therefore reports the readout-attenuated exact value, and the full
/// trajectory ensemble (Pauli insertions during ansatz application) lives in
/// the variational objective, which owns the circuit.
pub fn expectation(state: &Statevector, op: &PauliSum, noise: &NoiseConfig) -> Result<f64> {
    noise.validate()?;
    match noise.mode {
        NoiseMode::Noiseless => state.expectation_exact(op),
        NoiseMode::ShotGaussian => {
            let mean = state.expectation_exact(op)?;
            let var = state.variance_estimate(op)?;
            let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
            Ok(mean + standard_normal(&mut rng) * (var / noise.shots as f64).sqrt())
        }
        NoiseMode::Trajectory => {
            state.expectation_exact(&attenuate_by_readout(op, noise.p_readout))
        }
    }
}

/// One ansatz factor lowered to its Pauli strings plus circuit-cost data.
#[derive(Debug, Clone)]
pub struct CompiledFactor {
    pub strings: PauliSum,
    /// Qubits touched by any string of this factor (Z chains included).
    pub support: Vec<usize>,
    pub cnot_count: u64,
    pub single_qubit_count: u64,
}

/// An ordered ansatz lowered once so repeated applications skip the
/// fermion-to-qubit mapping.
#[derive(Debug, Clone)]
pub struct CompiledAnsatz {
    pub n_qubits: usize,
    pub reference: u64,
    pub factors: Vec<CompiledFactor>,
}

impl CompiledAnsatz {
    pub fn compile(ansatz: &OrderedAnsatz) -> Result<CompiledAnsatz> {
        let mut factors = Vec::with_capacity(ansatz.factors.len());
        for f in &ansatz.factors {
            let strings = jw_generator(&f.generator, ansatz.n_spin)?;
            let mut mask = 0u64;
            let mut cnot = 0u64;
            let mut single = 0u64;
            for term in strings.terms() {
                mask |= term.x_mask | term.z_mask;
                let (c2, c1) = string_gate_cost(term);
                cnot += c2;
                single += c1;
            }
            let support = (0..ansatz.n_spin).filter(|q| mask >> q & 1 == 1).collect();
            factors.push(CompiledFactor {
                strings,
                support,
                cnot_count: cnot,
                single_qubit_count: single,
            });
        }
        Ok(CompiledAnsatz {
            n_qubits: ansatz.n_spin,
            reference: ansatz.reference,
            factors,
        })
    }

    pub fn n_parameters(&self) -> usize {
        self.factors.len()
    }

    pub fn cnot_total(&self) -> u64 {
        self.factors.iter().map(|f| f.cnot_count).sum()
    }

    pub fn single_qubit_total(&self) -> u64 {
        self.factors.iter().map(|f| f.single_qubit_count).sum()
    }

    /// Noiseless |Ψ(θ)⟩ from the reference determinant.
    pub fn apply(&self, params: &[f64]) -> Result<Statevector> {
        self.apply_from(
            Statevector::basis_state(self.n_qubits, self.reference),
            params,
        )
    }

    /// Noiseless application on top of an arbitrary prepared state.
    pub fn apply_from(&self, mut state: Statevector, params: &[f64]) -> Result<Statevector> {
        if params.len() != self.factors.len() {
            return Err(Error::Arity {
                expected: self.factors.len(),
                got: params.len(),
            });
        }
        for (f, &theta) in self.factors.iter().zip(params) {
            state.apply_exponential_sum(&f.strings, theta)?;
        }
        Ok(state)
    }

    /// One noisy trajectory: after each factor, every constituent CNOT
    /// depolarizes with probability p2 (a uniform non-identity two-qubit
    /// Pauli on a random pair of touched qubits) and every single-qubit gate
    /// with probability p1 (a uniform X/Y/Z on a random touched qubit). Draw
    /// order is fixed: per factor, CNOT slots first, then single-qubit slots.
    pub fn apply_noisy<R: Rng>(
        &self,
        params: &[f64],
        p1: f64,
        p2: f64,
        rng: &mut R,
    ) -> Result<Statevector> {
        self.apply_noisy_from(
            Statevector::basis_state(self.n_qubits, self.reference),
            params,
            p1,
            p2,
            rng,
        )
    }

    /// One noisy trajectory on top of an arbitrary prepared state.
    pub fn apply_noisy_from<R: Rng>(
        &self,
        mut state: Statevector,
        params: &[f64],
        p1: f64,
        p2: f64,
        rng: &mut R,
    ) -> Result<Statevector> {
        if params.len() != self.factors.len() {
            return Err(Error::Arity {
                expected: self.factors.len(),
                got: params.len(),
            });
        }
        for (f, &theta) in self.factors.iter().zip(params) {
            state.apply_exponential_sum(&f.strings, theta)?;
            if f.support.is_empty() {
                continue;
            }
            for _ in 0..f.cnot_count {
                if p2 > 0.0 && rng.gen::<f64>() < p2 {
                    insert_two_qubit_pauli(&mut state, &f.support, rng);
                }
            }
            for _ in 0..f.single_qubit_count {
                if p1 > 0.0 && rng.gen::<f64>() < p1 {
                    let q = f.support[rng.gen_range(0..f.support.len())];
                    insert_single_qubit_pauli(&mut state, q, rng);
                }
            }
        }
        Ok(state)
    }
}

fn pauli_digit_masks(digit: u8, qubit: usize) -> (u64, u64) {
    let x = matches!(digit, 1 | 2) as u64;
    let z = matches!(digit, 2 | 3) as u64;
    (x << qubit, z << qubit)
}

fn insert_single_qubit_pauli<R: Rng>(state: &mut Statevector, qubit: usize, rng: &mut R) {
    let digit = rng.gen_range(1..=3u8);
    let (x_mask, z_mask) = pauli_digit_masks(digit, qubit);
    state.apply_pauli_string(&PauliString {
        x_mask,
        z_mask,
        coeff: Complex64::new(1.0, 0.0),
    });
}

fn insert_two_qubit_pauli<R: Rng>(state: &mut Statevector, support: &[usize], rng: &mut R) {
    if support.len() < 2 {
        insert_single_qubit_pauli(state, support[0], rng);
        return;
    }
    let a = rng.gen_range(0..support.len());
    let mut b = rng.gen_range(0..support.len() - 1);
    if b >= a {
        b += 1;
    }
    let idx = rng.gen_range(1..16u8);
    let (xa, za) = pauli_digit_masks(idx % 4, support[a]);
    let (xb, zb) = pauli_digit_masks(idx / 4, support[b]);
    state.apply_pauli_string(&PauliString {
        x_mask: xa | xb,
        z_mask: za | zb,
        coeff: Complex64::new(1.0, 0.0),
    });
}

/// Renders a determinant with qubit 0 (spin orbital 0) leftmost.
pub fn format_bitstring(determinant: u64, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if determinant >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// `bitstring,count` lines, header included, keys in determinant order.
pub fn histogram_to_csv(histogram: &BTreeMap<u64, u64>, n_qubits: usize) -> String {
    let mut out = String::from("bitstring,count\n");
    for (&det, &count) in histogram {
        out.push_str(&format_bitstring(det, n_qubits));
        out.push(',');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::integrals::{parse_fcidump, parse_fcidump_str, MolecularIntegrals};
    use crate::qubit_map::jw_hamiltonian;
    use approx::assert_abs_diff_eq;

    fn h2_ints() -> MolecularIntegrals {
        parse_fcidump(&assets::asset_path("h2_0.735").unwrap()).unwrap()
    }

    #[test]
    fn reference_preparation_sets_occupied_bits() {
        let ints = h2_ints();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let state = Statevector::prepare_reference(&indexing);
        assert_eq!(state.probability_of(0b0101), 1.0);
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-14);

        let empty =
            parse_fcidump_str("&FCI NORB=1,NELEC=0,MS2=0,\n&END\n0.0 0 0 0 0\n").unwrap();
        let idx = SpinOrbitalIndexing::build(&empty, false).unwrap();
        assert_eq!(Statevector::prepare_reference(&idx).probability_of(0), 1.0);

        let full = parse_fcidump_str("&FCI NORB=1,NELEC=2,MS2=0,\n&END\n1.0 1 1 0 0\n").unwrap();
        let idx = SpinOrbitalIndexing::build(&full, false).unwrap();
        assert_eq!(
            Statevector::prepare_reference(&idx).probability_of(0b11),
            1.0
        );
    }

    #[test]
    fn zero_angle_is_bit_exact_identity() {
        let gen = Generator::excitation(&[2, 3], &[0, 1]).unwrap();
        let mut state = Statevector::basis_state(4, 0b0011);
        let before = state.clone();
        state.apply_exponential(&gen, 0.0).unwrap();
        assert_eq!(state, before);
    }

    #[test]
    fn quarter_turn_maps_reference_to_excited_determinant() {
        let gen = Generator::excitation(&[1], &[0]).unwrap();
        let mut state = Statevector::basis_state(2, 0b01);
        state
            .apply_exponential(&gen, std::f64::consts::FRAC_PI_2)
            .unwrap();
        let a = state.amplitude(0b10);
        assert_abs_diff_eq!(a.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn exponential_inverts_cleanly() {
        let double = Generator::excitation(&[2, 3], &[0, 1]).unwrap();
        let single = Generator::excitation(&[3], &[1]).unwrap();
        let mut state = Statevector::basis_state(4, 0b0011);
        let before = state.clone();
        state.apply_exponential(&double, 0.37).unwrap();
        state.apply_exponential(&single, -0.81).unwrap();
        state.apply_exponential(&single, 0.81).unwrap();
        state.apply_exponential(&double, -0.37).unwrap();
        for (a, b) in state.amplitudes().iter().zip(before.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn taylor_fallback_matches_closed_form() {
        // i(X + Z) has non-commuting strings; exp(iθ(X+Z)) on |0⟩ is
        // cos(√2 θ)|0⟩ + i sin(√2 θ)(|0⟩ + |1⟩)/√2.
        let k = PauliSum::from_terms(
            1,
            vec![
                PauliString {
                    x_mask: 1,
                    z_mask: 0,
                    coeff: Complex64::new(0.0, 1.0),
                },
                PauliString {
                    x_mask: 0,
                    z_mask: 1,
                    coeff: Complex64::new(0.0, 1.0),
                },
            ],
        );
        assert!(!k.mutually_commute());
        let theta = 0.7;
        let mut state = Statevector::basis_state(1, 0);
        state.apply_exponential_sum(&k, theta).unwrap();
        let alpha = std::f64::consts::SQRT_2 * theta;
        let expect0 = Complex64::new(alpha.cos(), alpha.sin() / std::f64::consts::SQRT_2);
        let expect1 = Complex64::new(0.0, alpha.sin() / std::f64::consts::SQRT_2);
        assert_abs_diff_eq!((state.amplitude(0) - expect0).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((state.amplitude(1) - expect1).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wide_noncommuting_exponential_is_rejected() {
        let mut terms = Vec::new();
        terms.push(PauliString {
            x_mask: 1,
            z_mask: 0,
            coeff: Complex64::new(0.0, 1.0),
        });
        terms.push(PauliString {
            x_mask: 0,
            z_mask: 1,
            coeff: Complex64::new(0.0, 1.0),
        });
        let k = PauliSum::from_terms(12, terms);
        let mut state = Statevector::basis_state(12, 0);
        let err = state.apply_exponential_sum(&k, 0.3).unwrap_err();
        assert!(matches!(err, Error::NonCommuting(_)));
    }

    #[test]
    fn hf_expectation_matches_reference_energy() {
        let ints = h2_ints();
        let meta = assets::asset_metadata("h2_0.735").unwrap();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let h = jw_hamiltonian(&ints);
        let state = Statevector::prepare_reference(&indexing);
        let e = state.expectation_exact(&h).unwrap();
        assert_abs_diff_eq!(e, meta.reference_energies_hartree.hf, epsilon = 1e-7);
    }

    #[test]
    fn expectation_modes_agree_on_identity() {
        let state = Statevector::basis_state(2, 0b01);
        let op = PauliSum::identity(2, Complex64::new(-3.25, 0.0));
        for mode in [
            NoiseMode::Noiseless,
            NoiseMode::ShotGaussian,
            NoiseMode::Trajectory,
        ] {
            let noise = NoiseConfig {
                mode,
                seed: 7,
                shots: 100,
                ..NoiseConfig::default()
            };
            assert_abs_diff_eq!(
                expectation(&state, &op, &noise).unwrap(),
                -3.25,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn shot_gaussian_is_seed_reproducible_and_shrinks_with_shots() {
        let ints = h2_ints();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let h = jw_hamiltonian(&ints);
        let state = Statevector::prepare_reference(&indexing);
        let exact = state.expectation_exact(&h).unwrap();
        let noise = NoiseConfig {
            mode: NoiseMode::ShotGaussian,
            shots: 1000,
            seed: 42,
            ..NoiseConfig::default()
        };
        let a = expectation(&state, &h, &noise).unwrap();
        let b = expectation(&state, &h, &noise).unwrap();
        assert_eq!(a, b);
        let var = state.variance_estimate(&h).unwrap();
        assert!((a - exact).abs() < 6.0 * (var / 1000.0).sqrt().max(1e-12));
    }

    #[test]
    fn trajectory_mode_without_noise_is_bit_identical_to_noiseless() {
        let ints = h2_ints();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let h = jw_hamiltonian(&ints);
        let state = Statevector::prepare_reference(&indexing);
        let clean = state.expectation_exact(&h).unwrap();
        let noise = NoiseConfig {
            mode: NoiseMode::Trajectory,
            trajectories: 1,
            ..NoiseConfig::default()
        };
        assert_eq!(expectation(&state, &h, &noise).unwrap(), clean);
    }

    #[test]
    fn basis_probabilities_threshold_and_ordering() {
        let state = Statevector::basis_state(3, 0b101);
        let entries = state.basis_probabilities(0.0);
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].bits, 0b101);
        assert_eq!(entries[0].bitstring(), "101");
        assert_abs_diff_eq!(entries[0].probability, 1.0, epsilon = 1e-14);

        let mut uniform = Statevector::basis_state(2, 0);
        uniform.amplitudes = vec![Complex64::new(0.5, 0.0); 4];
        assert!(uniform.basis_probabilities(0.3).is_empty());
        let all = uniform.basis_probabilities(0.0);
        assert_eq!(all.len(), 4);
        let total: f64 = all.iter().map(|c| c.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn readout_sampling_behaves_at_the_extremes() {
        let state = Statevector::basis_state(3, 0b110);
        let clean = NoiseConfig {
            shots: 100,
            seed: 3,
            ..NoiseConfig::default()
        };
        let h = state.sample_readout(&clean).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[&0b110], 100);

        let flipped = NoiseConfig {
            p_readout: 1.0,
            shots: 50,
            seed: 3,
            ..NoiseConfig::default()
        };
        let single = Statevector::basis_state(1, 0);
        let h = single.sample_readout(&flipped).unwrap();
        assert_eq!(h[&1], 50);

        let weak = NoiseConfig {
            p_readout: 0.1,
            shots: 100_000,
            seed: 11,
            ..NoiseConfig::default()
        };
        let h = single.sample_readout(&weak).unwrap();
        let ones = *h.get(&1).unwrap_or(&0) as f64 / 100_000.0;
        assert!((ones - 0.1).abs() < 0.01, "flip fraction {ones}");
    }

    #[test]
    fn gate_costs_follow_the_staircase_convention() {
        let ints = h2_ints();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let empty = OrderedAnsatz::empty(indexing.n_spin, indexing.reference_determinant());
        let report = cnot_cost(&empty);
        assert_eq!(report.cnot_count, 0);
        assert_eq!(report.single_qubit_count, 0);

        let mut single = OrderedAnsatz::empty(indexing.n_spin, indexing.reference_determinant());
        single
            .factors
            .push(crate::ansatz::AnsatzFactor::bare(
                Generator::excitation(&[1], &[0]).unwrap(),
            ));
        let report = cnot_cost(&single);
        assert_eq!(report.cnot_count, 4);
        assert_eq!(
            report.cnot_count,
            report.factors.iter().map(|f| f.cnot_count).sum::<u64>()
        );
        assert_eq!(
            report.single_qubit_count,
            report
                .factors
                .iter()
                .map(|f| f.single_qubit_count)
                .sum::<u64>()
        );
    }

    #[test]
    fn compiled_ansatz_agrees_with_direct_application() {
        let ints = h2_ints();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let (pool, _) = crate::ansatz::build_duccsd_pool(&indexing, &ints, 0.0);
        let params: Vec<f64> = (0..pool.len()).map(|i| 0.1 * (i as f64 + 1.0)).collect();
        let compiled = CompiledAnsatz::compile(&pool).unwrap();
        let fast = compiled.apply(&params).unwrap();
        let mut slow = Statevector::prepare_reference(&indexing);
        slow.apply_ansatz(&pool, &params).unwrap();
        for (a, b) in fast.amplitudes().iter().zip(slow.amplitudes()) {
            assert_eq!(a, b);
        }
        assert_eq!(compiled.cnot_total(), cnot_cost(&pool).cnot_count);
    }

    #[test]
    fn noisy_application_with_zero_rates_is_bit_identical() {
        let ints = h2_ints();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let (pool, _) = crate::ansatz::build_duccsd_pool(&indexing, &ints, 0.0);
        let params = vec![0.05; pool.len()];
        let compiled = CompiledAnsatz::compile(&pool).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let noisy = compiled.apply_noisy(&params, 0.0, 0.0, &mut rng).unwrap();
        let clean = compiled.apply(&params).unwrap();
        assert_eq!(noisy.amplitudes(), clean.amplitudes());
    }

    #[test]
    fn pauli_insertions_preserve_the_norm() {
        let ints = h2_ints();
        let indexing = SpinOrbitalIndexing::build(&ints, false).unwrap();
        let (pool, _) = crate::ansatz::build_duccsd_pool(&indexing, &ints, 0.0);
        let params = vec![0.05; pool.len()];
        let compiled = CompiledAnsatz::compile(&pool).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let noisy = compiled.apply_noisy(&params, 0.5, 0.5, &mut rng).unwrap();
        assert_abs_diff_eq!(noisy.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn bitstring_rendering_puts_qubit_zero_first() {
        assert_eq!(format_bitstring(0b01, 2), "10");
        assert_eq!(format_bitstring(0b100, 3), "001");
        let mut hist = BTreeMap::new();
        hist.insert(0b01u64, 3u64);
        hist.insert(0b10u64, 5u64);
        assert_eq!(
            histogram_to_csv(&hist, 2),
            "bitstring,count\n10,3\n01,5\n"
        );
    }

    #[test]
    fn invalid_noise_configs_are_rejected() {
        let bad_p = NoiseConfig {
            p1: 1.5,
            ..NoiseConfig::default()
        };
        assert!(matches!(bad_p.validate(), Err(Error::Mode(_))));
        let no_shots = NoiseConfig {
            mode: NoiseMode::ShotGaussian,
            shots: 0,
            ..NoiseConfig::default()
        };
        assert!(matches!(no_shots.validate(), Err(Error::Mode(_))));
    }
}
