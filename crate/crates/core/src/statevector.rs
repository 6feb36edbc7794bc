//! Dense state-vector simulation of a handful of qubits.
//!
//! Qubit `k` is bit `k` of the amplitude index. Registers only grow: every
//! allocation appends qubits as the new most-significant bits.

use std::collections::VecDeque;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{BellLabel, Bit, MeasBasis, PauliOp, PreparedState};

pub const DEFAULT_QUBIT_CAP: usize = 20;

const NORM_TOL: f64 = 1e-9;
const ZERO_PROB: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("register capacity exceeded: need {needed} qubits, cap is {cap}")]
    CapacityExceeded { needed: usize, cap: usize },
    #[error("qubit {index} out of bounds for a {qubits}-qubit register")]
    OutOfBounds { index: usize, qubits: usize },
    #[error("two-qubit operation needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("projection has zero norm; register state is corrupt")]
    DegenerateProjection,
    #[error("registers have different shapes ({0} vs {1} qubits)")]
    ShapeMismatch(usize, usize),
    #[error("forced outcome {0} has zero probability")]
    TapeConflict(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitIndex(usize);

impl QubitIndex {
    pub fn get(self) -> usize {
        self.0
    }
}

/// Forced outcomes consumed in order by a [`Sampler`].
///
/// Only genuinely random events read from the tape; outcomes fixed with
/// certainty never do, so two backends that agree on the physics consume
/// a shared tape identically.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutcomeTape {
    pub bsm: VecDeque<BellLabel>,
    pub bits: VecDeque<Bit>,
}

impl OutcomeTape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_bsm<I: IntoIterator<Item = BellLabel>>(mut self, outcomes: I) -> Self {
        self.bsm.extend(outcomes);
        self
    }

    pub fn with_bits<I: IntoIterator<Item = Bit>>(mut self, outcomes: I) -> Self {
        self.bits.extend(outcomes);
        self
    }
}

/// Source of measurement outcomes: a tape of forced results, falling back to
/// Born-rule sampling from a seeded PRNG.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    tape: OutcomeTape,
}

impl Sampler {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Sampler { rng, tape: OutcomeTape::default() }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_tape(mut self, tape: OutcomeTape) -> Self {
        self.tape = tape;
        self
    }

    pub fn tape(&self) -> &OutcomeTape {
        &self.tape
    }

    /// Picks a Bell label from a probability table indexed by [`BellLabel::index`].
    pub fn pick_bsm(&mut self, probs: &[f64; 4]) -> Result<BellLabel, BackendError> {
        let possible = probs.iter().filter(|&&p| p > ZERO_PROB).count();
        if possible == 0 {
            return Err(BackendError::DegenerateProjection);
        }
        if possible > 1 {
            if let Some(forced) = self.tape.bsm.pop_front() {
                if probs[forced.index()] <= ZERO_PROB {
                    return Err(BackendError::TapeConflict(format!("bsm {forced}")));
                }
                return Ok(forced);
            }
        }
        let total: f64 = probs.iter().sum();
        let mut r = self.rng.gen::<f64>() * total;
        let mut last = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p <= ZERO_PROB {
                continue;
            }
            last = i;
            if r < p {
                return Ok(BellLabel::from_index(i));
            }
            r -= p;
        }
        Ok(BellLabel::from_index(last))
    }

    /// Picks a bit that is 1 with probability `p_one`.
    pub fn pick_bit(&mut self, p_one: f64) -> Result<Bit, BackendError> {
        let p_zero = 1.0 - p_one;
        if p_one <= ZERO_PROB {
            return Ok(Bit::ZERO);
        }
        if p_zero <= ZERO_PROB {
            return Ok(Bit::ONE);
        }
        if let Some(forced) = self.tape.bits.pop_front() {
            return Ok(forced);
        }
        Ok(Bit::new(self.rng.gen::<f64>() < p_one))
    }
}

/// Joint pure state of up to `cap` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    amps: Vec<Complex64>,
    qubits: usize,
    cap: usize,
}

impl Default for Register {
    fn default() -> Self {
        Self::new()
    }
}

impl Register {
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(cap: usize) -> Self {
        Register { amps: vec![Complex64::new(1.0, 0.0)], qubits: 0, cap }
    }

    /// Builds a register from raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, BackendError> {
        let qubits = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << qubits {
            return Err(BackendError::ShapeMismatch(amps.len(), 1 << qubits));
        }
        Ok(Register { amps, qubits, cap: qubits.max(DEFAULT_QUBIT_CAP) })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn qubit(&self, index: usize) -> Result<QubitIndex, BackendError> {
        if index < self.qubits {
            Ok(QubitIndex(index))
        } else {
            Err(BackendError::OutOfBounds { index, qubits: self.qubits })
        }
    }

    fn check(&self, q: QubitIndex) -> Result<usize, BackendError> {
        self.qubit(q.0).map(|q| q.0)
    }

    /// Tensors a `2^k`-amplitude local state onto the register as `k` new qubits.
    fn append(&mut self, local: &[Complex64]) -> Result<usize, BackendError> {
        let k = local.len().trailing_zeros() as usize;
        let needed = self.qubits + k;
        if needed > self.cap {
            return Err(BackendError::CapacityExceeded { needed, cap: self.cap });
        }
        let old = std::mem::take(&mut self.amps);
        self.amps = local.iter().flat_map(|&l| old.iter().map(move |&a| a * l)).collect();
        let first = self.qubits;
        self.qubits = needed;
        Ok(first)
    }

    /// Appends a pair in `|B_label>`; the first returned qubit is the left half.
    pub fn alloc_bell(&mut self, label: BellLabel) -> Result<(QubitIndex, QubitIndex), BackendError> {
        let h = FRAC_1_SQRT_2;
        let sign = if label.y.is_one() { -h } else { h };
        // local index = left + 2*right
        let mut local = [Complex64::new(0.0, 0.0); 4];
        let x = label.x.as_u8() as usize;
        local[x << 1] = Complex64::new(h, 0.0);
        local[1 | ((x ^ 1) << 1)] = Complex64::new(sign, 0.0);
        let first = self.append(&local)?;
        Ok((QubitIndex(first), QubitIndex(first + 1)))
    }

    pub fn alloc_prepared(&mut self, s: PreparedState) -> Result<QubitIndex, BackendError> {
        let h = FRAC_1_SQRT_2;
        let local = match s {
            PreparedState::Zero => [1.0, 0.0],
            PreparedState::One => [0.0, 1.0],
            PreparedState::Plus => [h, h],
            PreparedState::Minus => [h, -h],
        };
        let local = local.map(|v| Complex64::new(v, 0.0));
        let first = self.append(&local)?;
        Ok(QubitIndex(first))
    }

    /// Applies `i^phase Z^z X^x` to qubit `q`.
    pub fn apply_gate(&mut self, q: QubitIndex, g: PauliOp) -> Result<(), BackendError> {
        let q = self.check(q)?;
        let mask = 1usize << q;
        if g.x.is_one() {
            for i in 0..self.amps.len() {
                if i & mask == 0 {
                    self.amps.swap(i, i | mask);
                }
            }
        }
        if g.z.is_one() {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *a = -*a;
                }
            }
        }
        if g.phase() != 0 {
            let ph = Complex64::new(0.0, 1.0).powu(g.phase() as u32);
            for a in &mut self.amps {
                *a *= ph;
            }
        }
        Ok(())
    }

    fn hadamard(&mut self, q: usize) {
        let mask = 1usize << q;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a = self.amps[i];
                let b = self.amps[i | mask];
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | mask] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    /// Amplitude of Bell component `label` on `(q1, q2)` for a base index with
    /// both qubits cleared.
    fn bell_component(&self, base: usize, m1: usize, m2: usize, label: BellLabel) -> Complex64 {
        let x = label.x.as_u8() as usize;
        let sign = if label.y.is_one() { -1.0 } else { 1.0 };
        let first = self.amps[base | if x == 1 { m2 } else { 0 }];
        let second = self.amps[base | m1 | if x == 0 { m2 } else { 0 }];
        (first + second * sign) * FRAC_1_SQRT_2
    }

    fn pair_masks(&self, q1: QubitIndex, q2: QubitIndex) -> Result<(usize, usize), BackendError> {
        let a = self.check(q1)?;
        let b = self.check(q2)?;
        if a == b {
            return Err(BackendError::SameQubit(a));
        }
        Ok((1 << a, 1 << b))
    }

    /// Born probabilities of the four Bell outcomes on `(q1, q2)`.
    pub fn bell_probabilities(&self, q1: QubitIndex, q2: QubitIndex) -> Result<[f64; 4], BackendError> {
        let (m1, m2) = self.pair_masks(q1, q2)?;
        let mut probs = [0.0; 4];
        for base in (0..self.amps.len()).filter(|i| i & (m1 | m2) == 0) {
            for label in BellLabel::ALL {
                probs[label.index()] += self.bell_component(base, m1, m2, label).norm_sqr();
            }
        }
        Ok(probs)
    }

    /// Bell-state measurement of `(q1, q2)`; `q1` plays the first qubit of `|B_xy>`.
    pub fn bsm(&mut self, q1: QubitIndex, q2: QubitIndex, sampler: &mut Sampler) -> Result<BellLabel, BackendError> {
        let probs = self.bell_probabilities(q1, q2)?;
        let label = sampler.pick_bsm(&probs)?;
        let p = probs[label.index()];
        if p <= ZERO_PROB {
            return Err(BackendError::DegenerateProjection);
        }
        let (m1, m2) = self.pair_masks(q1, q2)?;
        let scale = 1.0 / p.sqrt();
        let h = FRAC_1_SQRT_2;
        let x = label.x.as_u8() as usize;
        let sign = if label.y.is_one() { -h } else { h };
        for base in (0..self.amps.len()).filter(|i| i & (m1 | m2) == 0) {
            let c = self.bell_component(base, m1, m2, label) * scale;
            self.amps[base] = Complex64::new(0.0, 0.0);
            self.amps[base | m1] = Complex64::new(0.0, 0.0);
            self.amps[base | m2] = Complex64::new(0.0, 0.0);
            self.amps[base | m1 | m2] = Complex64::new(0.0, 0.0);
            self.amps[base | if x == 1 { m2 } else { 0 }] = c * h;
            self.amps[base | m1 | if x == 0 { m2 } else { 0 }] = c * sign;
        }
        Ok(label)
    }

    /// Probability that qubit `q` reads 1 in the computational basis.
    pub fn prob_one(&self, q: QubitIndex) -> Result<f64, BackendError> {
        let mask = 1usize << self.check(q)?;
        Ok(self.amps.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Projective single-qubit measurement. A diagonal-basis measurement leaves
    /// the qubit in `|+>` or `|->`.
    pub fn measure_in_basis(
        &mut self,
        q: QubitIndex,
        basis: MeasBasis,
        sampler: &mut Sampler,
    ) -> Result<Bit, BackendError> {
        let qi = self.check(q)?;
        if basis == MeasBasis::Diagonal {
            self.hadamard(qi);
        }
        let p1 = self.prob_one(q)?.clamp(0.0, 1.0);
        let bit = sampler.pick_bit(p1)?;
        let p = if bit.is_one() { p1 } else { 1.0 - p1 };
        if p <= ZERO_PROB {
            return Err(BackendError::DegenerateProjection);
        }
        let mask = 1usize << qi;
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) == bit.is_one() {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if basis == MeasBasis::Diagonal {
            self.hadamard(qi);
        }
        Ok(bit)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }
}

/// `|<a|b>| >= 1 - 1e-9`.
pub fn equal_up_to_global_phase(a: &Register, b: &Register) -> Result<bool, BackendError> {
    if a.qubits != b.qubits {
        return Err(BackendError::ShapeMismatch(a.qubits, b.qubits));
    }
    Ok(overlap(a, b) >= 1.0 - NORM_TOL)
}

/// `|<a|b>|` for equally shaped registers.
pub fn overlap(a: &Register, b: &Register) -> f64 {
    a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}
