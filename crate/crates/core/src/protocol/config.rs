use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::algebra::{xor_all, Bit};
use crate::statevector::DEFAULT_QUBIT_CAP;

/// Which simulator executes the chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Full state vector per chain (`2n + 3` qubits, plus any fake-pair partners).
    Dense,
    /// Symbolic Pauli-frame tracking of the four prepared states.
    #[serde(rename = "pauli", alias = "pauliframe")]
    PauliFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Participant count `n`, not counting the third party.
    pub parties: usize,
    /// Payload bits `L` per participant.
    pub payload_bits: usize,
    /// Decoy pairs `R` per link.
    pub decoys: usize,
    pub backend: Backend,
    /// A link aborts the run when its mismatch rate exceeds this.
    pub detection_threshold: f64,
    pub seed: u64,
    pub qubit_cap: usize,
    /// Whether the third party publishes the sum. Reported only.
    pub publish_sum: bool,
}

impl ProtocolConfig {
    pub fn new(parties: usize, payload_bits: usize, decoys: usize) -> Self {
        ProtocolConfig {
            parties,
            payload_bits,
            decoys,
            backend: Backend::Dense,
            detection_threshold: 0.0,
            seed: 0,
            qubit_cap: DEFAULT_QUBIT_CAP,
            publish_sum: false,
        }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.detection_threshold = threshold;
        self
    }

    /// Number of links, `n + 1`.
    pub fn links(&self) -> usize {
        self.parties + 1
    }

    pub fn pairs_per_link(&self) -> usize {
        self.payload_bits + self.decoys
    }

    /// Qubits in one honest chain: the reference memory plus both halves of
    /// every link.
    pub fn chain_qubits(&self) -> usize {
        2 * self.parties + 3
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.parties < 2 {
            return Err(ProtocolError::InvalidConfig(format!("need at least 2 parties, got {}", self.parties)));
        }
        if self.payload_bits < 1 {
            return Err(ProtocolError::InvalidConfig("payload length must be at least 1".into()));
        }
        if self.decoys < 2 || !self.decoys.is_multiple_of(2) {
            return Err(ProtocolError::InvalidConfig(format!(
                "decoy count must be even and at least 2, got {}",
                self.decoys
            )));
        }
        if !(0.0..=1.0).contains(&self.detection_threshold) {
            return Err(ProtocolError::InvalidConfig(format!(
                "detection threshold {} outside [0, 1]",
                self.detection_threshold
            )));
        }
        if self.backend == Backend::Dense && self.chain_qubits() > self.qubit_cap {
            return Err(ProtocolError::Capacity { needed: self.chain_qubits(), cap: self.qubit_cap });
        }
        Ok(())
    }
}

/// Private bit strings, one row `M_i` per participant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretInputs {
    rows: Vec<Vec<Bit>>,
}

impl SecretInputs {
    pub fn new(rows: Vec<Vec<Bit>>) -> Self {
        SecretInputs { rows }
    }

    pub fn from_fn(parties: usize, bits: usize, mut f: impl FnMut(usize, usize) -> Bit) -> Self {
        SecretInputs { rows: (0..parties).map(|i| (0..bits).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn zeros(parties: usize, bits: usize) -> Self {
        Self::from_fn(parties, bits, |_, _| Bit::ZERO)
    }

    /// Inputs enumerated from the low `parties * bits` bits of `code`, row-major.
    pub fn from_code(parties: usize, bits: usize, code: u64) -> Self {
        Self::from_fn(parties, bits, |i, j| Bit::from_low_bit(code >> (i * bits + j)))
    }

    pub fn rows(&self) -> &[Vec<Bit>] {
        &self.rows
    }

    /// `m_{party, chain}` with `party` counted from 1.
    pub fn bit(&self, party: usize, chain: usize) -> Bit {
        self.rows[party - 1][chain]
    }

    /// Pointwise XOR of all rows.
    pub fn xor_sum(&self) -> Vec<Bit> {
        let width = self.rows.first().map_or(0, Vec::len);
        (0..width).map(|j| xor_all(self.rows.iter().map(|r| r[j]))).collect()
    }

    pub fn check_dimensions(&self, cfg: &ProtocolConfig) -> Result<(), ProtocolError> {
        if self.rows.len() != cfg.parties || self.rows.iter().any(|r| r.len() != cfg.payload_bits) {
            return Err(ProtocolError::DimensionMismatch {
                expected: (cfg.parties, cfg.payload_bits),
                found: (self.rows.len(), self.rows.first().map_or(0, Vec::len)),
            });
        }
        Ok(())
    }
}
