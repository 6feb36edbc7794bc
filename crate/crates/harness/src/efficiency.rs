//! Qubit efficiency of quantum summation protocols, one logical bit each.

use qsum_core::protocol::{chain_memory_count, DenseChain, PairSource};
use qsum_core::statevector::DEFAULT_QUBIT_CAP;
use qsum_core::{BellLabel, PreparedState};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEntry {
    pub protocol: String,
    pub resource: String,
    /// Qubit-count formula in `n`.
    pub formula: String,
    pub qubits: usize,
    pub efficiency: f64,
}

fn entry(protocol: &str, resource: &str, formula: &str, qubits: usize) -> EfficiencyEntry {
    EfficiencyEntry {
        protocol: protocol.into(),
        resource: resource.into(),
        formula: formula.into(),
        qubits,
        efficiency: 1.0 / qubits as f64,
    }
}

/// Published comparison rows at `n` parties, ending with this protocol.
pub fn efficiency_table(n: usize) -> Result<Vec<EfficiencyEntry>, HarnessError> {
    if n < 2 {
        return Err(HarnessError::InvalidConfig(format!("efficiency needs n >= 2, got {n}")));
    }
    Ok(vec![
        entry("Shi et al.", "(n+1)-partite entangled state", "3n-2", 3 * n - 2),
        entry("Zhang et al.", "n-partite entangled state", "3n-2", 3 * n - 2),
        entry("Liu et al. (variant 1)", "n-partite entangled state", "3n-2", 3 * n - 2),
        entry("Liu et al. (variant 2)", "(n+1)-partite entangled state", "3n+1", 3 * n + 1),
        entry("Yang et al.", "n-partite entangled state", "3n-2", 3 * n - 2),
        entry("This work", "Bell states", "2n+3", 2 * n + 3),
    ])
}

/// Memories the simulator allocates for one chain: from the allocation plan
/// for every `n`, and cross-checked against a built dense chain when it fits
/// in the default register.
pub fn simulator_chain_memories(n: usize) -> Result<usize, HarnessError> {
    let planned = chain_memory_count(n);
    if planned <= DEFAULT_QUBIT_CAP {
        let sources = vec![PairSource::Genuine(BellLabel::PHI_PLUS); n + 1];
        let built = DenseChain::build(n, &sources, PreparedState::Zero, DEFAULT_QUBIT_CAP)?;
        if built.reg.qubit_count() != planned {
            return Err(HarnessError::InvalidConfig(format!(
                "chain plan says {planned} memories, register holds {}",
                built.reg.qubit_count()
            )));
        }
    }
    Ok(planned)
}
