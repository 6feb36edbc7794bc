//! Attacks on the protocol and the experiments that measure them.
//!
//! * [`tp_swap_attack`]: the third party hands participant `i` two fake links
//!   and learns its bit by entanglement swapping, unless a decoy check lands
//!   on a fake link.
//! * [`fake_bell_detection_experiment`]: how often a decoy check exposes a
//!   fake pair.
//! * [`collusion_attack`]: `n - 2` colluding participants try to read an
//!   honest participant's bit without the third party's secrets.

mod collusion;
mod fake_bell;
mod tp_swap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Bit;
use crate::protocol::ProtocolError;

pub use collusion::{collusion_attack, CollusionStrategy};
pub use fake_bell::{fake_bell_detection_experiment, FakeBellTrial};
pub use tp_swap::{tp_swap_attack, DetectionMode, FakePlacement};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("invalid attack target: {0}")]
    InvalidTarget(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("attack needs the dense backend")]
    NeedsDense,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

impl AttackError {
    pub fn is_capacity(&self) -> bool {
        matches!(self, AttackError::Protocol(e) if e.is_capacity())
    }
}

/// Where along the chain the attacked participant sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainPosition {
    /// `1 < i < n`: both adjacent links must be faked.
    Mid,
    /// `i = 1` or `i = n`: one adjacent link is shared with the third party.
    Endpoint,
}

impl ChainPosition {
    pub fn of(target: usize, parties: usize) -> Self {
        if target == 1 || target == parties {
            ChainPosition::Endpoint
        } else {
            ChainPosition::Mid
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackScenario {
    TpSwap { target: usize, placement: FakePlacement },
    FakeBell { link: usize, count: usize },
    Collusion { honest: (usize, usize), strategy: CollusionStrategy },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub detected: bool,
    /// No decoy check touched a fake link.
    pub escaped: bool,
    pub decoys_hit_fake_links: usize,
    pub adversary_guess: Option<Bit>,
    pub guess_correct: Option<bool>,
    /// Sum bits of the chains the attack left alone, checked against the true
    /// XOR. `None` when the run aborted.
    pub remaining_sums_correct: Option<bool>,
}

fn check_lengths(payload_bits: usize, decoys: usize) -> Result<(), AttackError> {
    if payload_bits < 1 || decoys < 2 || !decoys.is_multiple_of(2) {
        return Err(AttackError::InvalidParameters(format!(
            "need L >= 1 and even R >= 2, got L={payload_bits}, R={decoys}"
        )));
    }
    Ok(())
}

/// Probability that no fake link used by the swap attack is picked for a
/// decoy check: `L^2/(L+R)^2` mid-chain, `L/(L+R)` at an endpoint.
pub fn analytic_escape_probability(
    payload_bits: usize,
    decoys: usize,
    position: ChainPosition,
) -> Result<f64, AttackError> {
    check_lengths(payload_bits, decoys)?;
    let unselected = payload_bits as f64 / (payload_bits + decoys) as f64;
    Ok(match position {
        ChainPosition::Mid => unselected * unselected,
        ChainPosition::Endpoint => unselected,
    })
}

/// Probability that a single fake pair on one link survives detection,
/// counting checks it passes by luck: `(L + R/2)/(L+R)`.
///
/// This goes beyond the escape probability above, which only counts the
/// pair never being selected.
pub fn single_fake_pass_probability(payload_bits: usize, decoys: usize) -> Result<f64, AttackError> {
    check_lengths(payload_bits, decoys)?;
    Ok((payload_bits as f64 + decoys as f64 / 2.0) / (payload_bits + decoys) as f64)
}
