//! The five-step summation protocol as a role-scoped state machine.
//!
//! A run moves a [`NetworkState`] through distribution, decoy detection,
//! encoding, Bell measurements and correction. Every step is exposed on its
//! own so that adversaries can interpose; [`run_protocol`] chains them for an
//! honest execution.

mod chain;
mod config;
mod detection;
mod network;
mod transcript;

use thiserror::Error;

use crate::algebra::BellLabel;
use crate::rng::RunRng;
use crate::statevector::BackendError;

pub use chain::{
    chain_memory_count, correct_and_compute, correct_chain, correction_mask, encode_private_inputs,
    encode_private_inputs_with, perform_bsms, perform_bsms_with, Chain, ChainPlan, ChainReadout, CorrectionMask,
    DenseChain, FakePartner, FrameChain, Memory, SumResult,
};
pub use config::{Backend, ProtocolConfig, SecretInputs};
pub use detection::{run_security_detection, DetectionRecord, DetectionReport, LinkCheck, Verdict};
pub use network::{distribute_entanglement, DisclosedLabel, NetworkState, PairSource, PartyView, Side, Stage, TpView};
pub use transcript::{Announcement, ConfigEcho, Transcript, TranscriptDocument};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("chain needs {needed} qubits but the dense backend cap is {cap}")]
    Capacity { needed: usize, cap: usize },
    #[error("inputs are {found:?} (parties x bits), expected {expected:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("operation expects stage {expected:?}, network is at {found:?}")]
    WrongStage { expected: Stage, found: Stage },
    #[error("missing Bell-measurement result of party {party} on chain {chain}")]
    IncompleteTranscript { party: usize, chain: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

impl ProtocolError {
    pub fn is_capacity(&self) -> bool {
        matches!(self, ProtocolError::Capacity { .. } | ProtocolError::Backend(BackendError::CapacityExceeded { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Completed(SumResult),
    Aborted,
}

impl RunOutcome {
    pub fn sum(&self) -> Option<&SumResult> {
        match self {
            RunOutcome::Completed(s) => Some(s),
            RunOutcome::Aborted => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub detection: DetectionReport,
    pub outcome: RunOutcome,
    pub transcript: Transcript,
    pub network: NetworkState,
}

impl ProtocolRun {
    pub fn document(&self, reveal_secrets: bool) -> TranscriptDocument {
        TranscriptDocument::new(
            self.network.config(),
            &self.transcript,
            self.outcome.sum(),
            self.network.tp_view(),
            reveal_secrets,
        )
    }
}

/// Distributes a fresh network and runs Steps 2-5 on it.
pub fn run_protocol(
    cfg: &ProtocolConfig,
    inputs: &SecretInputs,
    rng: &mut RunRng,
) -> Result<ProtocolRun, ProtocolError> {
    inputs.check_dimensions(cfg)?;
    let net = distribute_entanglement(cfg, rng)?;
    execute(net, inputs, rng)
}

/// Runs Steps 2-5 on an already distributed (possibly tampered) network. An
/// abort returns before any encoding; retrying is the caller's decision.
pub fn execute(mut net: NetworkState, inputs: &SecretInputs, rng: &mut RunRng) -> Result<ProtocolRun, ProtocolError> {
    inputs.check_dimensions(net.config())?;
    let detection = run_security_detection(&mut net, rng)?;
    let mut transcript = Transcript::new(net.config().parties, net.config().payload_bits);
    transcript.detection_records = detection.records.clone();
    push_decoy_announcements(&mut transcript);
    if !detection.passed() {
        return Ok(ProtocolRun { detection, outcome: RunOutcome::Aborted, transcript, network: net });
    }
    encode_private_inputs(&mut net, inputs)?;
    let measured = perform_bsms(&mut net, &mut rng.outcomes)?;
    transcript.bsm_results = measured.bsm_results;
    transcript.announcements.extend(measured.announcements);
    let sum = correct_and_compute(&mut net, &transcript, &mut rng.outcomes)?;
    Ok(ProtocolRun { detection, outcome: RunOutcome::Completed(sum), transcript, network: net })
}

/// Records the label disclosures of Step 2, grouped per checker.
pub(crate) fn push_decoy_announcements(transcript: &mut Transcript) {
    let mut groups: Vec<(usize, usize, Vec<usize>, Vec<BellLabel>)> = Vec::new();
    for r in &transcript.detection_records {
        match groups.last_mut() {
            Some((link, checker, positions, labels)) if *link == r.link && *checker == r.checker => {
                positions.push(r.position);
                labels.push(r.announced);
            }
            _ => groups.push((r.link, r.checker, vec![r.position], vec![r.announced])),
        }
    }
    let disclosed = groups.into_iter().map(|(link, checker, positions, labels)| Announcement::DecoyLabels {
        link,
        checker,
        positions,
        labels,
    });
    // Disclosures precede everything else in the log.
    let rest = std::mem::take(&mut transcript.announcements);
    transcript.announcements = disclosed.chain(rest).collect();
}
