//! Steps 3-5 on individual chains.
//!
//! Memory numbering follows the chain: `T` is the reference qubit, link `i`
//! joins memories `2i` (left) and `2i + 1` (right). Participant `i` holds
//! memories `2i - 1` and `2i`; the third party holds `T`, `0` and `2n + 1`.

use serde::{Deserialize, Serialize};

use super::network::{NetworkState, PairSource, Side, Stage};
use super::transcript::{Announcement, Transcript};
use super::{Backend, ProtocolError, SecretInputs};
use crate::algebra::{
    apply_pauli_to_prepared, pauli_compose, pauli_from_teleport_hop, xor_all, BellLabel, Bit, PauliOp, PreparedState,
};
use crate::statevector::{QubitIndex, Register, Sampler};

/// One memory of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Memory {
    Reference,
    Link { link: usize, side: Side },
}

/// The memories one honest chain occupies, in allocation order.
#[derive(Debug, Clone, Copy)]
pub struct ChainPlan {
    pub parties: usize,
}

impl ChainPlan {
    pub fn memories(&self) -> impl Iterator<Item = Memory> {
        std::iter::once(Memory::Reference).chain(
            (0..=self.parties).flat_map(|link| [Side::Left, Side::Right].map(|side| Memory::Link { link, side })),
        )
    }
}

/// Quantum memories one chain needs with `parties` participants.
pub fn chain_memory_count(parties: usize) -> usize {
    ChainPlan { parties }.memories().count()
}

/// A third-party qubit entangled with one half of a fake pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FakePartner {
    pub link: usize,
    pub side: Side,
    pub qubit: QubitIndex,
}

#[derive(Debug, Clone)]
pub struct DenseChain {
    pub reg: Register,
    pub reference_qubit: QubitIndex,
    /// Qubit of chain memory `k`, for `k` in `0..=2n+1`.
    pub memory: Vec<QubitIndex>,
    pub partners: Vec<FakePartner>,
    pub reference: PreparedState,
}

impl DenseChain {
    pub fn build(
        parties: usize,
        sources: &[PairSource],
        reference: PreparedState,
        cap: usize,
    ) -> Result<Self, ProtocolError> {
        let mut reg = Register::with_cap(cap);
        let mut reference_qubit = None;
        let mut memory = Vec::with_capacity(2 * parties + 2);
        let mut partners = Vec::new();
        for m in (ChainPlan { parties }).memories() {
            match m {
                Memory::Reference => reference_qubit = Some(reg.alloc_prepared(reference)?),
                Memory::Link { link, side: Side::Left } => {
                    let (l, r) = match sources[link] {
                        PairSource::Genuine(label) => reg.alloc_bell(label)?,
                        PairSource::Fake { left, right } => {
                            let (pl, l) = reg.alloc_bell(left)?;
                            let (r, pr) = reg.alloc_bell(right)?;
                            partners.push(FakePartner { link, side: Side::Left, qubit: pl });
                            partners.push(FakePartner { link, side: Side::Right, qubit: pr });
                            (l, r)
                        }
                    };
                    memory.push(l);
                    memory.push(r);
                }
                Memory::Link { side: Side::Right, .. } => {}
            }
        }
        let reference_qubit = reference_qubit.expect("plan starts with the reference memory");
        Ok(DenseChain { reg, reference_qubit, memory, partners, reference })
    }

    pub fn partner(&self, link: usize, side: Side) -> Option<QubitIndex> {
        self.partners.iter().find(|p| p.link == link && p.side == side).map(|p| p.qubit)
    }
}

/// Symbolic chain: the physical labels and which participants applied `U`.
#[derive(Debug, Clone)]
pub struct FrameChain {
    pub labels: Vec<BellLabel>,
    /// `encoded[i - 1]` is participant i's exponent of `U`.
    pub encoded: Vec<Bit>,
    pub reference: PreparedState,
}

#[derive(Debug, Clone)]
pub enum Chain {
    Dense(Box<DenseChain>),
    Frame(FrameChain),
}

impl Chain {
    pub fn as_dense_mut(&mut self) -> Option<&mut DenseChain> {
        match self {
            Chain::Dense(d) => Some(d),
            Chain::Frame(_) => None,
        }
    }

    pub fn qubit_count(&self) -> Option<usize> {
        match self {
            Chain::Dense(d) => Some(d.reg.qubit_count()),
            Chain::Frame(_) => None,
        }
    }
}

fn build_chains(net: &NetworkState) -> Result<Vec<Chain>, ProtocolError> {
    let cfg = net.config();
    let positions = net.chain_positions();
    (0..cfg.payload_bits)
        .map(|j| {
            let sources: Vec<PairSource> = (0..cfg.links()).map(|i| net.physical()[i][positions[i][j]]).collect();
            let reference = net.tp_view().reference[j];
            match cfg.backend {
                Backend::Dense => {
                    Ok(Chain::Dense(Box::new(DenseChain::build(cfg.parties, &sources, reference, cfg.qubit_cap)?)))
                }
                Backend::PauliFrame => {
                    let labels = sources
                        .iter()
                        .map(|s| match s {
                            PairSource::Genuine(l) => Ok(*l),
                            PairSource::Fake { .. } => Err(ProtocolError::Unsupported(
                                "fake pairs inside a chain need the dense backend".into(),
                            )),
                        })
                        .collect::<Result<_, _>>()?;
                    Ok(Chain::Frame(FrameChain { labels, encoded: vec![Bit::ZERO; cfg.parties], reference }))
                }
            }
        })
        .collect()
}

/// Step 3: participant i applies `U` to memory `2i - 1` of chain j iff
/// `m_ij = 1`.
pub fn encode_private_inputs(net: &mut NetworkState, inputs: &SecretInputs) -> Result<(), ProtocolError> {
    encode_private_inputs_with(net, inputs, |_, _| true)
}

/// Like [`encode_private_inputs`], but participant `i` encodes on chain `j`
/// only when `acts(i, j)`.
pub fn encode_private_inputs_with(
    net: &mut NetworkState,
    inputs: &SecretInputs,
    acts: impl Fn(usize, usize) -> bool,
) -> Result<(), ProtocolError> {
    net.expect_stage(Stage::Checked { passed: true })?;
    inputs.check_dimensions(net.config())?;
    let mut chains = build_chains(net)?;
    let parties = net.config().parties;
    for (j, chain) in chains.iter_mut().enumerate() {
        for party in 1..=parties {
            let m = inputs.bit(party, j);
            if !m.is_one() || !acts(party, j) {
                continue;
            }
            match chain {
                Chain::Dense(d) => {
                    let q = d.memory[2 * party - 1];
                    d.reg.apply_gate(q, PauliOp::U)?;
                }
                Chain::Frame(f) => f.encoded[party - 1] = Bit::ONE,
            }
        }
    }
    net.chains = chains;
    net.stage = Stage::Encoded;
    Ok(())
}

/// Step 4: the third party measures `(T, 0)`, participant i measures
/// `(2i - 1, 2i)`, and every result is announced to the third party.
pub fn perform_bsms(net: &mut NetworkState, sampler: &mut Sampler) -> Result<Transcript, ProtocolError> {
    perform_bsms_with(net, sampler, |_, _| true)
}

/// Like [`perform_bsms`], but party `i` (0 for the third party) measures
/// chain `j` only when `acts(i, j)`; skipped measurements stay `None`.
pub fn perform_bsms_with(
    net: &mut NetworkState,
    sampler: &mut Sampler,
    acts: impl Fn(usize, usize) -> bool,
) -> Result<Transcript, ProtocolError> {
    net.expect_stage(Stage::Encoded)?;
    let parties = net.config().parties;
    let width = net.config().payload_bits;
    let mut transcript = Transcript::new(parties, width);
    for (j, chain) in net.chains.iter_mut().enumerate() {
        for party in 0..=parties {
            if !acts(party, j) {
                continue;
            }
            let label = match chain {
                Chain::Dense(d) => {
                    let (a, b) = if party == 0 {
                        (d.reference_qubit, d.memory[0])
                    } else {
                        (d.memory[2 * party - 1], d.memory[2 * party])
                    };
                    d.reg.bsm(a, b, sampler)?
                }
                // Every hop of an honest chain is uniform over the four labels.
                Chain::Frame(_) => sampler.pick_bsm(&[0.25; 4])?,
            };
            transcript.bsm_results[party][j] = Some(label);
            transcript.announcements.push(Announcement::BsmResult { party, chain: j, label, public: false });
        }
    }
    net.stage = Stage::Measured;
    Ok(transcript)
}

/// Correction exponents `(S_x, S_z)` the third party derives for one chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionMask {
    pub sx: Bit,
    pub sz: Bit,
}

impl CorrectionMask {
    /// `X^{S_x} Z^{S_z}` in canonical form.
    pub fn operator(self) -> PauliOp {
        pauli_compose(PauliOp::zx(Bit::ZERO, self.sx), PauliOp::zx(self.sz, Bit::ZERO))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReadout {
    pub mask: CorrectionMask,
    pub readout: Bit,
    pub readout_state: PreparedState,
    pub sum_bit: Bit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumResult {
    pub sum_bits: Vec<Bit>,
    pub correction_masks: Vec<CorrectionMask>,
    pub readouts: Vec<Bit>,
    pub readout_states: Vec<PreparedState>,
}

/// `S_x = XOR_i (a_i ^ x_ij)` and `S_z = XOR_i (b_i ^ y_ij)` from the third
/// party's labels and the announced results.
pub fn correction_mask(net: &NetworkState, tr: &Transcript, j: usize) -> Result<CorrectionMask, ProtocolError> {
    let positions = net.chain_positions();
    let mut hops = Vec::with_capacity(net.config().links());
    for (i, (labels, pos)) in net.tp_view().link_labels.iter().zip(&positions).enumerate() {
        let outcome = tr.result(i, j).ok_or(ProtocolError::IncompleteTranscript { party: i, chain: j })?;
        hops.push(labels[pos[j]] ^ outcome);
    }
    Ok(CorrectionMask { sx: xor_all(hops.iter().map(|h| h.x)), sz: xor_all(hops.iter().map(|h| h.y)) })
}

/// Step 5 for chain `j`: correct memory `2n + 1`, measure it in the basis of
/// the reference state and compare.
pub fn correct_chain(
    net: &mut NetworkState,
    tr: &Transcript,
    j: usize,
    sampler: &mut Sampler,
) -> Result<ChainReadout, ProtocolError> {
    net.expect_stage(Stage::Measured)?;
    let mask = correction_mask(net, tr, j)?;
    let parties = net.config().parties;
    let reference = net.tp_view().reference[j];
    let basis = reference.basis();
    let readout = match &mut net.chains[j] {
        Chain::Dense(d) => {
            let out = d.memory[2 * parties + 1];
            d.reg.apply_gate(out, mask.operator())?;
            d.reg.measure_in_basis(out, basis, sampler)?
        }
        Chain::Frame(f) => {
            let mut state = f.reference;
            for i in 0..=parties {
                let outcome = tr.result(i, j).ok_or(ProtocolError::IncompleteTranscript { party: i, chain: j })?;
                state = apply_pauli_to_prepared(pauli_from_teleport_hop(f.labels[i], outcome), state).0;
                if i < parties {
                    state = apply_pauli_to_prepared(PauliOp::u_pow(f.encoded[i]), state).0;
                }
            }
            let state = apply_pauli_to_prepared(mask.operator(), state).0;
            debug_assert_eq!(state.basis(), basis);
            state.e_bit()
        }
    };
    let readout_state = PreparedState::from_basis_outcome(basis, readout);
    Ok(ChainReadout { mask, readout, readout_state, sum_bit: reference.e_bit() ^ readout_state.e_bit() })
}

/// Step 5 on every chain.
pub fn correct_and_compute(
    net: &mut NetworkState,
    tr: &Transcript,
    sampler: &mut Sampler,
) -> Result<SumResult, ProtocolError> {
    let mut out = SumResult { sum_bits: vec![], correction_masks: vec![], readouts: vec![], readout_states: vec![] };
    for j in 0..net.config().payload_bits {
        let r = correct_chain(net, tr, j, sampler)?;
        out.sum_bits.push(r.sum_bit);
        out.correction_masks.push(r.mask);
        out.readouts.push(r.readout);
        out.readout_states.push(r.readout_state);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_counts() {
        for n in 2..=16 {
            assert_eq!(chain_memory_count(n), 2 * n + 3);
        }
    }

    #[test]
    fn dense_chain_layout() {
        let sources = vec![PairSource::Genuine(BellLabel::PHI_PLUS); 4];
        let c = DenseChain::build(3, &sources, PreparedState::Plus, 20).unwrap();
        assert_eq!(c.reg.qubit_count(), 9);
        assert_eq!(c.memory.len(), 8);
        assert!(c.partners.is_empty());

        let mut sources = sources;
        sources[1] = PairSource::FAKE_PHI_PLUS;
        let c = DenseChain::build(3, &sources, PreparedState::Plus, 20).unwrap();
        assert_eq!(c.reg.qubit_count(), 11);
        assert!(c.partner(1, Side::Left).is_some() && c.partner(1, Side::Right).is_some());
        assert!(c.partner(0, Side::Left).is_none());
    }

    #[test]
    fn correction_operator_order() {
        let m = CorrectionMask { sx: Bit::ONE, sz: Bit::ONE };
        // XZ = -ZX
        assert_eq!(m.operator(), PauliOp::new(2, Bit::ONE, Bit::ONE));
    }
}
