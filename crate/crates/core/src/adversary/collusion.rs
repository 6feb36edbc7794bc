use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AttackError, AttackOutcome};
use crate::algebra::{xor_all, Bit, MeasBasis};
use crate::protocol::{
    correct_chain, distribute_entanglement, encode_private_inputs_with, perform_bsms_with, run_security_detection,
    Backend, CorrectionMask, ProtocolConfig, ProtocolError, SecretInputs,
};
use crate::rng::RunRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollusionStrategy {
    /// The colluder right after the honest block keeps its incoming memory
    /// unmeasured and reads it with a guessed correction and basis.
    WithholdAndMeasure,
    /// The colluders on both sides of the honest block Bell-measure their
    /// outer memories and compare against the block's announcements.
    SwapAndCompare,
}

/// Attacked chain.
const CHAIN: usize = 0;

struct Roles {
    /// First and last participant of the honest block whose XOR is targeted:
    /// `p` alone, or `p, p+1` when the honest pair is adjacent.
    first: usize,
    last: usize,
    /// Colluder right after the block.
    withholder: usize,
}

fn roles(cfg: &ProtocolConfig, honest: (usize, usize), strategy: CollusionStrategy) -> Result<Roles, AttackError> {
    if cfg.backend != Backend::Dense {
        return Err(AttackError::NeedsDense);
    }
    let n = cfg.parties;
    if n < 4 {
        return Err(AttackError::InvalidParameters(format!("collusion needs n >= 4, got {n}")));
    }
    let (p, q) = honest;
    if !(1 <= p && p < q && q <= n) {
        return Err(AttackError::InvalidTarget(format!("honest pair ({p}, {q}) must satisfy 1 <= p < q <= {n}")));
    }
    let last = if q == p + 1 { q } else { p };
    let withholder = last + 1;
    if withholder > n || withholder == q {
        return Err(AttackError::InvalidTarget(format!("no colluder follows participant {last}")));
    }
    if strategy == CollusionStrategy::SwapAndCompare && p < 2 {
        return Err(AttackError::InvalidTarget("swap strategy needs a colluder before participant p".into()));
    }
    Ok(Roles { first: p, last, withholder })
}

/// `n - 2` participants collude against the honest pair `(p, q)` on one chain.
///
/// The target is `m_p` (or `m_p ^ m_q` for adjacent `q = p + 1`). Colluders
/// know their own bits and all announcements but none of the third party's
/// labels or reference bases, so each strategy guesses those uniformly.
pub fn collusion_attack(
    cfg: &ProtocolConfig,
    honest: (usize, usize),
    strategy: CollusionStrategy,
    inputs: &SecretInputs,
    rng: &mut RunRng,
) -> Result<AttackOutcome, AttackError> {
    let roles = roles(cfg, honest, strategy)?;
    inputs.check_dimensions(cfg)?;
    let mut net = distribute_entanglement(cfg, rng)?;
    let report = run_security_detection(&mut net, rng)?;
    let mut outcome = AttackOutcome { detected: !report.passed(), escaped: true, ..AttackOutcome::default() };
    if !report.passed() {
        return Ok(outcome);
    }

    let w = roles.withholder;
    let swap_partner = roles.first - 1;
    encode_private_inputs_with(&mut net, inputs, |party, j| !(party == w && j == CHAIN))?;
    let transcript = perform_bsms_with(&mut net, &mut rng.outcomes, |party, j| {
        j != CHAIN || (party != w && !(strategy == CollusionStrategy::SwapAndCompare && party == swap_partner))
    })?;

    let target = xor_all((roles.first..=roles.last).map(|s| inputs.bit(s, CHAIN)));
    let chain = net.chain_mut(CHAIN).and_then(|c| c.as_dense_mut()).ok_or(AttackError::NeedsDense)?;
    let incoming = chain.memory[2 * roles.last + 1];
    let guess = match strategy {
        CollusionStrategy::WithholdAndMeasure => {
            let basis = if rng.adversary.gen() { MeasBasis::Diagonal } else { MeasBasis::Computational };
            let mask = CorrectionMask { sx: Bit::new(rng.adversary.gen()), sz: Bit::new(rng.adversary.gen()) };
            chain.reg.apply_gate(incoming, mask.operator()).map_err(ProtocolError::from)?;
            let t = chain.reg.measure_in_basis(incoming, basis, &mut rng.outcomes).map_err(ProtocolError::from)?;
            // Assumes E(reference) = 0 and strips the colluders' own bits.
            t ^ xor_all((1..roles.first).map(|s| inputs.bit(s, CHAIN)))
        }
        CollusionStrategy::SwapAndCompare => {
            let outer = chain.memory[2 * roles.first - 2];
            let k = chain.reg.bsm(outer, incoming, &mut rng.outcomes).map_err(ProtocolError::from)?;
            let announced = (roles.first..=roles.last)
                .map(|s| transcript.result(s, CHAIN).expect("honest block measured"))
                .fold(k, |acc, l| acc ^ l);
            // Treats the unknown link labels as |B_00>.
            announced.x
        }
    };
    outcome.adversary_guess = Some(guess);
    outcome.guess_correct = Some(guess == target);

    let expected = inputs.xor_sum();
    let mut all_ok = true;
    for (j, &bit) in expected.iter().enumerate().skip(1) {
        all_ok &= correct_chain(&mut net, &transcript, j, &mut rng.outcomes)?.sum_bit == bit;
    }
    outcome.remaining_sums_correct = Some(all_ok);
    Ok(outcome)
}
