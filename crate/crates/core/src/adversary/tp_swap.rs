use serde::{Deserialize, Serialize};

use super::{AttackError, AttackOutcome};
use crate::algebra::BellLabel;
use crate::protocol::{
    correct_chain, distribute_entanglement, encode_private_inputs, perform_bsms_with, run_security_detection, Backend,
    NetworkState, PairSource, ProtocolConfig, SecretInputs, Side,
};
use crate::rng::RunRng;

/// Position the fakes occupy on their links. Using the first (or last)
/// position on both links guarantees that, if neither is consumed by
/// detection, both end up in the first (or last) chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FakePlacement {
    #[default]
    Front,
    Back,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectionMode {
    #[default]
    Enabled,
    /// Test-only: decoys are taken from the far end of every link and never
    /// measured, so the fake links always survive.
    Disabled,
}

struct Plan {
    position: usize,
    chain: usize,
    fake_links: Vec<usize>,
}

fn plan(cfg: &ProtocolConfig, target: usize, placement: FakePlacement) -> Result<Plan, AttackError> {
    if cfg.backend != Backend::Dense {
        return Err(AttackError::NeedsDense);
    }
    if target == 0 || target > cfg.parties {
        return Err(AttackError::InvalidTarget(format!("participant {target} not in 1..={}", cfg.parties)));
    }
    let (position, chain) = match placement {
        FakePlacement::Front => (0, 0),
        FakePlacement::Back => (cfg.pairs_per_link() - 1, cfg.payload_bits - 1),
    };
    // Link target-1 carries memory 2i-1, link target carries memory 2i. The
    // third party already holds one end of link 0 and of link n.
    let fake_links = [target - 1, target].into_iter().filter(|&l| l != 0 && l != cfg.parties).collect();
    Ok(Plan { position, chain, fake_links })
}

/// The third party's entanglement-swapping attack on participant `target`.
///
/// Memory `2i - 1` ends up entangled with third-party qubit `b` and memory
/// `2i` with `c`. After the participant announces `x_i y_i`, the third party
/// measures `(b, c)` and guesses `m = 0` iff the outcome matches what the
/// swap predicts without `U`.
pub fn tp_swap_attack(
    cfg: &ProtocolConfig,
    target: usize,
    placement: FakePlacement,
    inputs: &SecretInputs,
    rng: &mut RunRng,
    mode: DetectionMode,
) -> Result<AttackOutcome, AttackError> {
    let plan = plan(cfg, target, placement)?;
    inputs.check_dimensions(cfg)?;
    let mut net = distribute_entanglement(cfg, rng)?;
    for &link in &plan.fake_links {
        net.replace_pair(link, plan.position, PairSource::FAKE_PHI_PLUS)?;
    }

    let passed = match mode {
        DetectionMode::Enabled => run_security_detection(&mut net, rng)?.passed(),
        DetectionMode::Disabled => {
            let width = cfg.pairs_per_link();
            let far: Vec<usize> = match placement {
                FakePlacement::Front => (width - cfg.decoys..width).collect(),
                FakePlacement::Back => (0..cfg.decoys).collect(),
            };
            net.force_detection_pass(vec![far; cfg.links()]);
            true
        }
    };
    let hits = plan.fake_links.iter().filter(|&&l| net.decoy_positions()[l].contains(&plan.position)).count();
    let mut outcome = AttackOutcome {
        detected: !passed,
        escaped: hits == 0,
        decoys_hit_fake_links: hits,
        ..AttackOutcome::default()
    };
    if !passed {
        return Ok(outcome);
    }

    encode_private_inputs(&mut net, inputs)?;
    // The third party keeps memory 0 of the attacked chain for itself.
    let attacked = plan.chain;
    let transcript = perform_bsms_with(&mut net, &mut rng.outcomes, |party, j| !(party == 0 && j == attacked))?;

    if outcome.escaped {
        let guess = swap_guess(&mut net, cfg, target, &plan, transcript.result(target, attacked), rng)?;
        outcome.adversary_guess = Some(guess);
        outcome.guess_correct = Some(guess == inputs.bit(target, attacked));
    }

    let expected = inputs.xor_sum();
    let mut all_ok = true;
    for j in (0..cfg.payload_bits).filter(|&j| j != attacked) {
        all_ok &= correct_chain(&mut net, &transcript, j, &mut rng.outcomes)?.sum_bit == expected[j];
    }
    outcome.remaining_sums_correct = Some(all_ok);
    Ok(outcome)
}

fn swap_guess(
    net: &mut NetworkState,
    cfg: &ProtocolConfig,
    target: usize,
    plan: &Plan,
    announced: Option<BellLabel>,
    rng: &mut RunRng,
) -> Result<crate::algebra::Bit, AttackError> {
    let announced = announced.ok_or(AttackError::InvalidTarget("target did not announce".into()))?;
    let n = cfg.parties;
    // The third party's own links may have lost other positions to decoys, so
    // look up which pair actually sits in the attacked chain.
    let positions = net.chain_positions();
    let claimed = |link: usize| net.tp_view().link_labels[link][positions[link][plan.chain]];
    let label_b = if target == 1 { claimed(0) } else { BellLabel::PHI_PLUS };
    let label_c = if target == n { claimed(n) } else { BellLabel::PHI_PLUS };
    let chain = net.chain_mut(plan.chain).and_then(|c| c.as_dense_mut()).ok_or(AttackError::NeedsDense)?;
    let b = if target == 1 { chain.memory[0] } else { chain.partner(target - 1, Side::Right).expect("fake link") };
    let c = if target == n { chain.memory[2 * n + 1] } else { chain.partner(target, Side::Left).expect("fake link") };
    let swapped = chain.reg.bsm(b, c, &mut rng.outcomes).map_err(crate::protocol::ProtocolError::from)?;
    // (b, c) collapse to label_b ^ label_c ^ x_i y_i, shifted by (m, m) when U was applied.
    let delta = swapped ^ announced ^ label_b ^ label_c;
    debug_assert_eq!(delta.x, delta.y);
    Ok(delta.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Bit;
    use crate::rng::trial_seed;
    use rand::Rng;

    fn random_inputs(n: usize, l: usize, rng: &mut RunRng) -> SecretInputs {
        SecretInputs::from_fn(n, l, |_, _| Bit::new(rng.adversary.gen()))
    }

    #[test]
    fn without_detection_the_guess_is_always_right() {
        for target in 1..=4 {
            for placement in [FakePlacement::Front, FakePlacement::Back] {
                let cfg = ProtocolConfig::new(4, 3, 2);
                for k in 0..40 {
                    let mut rng = RunRng::from_seed(trial_seed(target as u64, k));
                    let inputs = random_inputs(4, 3, &mut rng);
                    let out =
                        tp_swap_attack(&cfg, target, placement, &inputs, &mut rng, DetectionMode::Disabled).unwrap();
                    assert!(out.escaped && !out.detected);
                    assert_eq!(out.guess_correct, Some(true), "target {target} {placement:?}");
                    assert_eq!(out.remaining_sums_correct, Some(true));
                }
            }
        }
    }

    #[test]
    fn invalid_targets_and_backend() {
        let cfg = ProtocolConfig::new(3, 2, 2);
        let inputs = SecretInputs::zeros(3, 2);
        let mut rng = RunRng::from_seed(0);
        assert!(matches!(
            tp_swap_attack(&cfg, 0, FakePlacement::Front, &inputs, &mut rng, DetectionMode::Enabled),
            Err(AttackError::InvalidTarget(_))
        ));
        assert!(tp_swap_attack(&cfg, 4, FakePlacement::Front, &inputs, &mut rng, DetectionMode::Enabled).is_err());
        let frame = cfg.clone().with_backend(Backend::PauliFrame);
        assert!(matches!(
            tp_swap_attack(&frame, 2, FakePlacement::Front, &inputs, &mut rng, DetectionMode::Enabled),
            Err(AttackError::NeedsDense)
        ));
    }

    #[test]
    fn fake_links_by_position() {
        let cfg = ProtocolConfig::new(4, 2, 2);
        assert_eq!(plan(&cfg, 1, FakePlacement::Front).unwrap().fake_links, vec![1]);
        assert_eq!(plan(&cfg, 2, FakePlacement::Front).unwrap().fake_links, vec![1, 2]);
        assert_eq!(plan(&cfg, 4, FakePlacement::Back).unwrap().fake_links, vec![3]);
        assert_eq!(plan(&cfg, 4, FakePlacement::Back).unwrap().position, 3);
    }

    #[test]
    fn caught_runs_abort_and_escaped_runs_guess() {
        let cfg = ProtocolConfig::new(4, 2, 2);
        for target in 1..=4 {
            for placement in [FakePlacement::Front, FakePlacement::Back] {
                let mut saw_abort = false;
                for k in 0..150 {
                    let mut rng = RunRng::from_seed(trial_seed(99 + target as u64, k));
                    let inputs = random_inputs(4, 2, &mut rng);
                    let out =
                        tp_swap_attack(&cfg, target, placement, &inputs, &mut rng, DetectionMode::Enabled).unwrap();
                    if out.detected {
                        saw_abort = true;
                        assert!(out.decoys_hit_fake_links > 0);
                        assert!(out.adversary_guess.is_none());
                    }
                    if out.escaped {
                        assert_eq!(out.guess_correct, Some(true), "target {target} {placement:?}");
                    }
                    if !out.detected {
                        assert_eq!(out.remaining_sums_correct, Some(true));
                    }
                }
                assert!(saw_abort);
            }
        }
    }
}
