use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::AttackError;
use crate::protocol::{distribute_entanglement, run_security_detection, Backend, PairSource, ProtocolConfig};
use crate::rng::RunRng;

/// Result of one detection round with planted fake pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FakeBellTrial {
    /// Decoy checks that landed on a fake pair.
    pub fake_checks: usize,
    pub fake_mismatches: usize,
    pub aborted: bool,
    /// Mismatches on genuine pairs; always 0 for a correct simulator.
    pub genuine_mismatches: usize,
}

/// Plants `count` fake pairs at uniformly random positions of `link` and runs
/// the decoy checks.
pub fn fake_bell_detection_experiment(
    cfg: &ProtocolConfig,
    link: usize,
    count: usize,
    rng: &mut RunRng,
) -> Result<FakeBellTrial, AttackError> {
    if cfg.backend != Backend::Dense {
        return Err(AttackError::NeedsDense);
    }
    if link >= cfg.links() {
        return Err(AttackError::InvalidTarget(format!("link {link} not in 0..{}", cfg.links())));
    }
    if count > cfg.pairs_per_link() {
        return Err(AttackError::InvalidParameters(format!(
            "{count} fake pairs do not fit on a link of {}",
            cfg.pairs_per_link()
        )));
    }
    let mut net = distribute_entanglement(cfg, rng)?;
    for position in sample(&mut rng.adversary, cfg.pairs_per_link(), count) {
        net.replace_pair(link, position, PairSource::FAKE_PHI_PLUS)?;
    }
    let report = run_security_detection(&mut net, rng)?;
    let mut trial = FakeBellTrial { aborted: !report.passed(), ..FakeBellTrial::default() };
    for r in &report.records {
        if net.physical()[r.link][r.position].is_fake() {
            trial.fake_checks += 1;
            trial.fake_mismatches += r.mismatch() as usize;
        } else {
            trial.genuine_mismatches += r.mismatch() as usize;
        }
    }
    Ok(trial)
}
