//! Seeded Monte-Carlo batches.
//!
//! Trial `k` runs from `trial_seed(seed, k)`. Inputs are drawn from the
//! adversary stream before anything else, so a trial can be replayed on its
//! own. Trials run on the rayon pool and are merged with plain counter sums,
//! which makes the totals independent of scheduling.

use qsum_core::adversary::{
    collusion_attack, fake_bell_detection_experiment, tp_swap_attack, AttackOutcome, DetectionMode,
};
use qsum_core::protocol::run_protocol;
use qsum_core::rng::trial_seed;
use qsum_core::{Bit, ProtocolConfig, RunRng, SecretInputs};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::scenario::{Resolved, ScenarioSpec};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub aborts: u64,
    /// Runs whose sum bits were compared with the true XOR, and how many matched.
    pub sum_checked: u64,
    pub sum_correct: u64,
    pub guesses: u64,
    pub guess_correct: u64,
    /// Attack runs in which no decoy check touched a fake link.
    pub escape_events: u64,
    pub fake_checks: u64,
    pub fake_mismatches: u64,
    /// Decoy checks and mismatches per link.
    pub link_checks: Vec<u64>,
    pub link_mismatches: Vec<u64>,
}

fn rate(k: u64, n: u64) -> Option<f64> {
    (n > 0).then(|| k as f64 / n as f64)
}

impl TrialStats {
    fn empty(links: usize) -> Self {
        TrialStats { link_checks: vec![0; links], link_mismatches: vec![0; links], ..Self::default() }
    }

    pub fn merge(mut self, other: TrialStats) -> TrialStats {
        self.trials += other.trials;
        self.aborts += other.aborts;
        self.sum_checked += other.sum_checked;
        self.sum_correct += other.sum_correct;
        self.guesses += other.guesses;
        self.guess_correct += other.guess_correct;
        self.escape_events += other.escape_events;
        self.fake_checks += other.fake_checks;
        self.fake_mismatches += other.fake_mismatches;
        for (a, b) in self.link_checks.iter_mut().zip(other.link_checks) {
            *a += b;
        }
        for (a, b) in self.link_mismatches.iter_mut().zip(other.link_mismatches) {
            *a += b;
        }
        self
    }

    pub fn abort_rate(&self) -> Option<f64> {
        rate(self.aborts, self.trials)
    }

    pub fn sum_correct_rate(&self) -> Option<f64> {
        rate(self.sum_correct, self.sum_checked)
    }

    pub fn guess_accuracy(&self) -> Option<f64> {
        rate(self.guess_correct, self.guesses)
    }

    pub fn escape_rate(&self) -> Option<f64> {
        rate(self.escape_events, self.trials)
    }

    pub fn fake_mismatch_rate(&self) -> Option<f64> {
        rate(self.fake_mismatches, self.fake_checks)
    }

    /// Named rates, `None` where nothing was counted.
    pub fn rates(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("abort_rate", self.abort_rate()),
            ("sum_correct_rate", self.sum_correct_rate()),
            ("guess_accuracy", self.guess_accuracy()),
            ("escape_rate", self.escape_rate()),
            ("fake_mismatch_rate", self.fake_mismatch_rate()),
        ]
    }
}

pub fn random_inputs(cfg: &ProtocolConfig, rng: &mut RunRng) -> SecretInputs {
    SecretInputs::from_fn(cfg.parties, cfg.payload_bits, |_, _| Bit::new(rng.adversary.gen()))
}

fn record_attack(stats: &mut TrialStats, out: AttackOutcome) {
    stats.aborts += out.detected as u64;
    stats.escape_events += out.escaped as u64;
    if let Some(ok) = out.guess_correct {
        stats.guesses += 1;
        stats.guess_correct += ok as u64;
    }
    if let Some(ok) = out.remaining_sums_correct {
        stats.sum_checked += 1;
        stats.sum_correct += ok as u64;
    }
}

/// One trial of a resolved scenario.
pub fn run_trial(cfg: &ProtocolConfig, scenario: Resolved, seed: u64) -> Result<TrialStats, HarnessError> {
    let mut rng = RunRng::from_seed(seed);
    let inputs = random_inputs(cfg, &mut rng);
    let mut stats = TrialStats::empty(cfg.links());
    stats.trials = 1;
    match scenario {
        Resolved::Honest => {
            let run = run_protocol(cfg, &inputs, &mut rng)?;
            for link in &run.detection.links {
                stats.link_checks[link.link] += link.checks as u64;
                stats.link_mismatches[link.link] += link.mismatches as u64;
            }
            match run.outcome.sum() {
                Some(sum) => {
                    stats.sum_checked = 1;
                    stats.sum_correct = (sum.sum_bits == inputs.xor_sum()) as u64;
                }
                None => stats.aborts = 1,
            }
        }
        Resolved::TpSwap { target, placement } => {
            let out = tp_swap_attack(cfg, target, placement, &inputs, &mut rng, DetectionMode::Enabled)?;
            record_attack(&mut stats, out);
        }
        Resolved::FakeBell { link, count } => {
            let t = fake_bell_detection_experiment(cfg, link, count, &mut rng)?;
            stats.aborts = t.aborted as u64;
            stats.fake_checks = t.fake_checks as u64;
            stats.fake_mismatches = t.fake_mismatches as u64;
            stats.link_checks[link] = cfg.decoys as u64;
            stats.link_mismatches[link] = (t.fake_mismatches + t.genuine_mismatches) as u64;
        }
        Resolved::Collude { honest, strategy } => {
            let out = collusion_attack(cfg, honest, strategy, &inputs, &mut rng)?;
            record_attack(&mut stats, out);
        }
    }
    Ok(stats)
}

/// Runs `spec.trials` independent trials and sums their counters.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<TrialStats, HarnessError> {
    let scenario = spec.resolve()?;
    let cfg = spec.protocol_config();
    let links = cfg.links();
    (0..spec.trials)
        .into_par_iter()
        .map(|k| run_trial(&cfg, scenario, trial_seed(spec.seed, k)))
        .try_reduce(|| TrialStats::empty(links), |a, b| Ok(a.merge(b)))
}
