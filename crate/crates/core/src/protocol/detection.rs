//! Step 2: decoy-based checks that the shared pairs are the announced Bell states.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::network::{DisclosedLabel, NetworkState, PairSource, Side, Stage};
use super::{Backend, ProtocolError};
use crate::algebra::{correlation_expected, BellLabel, Bit, MeasBasis, Parity};
use crate::rng::RunRng;
use crate::statevector::{Register, Sampler};

/// One same-basis check of a decoy pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub link: usize,
    pub position: usize,
    /// Participant who selected the pair and measured first.
    pub checker: usize,
    pub basis: MeasBasis,
    pub announced: BellLabel,
    pub bit_left: Bit,
    pub bit_right: Bit,
}

impl DetectionRecord {
    pub fn mismatch(&self) -> bool {
        Parity::of(self.bit_left, self.bit_right) != correlation_expected(self.announced, self.basis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkCheck {
    pub link: usize,
    pub checks: usize,
    pub mismatches: usize,
}

impl LinkCheck {
    pub fn rate(&self) -> f64 {
        if self.checks == 0 {
            0.0
        } else {
            self.mismatches as f64 / self.checks as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub links: Vec<LinkCheck>,
    pub threshold: f64,
    pub verdict: Verdict,
    pub records: Vec<DetectionRecord>,
}

impl DetectionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn total_mismatches(&self) -> usize {
        self.links.iter().map(|l| l.mismatches).sum()
    }
}

/// Who picks decoys on `link`, and on which half they sit: the right-hand
/// participant on link 0, the left-hand one on the last link, and both
/// neighbours (half each, left first) on inner links.
fn checkers(link: usize, parties: usize, decoys: usize) -> Vec<(Side, usize)> {
    if link == 0 {
        vec![(Side::Right, decoys)]
    } else if link == parties {
        vec![(Side::Left, decoys)]
    } else {
        vec![(Side::Left, decoys / 2), (Side::Right, decoys / 2)]
    }
}

fn measure_pair(
    source: PairSource,
    basis: MeasBasis,
    first: Side,
    backend: Backend,
    sampler: &mut Sampler,
) -> Result<(Bit, Bit), ProtocolError> {
    let (a, b) = match (backend, source) {
        (Backend::Dense, _) => {
            let mut reg = Register::new();
            let (left, right) = match source {
                PairSource::Genuine(label) => reg.alloc_bell(label)?,
                PairSource::Fake { left, right } => {
                    let (_, l) = reg.alloc_bell(left)?;
                    let (r, _) = reg.alloc_bell(right)?;
                    (l, r)
                }
            };
            let (q1, q2) = if first == Side::Left { (left, right) } else { (right, left) };
            let a = reg.measure_in_basis(q1, basis, sampler)?;
            let b = reg.measure_in_basis(q2, basis, sampler)?;
            (a, b)
        }
        // Exact marginals: a genuine pair gives a uniform first bit and a
        // determined second one; each half of a fake pair is maximally mixed
        // and independent of the other.
        (Backend::PauliFrame, PairSource::Genuine(label)) => {
            let a = sampler.pick_bit(0.5)?;
            (a, a ^ correlation_expected(label, basis).as_bit())
        }
        (Backend::PauliFrame, PairSource::Fake { .. }) => (sampler.pick_bit(0.5)?, sampler.pick_bit(0.5)?),
    };
    Ok(if first == Side::Left { (a, b) } else { (b, a) })
}

/// Runs all decoy checks, marks the consumed pairs and returns the verdict.
///
/// For every selection the third party first discloses the claimed labels;
/// only then are bases drawn and bits published.
pub fn run_security_detection(net: &mut NetworkState, rng: &mut RunRng) -> Result<DetectionReport, ProtocolError> {
    net.expect_stage(Stage::Distributed)?;
    let cfg = net.config().clone();
    let width = cfg.pairs_per_link();
    let mut decoys = Vec::with_capacity(cfg.links());
    let mut links = Vec::with_capacity(cfg.links());
    let mut records = Vec::new();

    for link in 0..cfg.links() {
        let mut used: Vec<usize> = Vec::new();
        let mut check = LinkCheck { link, checks: 0, mismatches: 0 };
        for (side, count) in checkers(link, cfg.parties, cfg.decoys) {
            let checker = net.holder(link, side);
            let free: Vec<usize> = (0..width).filter(|p| !used.contains(p)).collect();
            let mut chosen: Vec<usize> =
                sample(&mut rng.choices, free.len(), count).into_iter().map(|i| free[i]).collect();
            chosen.sort_unstable();

            let disclosed: Vec<DisclosedLabel> = chosen
                .iter()
                .map(|&position| DisclosedLabel { link, position, label: net.tp_view().link_labels[link][position] })
                .collect();
            for party in [net.holder(link, Side::Left), net.holder(link, Side::Right)] {
                if party != 0 {
                    net.party_view_mut(party).disclosed_labels.extend(disclosed.iter().copied());
                }
            }

            for d in &disclosed {
                let basis = if rng.choices.gen::<bool>() { MeasBasis::Diagonal } else { MeasBasis::Computational };
                let source = net.physical()[link][d.position];
                let (bit_left, bit_right) = measure_pair(source, basis, side, cfg.backend, &mut rng.outcomes)?;
                let record = DetectionRecord {
                    link,
                    position: d.position,
                    checker,
                    basis,
                    announced: d.label,
                    bit_left,
                    bit_right,
                };
                check.checks += 1;
                check.mismatches += record.mismatch() as usize;
                for party in [net.holder(link, Side::Left), net.holder(link, Side::Right)] {
                    if party != 0 {
                        net.party_view_mut(party).published_checks.push(record);
                    }
                }
                records.push(record);
            }
            used.extend(chosen);
        }
        used.sort_unstable();
        decoys.push(used);
        links.push(check);
    }

    let verdict = if links.iter().any(|l| l.rate() > cfg.detection_threshold) { Verdict::Abort } else { Verdict::Pass };
    net.set_decoys(decoys);
    net.stage = Stage::Checked { passed: verdict == Verdict::Pass };
    Ok(DetectionReport { links, threshold: cfg.detection_threshold, verdict, records })
}
