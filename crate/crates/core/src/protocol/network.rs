use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chain::Chain;
use super::detection::DetectionRecord;
use super::{ProtocolConfig, ProtocolError};
use crate::algebra::{BellLabel, PreparedState};
use crate::rng::RunRng;

/// Which half of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// What physically occupies one pair position on a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    Genuine(BellLabel),
    /// Each half is entangled with a separate qubit kept by the third party:
    /// `left` labels the pair (partner, left half) and `right` labels
    /// (right half, partner).
    Fake {
        left: BellLabel,
        right: BellLabel,
    },
}

impl PairSource {
    pub const FAKE_PHI_PLUS: PairSource = PairSource::Fake { left: BellLabel::PHI_PLUS, right: BellLabel::PHI_PLUS };

    pub fn is_fake(&self) -> bool {
        matches!(self, PairSource::Fake { .. })
    }
}

/// Information held only by the third party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpView {
    /// Claimed initial label of every pair, `[link][position]`.
    pub link_labels: Vec<Vec<BellLabel>>,
    pub reference: Vec<PreparedState>,
}

/// A decoy label disclosed by the third party on request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisclosedLabel {
    pub link: usize,
    pub position: usize,
    pub label: BellLabel,
}

/// What one participant has seen: only announced data.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PartyView {
    pub party: usize,
    pub disclosed_labels: Vec<DisclosedLabel>,
    pub published_checks: Vec<DetectionRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Distributed,
    Checked { passed: bool },
    Encoded,
    Measured,
}

/// Role-scoped world state of one run.
#[derive(Debug, Clone)]
pub struct NetworkState {
    config: ProtocolConfig,
    physical: Vec<Vec<PairSource>>,
    tp: TpView,
    views: Vec<PartyView>,
    decoys: Vec<Vec<usize>>,
    pub(crate) stage: Stage,
    pub(crate) chains: Vec<Chain>,
}

/// Step 1: `(n+1)(L+R)` uniformly random Bell pairs and `L` uniformly random
/// reference states, all known to the third party only.
pub fn distribute_entanglement(cfg: &ProtocolConfig, rng: &mut RunRng) -> Result<NetworkState, ProtocolError> {
    cfg.validate()?;
    let labels = (0..cfg.links())
        .map(|_| (0..cfg.pairs_per_link()).map(|_| BellLabel::from_index(rng.choices.gen_range(0..4))).collect())
        .collect();
    let reference = (0..cfg.payload_bits).map(|_| PreparedState::from_index(rng.choices.gen_range(0..4))).collect();
    NetworkState::from_parts(cfg.clone(), labels, reference)
}

impl NetworkState {
    /// Builds an honest distribution with the given labels (`[link][position]`)
    /// and reference states.
    pub fn from_parts(
        config: ProtocolConfig,
        link_labels: Vec<Vec<BellLabel>>,
        reference: Vec<PreparedState>,
    ) -> Result<Self, ProtocolError> {
        config.validate()?;
        if link_labels.len() != config.links() || link_labels.iter().any(|l| l.len() != config.pairs_per_link()) {
            return Err(ProtocolError::InvalidConfig(format!(
                "expected {} links of {} pairs",
                config.links(),
                config.pairs_per_link()
            )));
        }
        if reference.len() != config.payload_bits {
            return Err(ProtocolError::InvalidConfig(format!(
                "expected {} reference states, got {}",
                config.payload_bits,
                reference.len()
            )));
        }
        let physical = link_labels.iter().map(|l| l.iter().map(|&x| PairSource::Genuine(x)).collect()).collect();
        let views = (1..=config.parties).map(|party| PartyView { party, ..PartyView::default() }).collect();
        Ok(NetworkState {
            physical,
            tp: TpView { link_labels, reference },
            views,
            decoys: vec![Vec::new(); config.links()],
            stage: Stage::Distributed,
            chains: Vec::new(),
            config,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn tp_view(&self) -> &TpView {
        &self.tp
    }

    /// View of participant `party` (counted from 1).
    pub fn party_view(&self, party: usize) -> &PartyView {
        &self.views[party - 1]
    }

    pub fn party_views(&self) -> &[PartyView] {
        &self.views
    }

    pub(crate) fn party_view_mut(&mut self, party: usize) -> &mut PartyView {
        &mut self.views[party - 1]
    }

    pub fn physical(&self) -> &[Vec<PairSource>] {
        &self.physical
    }

    pub fn total_pairs(&self) -> usize {
        self.physical.iter().map(Vec::len).sum()
    }

    /// Overwrites what physically sits at a pair position without changing the
    /// label the third party will claim for it. Only valid before detection.
    pub fn replace_pair(&mut self, link: usize, position: usize, source: PairSource) -> Result<(), ProtocolError> {
        self.expect_stage(Stage::Distributed)?;
        let slot = self
            .physical
            .get_mut(link)
            .and_then(|l| l.get_mut(position))
            .ok_or_else(|| ProtocolError::InvalidConfig(format!("no pair at link {link} position {position}")))?;
        *slot = source;
        Ok(())
    }

    /// Replaces a pair by a genuine one and records its label as the claim.
    pub fn set_genuine(&mut self, link: usize, position: usize, label: BellLabel) -> Result<(), ProtocolError> {
        self.replace_pair(link, position, PairSource::Genuine(label))?;
        self.tp.link_labels[link][position] = label;
        Ok(())
    }

    /// Participant holding the given half of `link`; 0 is the third party.
    pub fn holder(&self, link: usize, side: Side) -> usize {
        match side {
            Side::Left => link,
            Side::Right if link == self.config.parties => 0,
            Side::Right => link + 1,
        }
    }

    /// Positions consumed by detection, sorted, per link.
    pub fn decoy_positions(&self) -> &[Vec<usize>] {
        &self.decoys
    }

    pub(crate) fn set_decoys(&mut self, decoys: Vec<Vec<usize>>) {
        self.decoys = decoys;
    }

    /// Discards the given positions without checking them and marks detection
    /// as passed. Test and attack-analysis hook only.
    pub(crate) fn force_detection_pass(&mut self, mut decoys: Vec<Vec<usize>>) {
        decoys.iter_mut().for_each(|d| d.sort_unstable());
        self.decoys = decoys;
        self.stage = Stage::Checked { passed: true };
    }

    /// Positions left after detection, `[link][chain]`: the j-th remaining pair
    /// of every link belongs to chain j.
    pub fn chain_positions(&self) -> Vec<Vec<usize>> {
        self.decoys
            .iter()
            .map(|used| (0..self.config.pairs_per_link()).filter(|p| used.binary_search(p).is_err()).collect())
            .collect()
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn chain_mut(&mut self, j: usize) -> Option<&mut Chain> {
        self.chains.get_mut(j)
    }

    pub(crate) fn expect_stage(&self, expected: Stage) -> Result<(), ProtocolError> {
        if self.stage == expected {
            Ok(())
        } else {
            Err(ProtocolError::WrongStage { expected, found: self.stage })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::chi_square_uniform;

    #[test]
    fn distribution_counts() {
        let cfg = ProtocolConfig::new(2, 1, 2);
        let net = distribute_entanglement(&cfg, &mut RunRng::from_seed(1)).unwrap();
        assert_eq!(net.total_pairs(), 9);
        assert_eq!(net.tp_view().reference.len(), 1);
        assert!(net.party_views().iter().all(|v| v.disclosed_labels.is_empty() && v.published_checks.is_empty()));
        assert_eq!(net.stage(), Stage::Distributed);
    }

    #[test]
    fn labels_are_uniform() {
        let cfg = ProtocolConfig::new(4, 16, 4).with_backend(super::super::Backend::PauliFrame);
        let mut counts = [0u64; 4];
        let mut refs = [0u64; 4];
        for seed in 0..100 {
            let net = distribute_entanglement(&cfg, &mut RunRng::from_seed(seed)).unwrap();
            for l in net.tp_view().link_labels.iter().flatten() {
                counts[l.index()] += 1;
            }
            for s in &net.tp_view().reference {
                refs[*s as usize] += 1;
            }
        }
        assert_eq!(counts.iter().sum::<u64>(), 10_000);
        assert!(chi_square_uniform(&counts) > 0.001);
        assert!(chi_square_uniform(&refs) > 0.001);
    }

    #[test]
    fn holders() {
        let cfg = ProtocolConfig::new(3, 1, 2);
        let net = distribute_entanglement(&cfg, &mut RunRng::from_seed(0)).unwrap();
        assert_eq!(net.holder(0, Side::Left), 0);
        assert_eq!(net.holder(0, Side::Right), 1);
        assert_eq!(net.holder(2, Side::Right), 3);
        assert_eq!(net.holder(3, Side::Left), 3);
        assert_eq!(net.holder(3, Side::Right), 0);
    }

    #[test]
    fn from_parts_rejects_bad_shapes() {
        let cfg = ProtocolConfig::new(2, 1, 2);
        let labels = vec![vec![BellLabel::PHI_PLUS; 3]; 2];
        assert!(NetworkState::from_parts(cfg.clone(), labels, vec![PreparedState::Plus]).is_err());
        let labels = vec![vec![BellLabel::PHI_PLUS; 3]; 3];
        assert!(NetworkState::from_parts(cfg, labels, vec![]).is_err());
    }
}
