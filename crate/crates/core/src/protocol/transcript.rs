use serde::{Deserialize, Serialize};

use super::chain::SumResult;
use super::detection::DetectionRecord;
use super::network::TpView;
use super::{Backend, ProtocolConfig};
use crate::algebra::{BellLabel, Bit};

/// A message sent during a run, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Announcement {
    /// Claimed labels of the pairs one checker selected as decoys.
    DecoyLabels { link: usize, checker: usize, positions: Vec<usize>, labels: Vec<BellLabel> },
    /// Bell-measurement result sent to the third party. Not public.
    BsmResult { party: usize, chain: usize, label: BellLabel, public: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    /// `bsm_results[i][j]`: result of party i (0 = third party) on chain j.
    pub bsm_results: Vec<Vec<Option<BellLabel>>>,
    pub detection_records: Vec<DetectionRecord>,
    pub announcements: Vec<Announcement>,
}

impl Transcript {
    pub fn new(parties: usize, chains: usize) -> Self {
        Transcript {
            bsm_results: vec![vec![None; chains]; parties + 1],
            detection_records: vec![],
            announcements: vec![],
        }
    }

    pub fn result(&self, party: usize, chain: usize) -> Option<BellLabel> {
        self.bsm_results.get(party).and_then(|r| r.get(chain)).copied().flatten()
    }

    pub fn is_complete(&self) -> bool {
        self.bsm_results.iter().flatten().all(Option::is_some)
    }

    /// Results announced by participants (not the third party) on chain `j`.
    pub fn announced_on_chain(&self, j: usize) -> Vec<Option<BellLabel>> {
        self.bsm_results.iter().skip(1).map(|r| r[j]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub parties: usize,
    pub bits: usize,
    pub decoys: usize,
    pub backend: Backend,
    pub threshold: f64,
    pub seed: u64,
}

impl From<&ProtocolConfig> for ConfigEcho {
    fn from(c: &ProtocolConfig) -> Self {
        ConfigEcho {
            parties: c.parties,
            bits: c.payload_bits,
            decoys: c.decoys,
            backend: c.backend,
            threshold: c.detection_threshold,
            seed: c.seed,
        }
    }
}

/// Serialized shape of one run.
///
/// ```json
/// {
///   "config": {"parties": 2, "bits": 1, "decoys": 2, "backend": "dense", "threshold": 0.0, "seed": 7},
///   "aborted": false,
///   "bsm_results": [[[0, 0]], [[1, 0]], [[0, 1]]],
///   "detection_records": [{"link": 0, "position": 1, "checker": 1, "basis": "diagonal",
///                          "announced": [1, 1], "bit_left": 0, "bit_right": 1}],
///   "sum_bits": [1],
///   "secrets": null
/// }
/// ```
///
/// `bsm_results[i][j]` is party i's `[x, y]` on chain j (`null` if skipped).
/// `secrets` carries the third party's labels and reference states and is
/// only filled when explicitly revealed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptDocument {
    pub config: ConfigEcho,
    pub aborted: bool,
    pub bsm_results: Vec<Vec<Option<BellLabel>>>,
    pub detection_records: Vec<DetectionRecord>,
    pub sum_bits: Option<Vec<Bit>>,
    pub secrets: Option<TpView>,
}

impl TranscriptDocument {
    pub fn new(
        cfg: &ProtocolConfig,
        transcript: &Transcript,
        sum: Option<&SumResult>,
        tp: &TpView,
        reveal_secrets: bool,
    ) -> Self {
        TranscriptDocument {
            config: cfg.into(),
            aborted: sum.is_none(),
            bsm_results: transcript.bsm_results.clone(),
            detection_records: transcript.detection_records.clone(),
            sum_bits: sum.map(|s| s.sum_bits.clone()),
            secrets: reveal_secrets.then(|| tp.clone()),
        }
    }
}
