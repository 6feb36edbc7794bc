//! Experiment specifications.

use std::path::{Path, PathBuf};

use qsum_core::adversary::{ChainPosition, CollusionStrategy, FakePlacement};
use qsum_core::{Backend, ProtocolConfig};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    #[default]
    Honest,
    TpSwap,
    FakeBell,
    Collude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// One batch experiment. Field names match the CLI flags and the JSON config
/// file; attack parameters left unset get defaults that suit `parties`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub parties: usize,
    pub bits: usize,
    pub decoys: usize,
    pub scenario: ScenarioKind,
    pub trials: u64,
    pub seed: u64,
    pub backend: Backend,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub reveal_secrets: bool,
    pub threshold: f64,
    /// Attacked participant for `tp-swap`.
    pub target: Option<usize>,
    pub placement: FakePlacement,
    /// Link and number of planted pairs for `fake-bell`.
    pub fake_link: Option<usize>,
    pub fake_count: Option<usize>,
    /// Honest pair for `collude`.
    pub honest_p: Option<usize>,
    pub honest_q: Option<usize>,
    pub strategy: CollusionStrategy,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            parties: 4,
            bits: 8,
            decoys: 8,
            scenario: ScenarioKind::Honest,
            trials: 10_000,
            seed: 0,
            backend: Backend::Dense,
            format: OutputFormat::Json,
            out: None,
            reveal_secrets: false,
            threshold: 0.0,
            target: None,
            placement: FakePlacement::Front,
            fake_link: None,
            fake_count: None,
            honest_p: None,
            honest_q: None,
            strategy: CollusionStrategy::WithholdAndMeasure,
        }
    }
}

/// Attack parameters with defaults filled in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolved {
    Honest,
    TpSwap { target: usize, placement: FakePlacement },
    FakeBell { link: usize, count: usize },
    Collude { honest: (usize, usize), strategy: CollusionStrategy },
}

impl ScenarioSpec {
    pub fn from_json_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig::new(self.parties, self.bits, self.decoys)
            .with_backend(self.backend)
            .with_threshold(self.threshold)
            .with_seed(self.seed)
    }

    /// Checks the spec and fills in attack defaults: a mid-chain target for
    /// `tp-swap`, a fully faked inner link for `fake-bell`, and the honest
    /// pair `(2, 4)` (or `(1, 3)`) for `collude`.
    pub fn resolve(&self) -> Result<Resolved, HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::InvalidConfig("trials must be at least 1".into()));
        }
        let cfg = self.protocol_config();
        cfg.validate()?;
        let n = self.parties;
        let needs_dense = |what: &str| {
            if self.backend == Backend::Dense {
                Ok(())
            } else {
                Err(HarnessError::InvalidConfig(format!("{what} needs the dense backend")))
            }
        };
        let resolved = match self.scenario {
            ScenarioKind::Honest => Resolved::Honest,
            ScenarioKind::TpSwap => {
                needs_dense("tp-swap")?;
                let target = self.target.unwrap_or(if n >= 3 { 2 } else { 1 });
                if target == 0 || target > n {
                    return Err(HarnessError::InvalidConfig(format!("target {target} not in 1..={n}")));
                }
                Resolved::TpSwap { target, placement: self.placement }
            }
            ScenarioKind::FakeBell => {
                needs_dense("fake-bell")?;
                let link = self.fake_link.unwrap_or(n / 2);
                let count = self.fake_count.unwrap_or(cfg.pairs_per_link());
                if link >= cfg.links() || count > cfg.pairs_per_link() {
                    return Err(HarnessError::InvalidConfig(format!(
                        "fake pairs must fit: link {link} of {}, {count} of {} positions",
                        cfg.links(),
                        cfg.pairs_per_link()
                    )));
                }
                Resolved::FakeBell { link, count }
            }
            ScenarioKind::Collude => {
                needs_dense("collude")?;
                if n < 4 {
                    return Err(HarnessError::InvalidConfig(format!("collude needs at least 4 parties, got {n}")));
                }
                let default = match self.strategy {
                    CollusionStrategy::SwapAndCompare => (2, 4),
                    CollusionStrategy::WithholdAndMeasure => (1, 3),
                };
                let honest = (self.honest_p.unwrap_or(default.0), self.honest_q.unwrap_or(default.1));
                check_honest_pair(n, honest, self.strategy)?;
                Resolved::Collude { honest, strategy: self.strategy }
            }
        };
        Ok(resolved)
    }
}

fn check_honest_pair(n: usize, (p, q): (usize, usize), strategy: CollusionStrategy) -> Result<(), HarnessError> {
    let last = if q == p + 1 { q } else { p };
    let ok = 1 <= p && p < q && q <= n && last < n && (strategy != CollusionStrategy::SwapAndCompare || p >= 2);
    if ok {
        Ok(())
    } else {
        Err(HarnessError::InvalidConfig(format!("honest pair ({p}, {q}) unsupported for {strategy:?} with n = {n}")))
    }
}

impl Resolved {
    /// Reference value the empirical rate of this scenario is compared with.
    pub fn analytic(&self, spec: &ScenarioSpec) -> Vec<(&'static str, f64)> {
        use qsum_core::adversary::analytic_escape_probability;
        match *self {
            Resolved::Honest => vec![("sum_correct_rate", 1.0), ("abort_rate", 0.0)],
            Resolved::TpSwap { target, .. } => {
                let pos = ChainPosition::of(target, spec.parties);
                let p = analytic_escape_probability(spec.bits, spec.decoys, pos).expect("validated spec");
                vec![("escape_rate", p), ("guess_accuracy", 1.0)]
            }
            Resolved::FakeBell { .. } => vec![("fake_mismatch_rate", 0.5)],
            Resolved::Collude { .. } => vec![("guess_accuracy", 0.5)],
        }
    }
}
