//! Serialized experiment reports.
//!
//! JSON reports have the shape
//!
//! ```json
//! {
//!   "spec": { ...ScenarioSpec without "out"... },
//!   "seed": 0,
//!   "stats": { ...TrialStats... },
//!   "comparisons": [{"metric": "escape_rate", "empirical": 0.2513, "analytic": 0.25,
//!                    "successes": 2513, "total": 10000}],
//!   "sample_transcript": null
//! }
//! ```
//!
//! CSV reports have one row per metric under [`CSV_HEADER`]; `empirical` and
//! `analytic` are left empty when undefined.

use std::io::Write;

use qsum_core::protocol::{run_protocol, TranscriptDocument};
use qsum_core::rng::trial_seed;
use qsum_core::RunRng;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::runner::{random_inputs, TrialStats};
use crate::scenario::{OutputFormat, Resolved, ScenarioSpec};

pub const CSV_HEADER: [&str; 8] =
    ["scenario", "seed", "trials", "metric", "empirical", "analytic", "successes", "total"];

/// One empirical rate next to its analytic reference, if there is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric: String,
    pub empirical: Option<f64>,
    pub analytic: Option<f64>,
    pub successes: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: ScenarioSpec,
    pub seed: u64,
    pub stats: TrialStats,
    pub comparisons: Vec<Comparison>,
    /// Trial 0 of an honest batch, with the third party's secrets only if
    /// `reveal_secrets` is set.
    pub sample_transcript: Option<TranscriptDocument>,
}

fn comparisons(stats: &TrialStats, analytic: &[(&'static str, f64)]) -> Vec<Comparison> {
    let counted = [
        ("abort_rate", stats.aborts, stats.trials),
        ("sum_correct_rate", stats.sum_correct, stats.sum_checked),
        ("guess_accuracy", stats.guess_correct, stats.guesses),
        ("escape_rate", stats.escape_events, stats.trials),
        ("fake_mismatch_rate", stats.fake_mismatches, stats.fake_checks),
    ];
    let mut rows: Vec<Comparison> = counted
        .into_iter()
        .map(|(metric, k, n)| Comparison {
            metric: metric.into(),
            empirical: (n > 0).then(|| k as f64 / n as f64),
            analytic: analytic.iter().find(|(m, _)| *m == metric).map(|&(_, v)| v),
            successes: k,
            total: n,
        })
        .collect();
    for (link, (&m, &c)) in stats.link_mismatches.iter().zip(&stats.link_checks).enumerate() {
        rows.push(Comparison {
            metric: format!("link_{link}_mismatch_rate"),
            empirical: (c > 0).then(|| m as f64 / c as f64),
            analytic: None,
            successes: m,
            total: c,
        });
    }
    rows
}

pub fn build_report(spec: &ScenarioSpec, stats: TrialStats) -> Result<Report, HarnessError> {
    let scenario = spec.resolve()?;
    let sample_transcript = match scenario {
        Resolved::Honest => {
            let cfg = spec.protocol_config();
            let mut rng = RunRng::from_seed(trial_seed(spec.seed, 0));
            let inputs = random_inputs(&cfg, &mut rng);
            Some(run_protocol(&cfg, &inputs, &mut rng)?.document(spec.reveal_secrets))
        }
        _ => None,
    };
    Ok(Report {
        spec: ScenarioSpec { out: None, ..spec.clone() },
        seed: spec.seed,
        comparisons: comparisons(&stats, &scenario.analytic(spec)),
        stats,
        sample_transcript,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn emit_report<W: Write>(report: &Report, format: OutputFormat, mut out: W) -> Result<(), HarnessError> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let scenario = serde_json::to_value(report.spec.scenario)?;
            let scenario = scenario.as_str().unwrap_or_default().to_owned();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for c in &report.comparisons {
                w.write_record([
                    scenario.clone(),
                    report.seed.to_string(),
                    report.stats.trials.to_string(),
                    c.metric.clone(),
                    cell(c.empirical),
                    cell(c.analytic),
                    c.successes.to_string(),
                    c.total.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::run_scenario;
    use crate::scenario::ScenarioKind;

    fn small(kind: ScenarioKind) -> ScenarioSpec {
        ScenarioSpec { scenario: kind, bits: 4, decoys: 4, trials: 50, seed: 3, ..ScenarioSpec::default() }
    }

    #[test]
    fn json_round_trip() {
        let spec = small(ScenarioKind::Honest);
        let report = build_report(&spec, run_scenario(&spec).unwrap()).unwrap();
        let mut buf = Vec::new();
        emit_report(&report, OutputFormat::Json, &mut buf).unwrap();
        let back: Report = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, report);
        assert!(back.sample_transcript.unwrap().secrets.is_none());
    }

    #[test]
    fn csv_header_and_rows() {
        let spec = small(ScenarioKind::FakeBell);
        let report = build_report(&spec, run_scenario(&spec).unwrap()).unwrap();
        let mut buf = Vec::new();
        emit_report(&report, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.count(), 5 + 5);
        assert!(text.contains("fake-bell,3,50,fake_mismatch_rate,"));
    }

    #[test]
    fn analytic_column_is_the_formula() {
        use qsum_core::adversary::{analytic_escape_probability, ChainPosition};
        let spec = small(ScenarioKind::TpSwap);
        let report = build_report(&spec, run_scenario(&spec).unwrap()).unwrap();
        let row = report.comparisons.iter().find(|c| c.metric == "escape_rate").unwrap();
        assert_eq!(row.analytic, Some(analytic_escape_probability(4, 4, ChainPosition::Mid).unwrap()));
    }

    #[test]
    fn secrets_only_on_request() {
        let spec = ScenarioSpec { reveal_secrets: true, ..small(ScenarioKind::Honest) };
        let report = build_report(&spec, TrialStats::default()).unwrap();
        assert!(report.sample_transcript.unwrap().secrets.is_some());
    }
}
