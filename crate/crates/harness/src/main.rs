use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qsum_core::adversary::{CollusionStrategy, FakePlacement};
use qsum_core::Backend;
use qsum_harness::efficiency::{efficiency_table, simulator_chain_memories};
use qsum_harness::rate::{estimate_link_rate, RateParams};
use qsum_harness::{build_report, emit_report, run_scenario, HarnessError, OutputFormat, ScenarioKind, ScenarioSpec};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(name = "qsum", version, about = "Quantum summation over Bell-state chains: experiments and calculators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of seeded trials and write a report.
    Run(RunArgs),
    /// Print the qubit-efficiency comparison table.
    Efficiency {
        #[arg(long)]
        parties: usize,
    },
    /// Estimate the entangled-link rate of one fiber link.
    Rate {
        #[arg(long)]
        distance: f64,
        /// Fiber loss in dB/km.
        #[arg(long)]
        loss: f64,
        #[arg(long)]
        system_eff: f64,
        /// Attempts per second.
        #[arg(long)]
        rep_rate: f64,
    },
}

fn enum_arg<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

/// Flags override the JSON config, which overrides the defaults.
#[derive(Args)]
struct RunArgs {
    /// JSON file with ScenarioSpec fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    parties: Option<usize>,
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    decoys: Option<usize>,
    /// honest | tp-swap | fake-bell | collude
    #[arg(long, value_parser = enum_arg::<ScenarioKind>)]
    scenario: Option<ScenarioKind>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// dense | pauli
    #[arg(long, value_parser = enum_arg::<Backend>)]
    backend: Option<Backend>,
    /// json | csv
    #[arg(long, value_parser = enum_arg::<OutputFormat>)]
    format: Option<OutputFormat>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the third party's labels in the sample transcript.
    #[arg(long)]
    reveal_secrets: bool,
    /// Per-link mismatch rate above which detection aborts.
    #[arg(long)]
    threshold: Option<f64>,
    /// tp-swap: attacked participant.
    #[arg(long)]
    target: Option<usize>,
    /// tp-swap: front | back
    #[arg(long, value_parser = enum_arg::<FakePlacement>)]
    placement: Option<FakePlacement>,
    /// fake-bell: link carrying the fake pairs.
    #[arg(long)]
    fake_link: Option<usize>,
    /// fake-bell: number of fake pairs.
    #[arg(long)]
    fake_count: Option<usize>,
    /// collude: honest participants p < q.
    #[arg(long)]
    honest_p: Option<usize>,
    #[arg(long)]
    honest_q: Option<usize>,
    /// collude: withhold-and-measure | swap-and-compare
    #[arg(long, value_parser = enum_arg::<CollusionStrategy>)]
    strategy: Option<CollusionStrategy>,
}

impl RunArgs {
    fn into_spec(self) -> Result<ScenarioSpec, HarnessError> {
        let mut s = match &self.config {
            Some(path) => ScenarioSpec::from_json_file(path)?,
            None => ScenarioSpec::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { s.$field = v; }
            )*};
        }
        set!(parties, bits, decoys, scenario, trials, seed, backend, format, threshold, placement, strategy);
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() { s.$field = self.$field; }
            )*};
        }
        set_opt!(out, target, fake_link, fake_count, honest_p, honest_q);
        s.reveal_secrets |= self.reveal_secrets;
        Ok(s)
    }
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let spec = args.into_spec()?;
    let started = Instant::now();
    let stats = run_scenario(&spec)?;
    let report = build_report(&spec, stats)?;
    match &spec.out {
        Some(path) => emit_report(&report, spec.format, BufWriter::new(File::create(path)?))?,
        None => emit_report(&report, spec.format, io::stdout().lock())?,
    }
    eprintln!("{} trials in {:.3} s", report.stats.trials, started.elapsed().as_secs_f64());
    Ok(())
}

fn efficiency(parties: usize) -> Result<(), HarnessError> {
    let table = efficiency_table(parties)?;
    let simulated = simulator_chain_memories(parties)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{:<24} {:<32} {:>8} {:>7} {:>10}", "protocol", "resource", "formula", "qubits", "efficiency")?;
    for e in &table {
        writeln!(out, "{:<24} {:<32} {:>8} {:>7} {:>10.6}", e.protocol, e.resource, e.formula, e.qubits, e.efficiency)?;
    }
    let ours = table.last().expect("table ends with this protocol");
    let status = if ours.qubits == simulated { "ok" } else { "MISMATCH" };
    writeln!(out, "simulator memories per chain: {simulated} ({status})")?;
    if ours.qubits != simulated {
        return Err(HarnessError::InvalidConfig(format!("formula {} vs simulator {simulated}", ours.qubits)));
    }
    Ok(())
}

fn rate(p: RateParams) -> Result<(), HarnessError> {
    let r = estimate_link_rate(p)?;
    let mut out = io::stdout().lock();
    writeln!(out, "transmissivity: {}", r.transmissivity)?;
    writeln!(out, "success probability: {}", r.success_probability)?;
    writeln!(out, "links per second: {}", r.links_per_second)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Efficiency { parties } => efficiency(parties),
        Command::Rate { distance, loss, system_eff, rep_rate } => rate(RateParams {
            distance_km: distance,
            loss_db_per_km: loss,
            system_efficiency: system_eff,
            repetition_rate_hz: rep_rate,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
