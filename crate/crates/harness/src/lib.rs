//! Batch experiments over `qsum-core`: seeded Monte-Carlo scenarios, report
//! generation, and the efficiency and link-rate calculators behind the `qsum`
//! binary.

pub mod efficiency;
pub mod error;
pub mod rate;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::HarnessError;
pub use report::{build_report, emit_report, Report};
pub use runner::{run_scenario, TrialStats};
pub use scenario::{OutputFormat, ScenarioKind, ScenarioSpec};
