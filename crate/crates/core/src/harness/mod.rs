//! Scenario files, seeded instance generation and fuzz campaigns.

mod config;
mod evaluate;
mod generate;
mod report;
mod rng;
mod scenario;
mod suite;

pub use config::{DimRanges, Dims, TrialConfig};
pub use evaluate::{evaluate, evaluate_as, Evaluation, BISECTION_AGREEMENT, IDENTITY_TOL};
pub use generate::{generate_instance, needs_spanning, Generated, MAX_ATTEMPTS, MAX_CONDITION};
pub use report::{DiscrepancyRow, Report, TrialStatus, TrialVerdict, REPORT_FORMAT_VERSION};
pub use rng::TrialRng;
pub use scenario::{load_scenario, save_scenario, Scenario, TheoremKind, FORMAT_VERSION};
pub use suite::run_theorem_suite;
