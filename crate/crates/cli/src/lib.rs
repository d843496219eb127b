//! Command-line runner: config parsing, presets, report emission and the
//! acceptance suite behind `tdhf verify`.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;
pub mod verify;

pub use config::RunConfig;
pub use error::CliError;
pub use scenarios::{find_scenario, scenarios, Audit, Scenario, ScenarioOutput, Table};
