//! Scenario runner behind the `qmeas` binary. Each scenario computes a
//! named table of values and checks it against expected numbers.

pub mod params;
pub mod report;
pub mod scenarios;

pub use report::ScenarioResult;
pub use scenarios::{find, list_json, list_text, run_scenario, verify, Scenario, DEFAULT_SEED, SCENARIOS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] qmeas_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}
