//! Scenario runner: JSON configs in, reports, CSV series and SVG plots out.

pub mod config;
pub mod error;
pub mod plot;
pub mod presets;
pub mod report;
pub mod scenario;

pub use config::{load_configs, Checks, ScenarioConfig, TheoryConfig};
pub use error::CliError;
pub use presets::{list_presets, preset};
pub use report::SpeedReport;
pub use scenario::{convergence_study, run_scenario, Artifacts};
