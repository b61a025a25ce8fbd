use std::fs;
use std::path::Path;

use kpp_core::fronttrack::TrackerConfig;
use kpp_core::media::{Medium, MediumDescriptor};
use kpp_core::solver::SolverConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

fn yes() -> bool {
    true
}

/// Which theoretical quantities to compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryConfig {
    #[serde(default = "yes")]
    pub w_infinity: bool,
    /// Periods for the `w_L -> w_inf` study; empty to skip.
    #[serde(rename = "wL", default)]
    pub w_l: Vec<f64>,
    #[serde(default = "yes")]
    pub bounds: bool,
    /// Plateau tolerance for the threshold bounds; defaults to `(max - min) / 20`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_eps: Option<f64>,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        Self {
            w_infinity: true,
            w_l: Vec::new(),
            bounds: true,
            threshold_eps: None,
        }
    }
}

/// Expectations evaluated into the report; `--check` turns failures into
/// exit code 4.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    /// Both speed estimates within `speed_rel_tol` of this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_w_up: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_w_low: Option<f64>,
    /// Expected regime label, e.g. `"unique"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    /// `|w_L - w_inf|` strictly decreasing along the `wL` list.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub wl_gaps_decreasing: bool,
}

impl Checks {
    pub fn is_empty(&self) -> bool {
        *self == Checks::default()
    }
}

/// One scenario as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub medium: MediumDescriptor,
    /// Simulation settings; omit to run theory only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub tracker: TrackerConfig,
    #[serde(default)]
    pub theory: TheoryConfig,
    #[serde(default, skip_serializing_if = "Checks::is_empty")]
    pub checks: Checks,
}

/// `X_max` used to build the medium when there is no simulation.
const THEORY_ONLY_X_MAX: f64 = 1e6;

impl ScenarioConfig {
    /// Copy the tracker level into the solver and validate everything that
    /// can be checked without running.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let ctx = |e: kpp_core::Error| CliError::Config(format!("scenario `{}`: {e}", self.scenario));
        if self.scenario.trim().is_empty() {
            return Err(CliError::Config("scenario name must not be empty".into()));
        }
        let x_max = self.solver.as_ref().map_or(THEORY_ONLY_X_MAX, |s| s.x_max);
        let medium = Medium::from_descriptor(&self.medium, x_max).map_err(ctx)?;
        if let Some(solver) = self.solver.as_mut() {
            solver.front_level = self.tracker.level;
            solver.validate(&medium).map_err(ctx)?;
        }
        let t = &self.tracker;
        if !(t.window > 0.0 && (0.0..=0.9).contains(&t.transient)) {
            return Err(CliError::Config(format!(
                "scenario `{}`: tracker needs window > 0 and transient in [0, 0.9]",
                self.scenario
            )));
        }
        if !self.theory.w_l.is_empty() {
            if self.medium_profile().is_none() {
                return Err(CliError::Config(format!(
                    "scenario `{}`: `wL` needs a periodic profile",
                    self.scenario
                )));
            }
            check_periods(&self.theory.w_l)?;
        }
        Ok(self)
    }

    pub fn medium(&self) -> kpp_core::Result<Medium> {
        let x_max = self.solver.as_ref().map_or(THEORY_ONLY_X_MAX, |s| s.x_max);
        Medium::from_descriptor(&self.medium, x_max)
    }

    pub(crate) fn medium_profile(&self) -> Option<&kpp_core::media::PeriodicProfile> {
        match &self.medium {
            MediumDescriptor::Composed { profile, .. } => Some(profile),
            MediumDescriptor::TwoValue { .. } => None,
        }
    }
}

/// Positive and strictly increasing.
pub fn check_periods(periods: &[f64]) -> Result<(), CliError> {
    if periods.is_empty() || periods.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(CliError::Config("periods must be positive".into()));
    }
    if periods.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("periods must be strictly increasing".into()));
    }
    Ok(())
}

fn parse_one(value: Value, at: &str) -> Result<ScenarioConfig, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(format!("{at}: {inner}"))
        } else {
            CliError::Config(format!("{at}{path}: {inner}"))
        }
    })
}

/// Parse a single scenario object or an array of them, then resolve each.
pub fn parse_configs(text: &str) -> Result<Vec<ScenarioConfig>, CliError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    let configs = match value {
        Value::Array(items) => {
            if items.is_empty() {
                return Err(CliError::Config("empty scenario list".into()));
            }
            items
                .into_iter()
                .enumerate()
                .map(|(i, v)| parse_one(v, &format!("[{i}]")))
                .collect::<Result<Vec<_>, _>>()?
        }
        v => vec![parse_one(v, "config")?],
    };
    let mut names: Vec<&str> = configs.iter().map(|c| c.scenario.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Config(format!("duplicate scenario name `{}`", w[0])));
    }
    configs.into_iter().map(ScenarioConfig::resolve).collect()
}

pub fn load_configs(path: &Path) -> Result<Vec<ScenarioConfig>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_configs(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenario": "flat",
        "medium": {"profile": {"kind": "constant", "m": 1.0}, "phase": {"kind": "power", "alpha": 0.5}},
        "solver": {"X_max": 300, "n_cells": 3000, "dt": 0.02, "t_end": 50}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfgs = parse_configs(MINIMAL).unwrap();
        assert_eq!(cfgs.len(), 1);
        let c = &cfgs[0];
        assert_eq!(c.tracker, TrackerConfig::default());
        assert!(c.theory.w_infinity && c.theory.bounds && c.theory.w_l.is_empty());
        assert!(c.checks.is_empty());
    }

    #[test]
    fn field_level_messages() {
        let bad = MINIMAL.replace("\"dt\": 0.02", "\"dt\": \"fast\"");
        let msg = parse_configs(&bad).unwrap_err().to_string();
        assert!(msg.contains("solver.dt"), "{msg}");
        let bad = MINIMAL.replace("\"t_end\": 50", "\"t_end\": 50, \"speed\": 1");
        let msg = parse_configs(&bad).unwrap_err().to_string();
        assert!(msg.contains("unknown field `speed`"), "{msg}");
    }

    #[test]
    fn validation_runs_at_load() {
        let bad = MINIMAL.replace("\"dt\": 0.02", "\"dt\": 0.5");
        assert!(matches!(parse_configs(&bad), Err(CliError::Config(_))));
        let batch = format!("[{MINIMAL}, {MINIMAL}]");
        let msg = parse_configs(&batch).unwrap_err().to_string();
        assert!(msg.contains("duplicate"), "{msg}");
    }

    #[test]
    fn tracker_level_drives_the_solver() {
        let with_level = MINIMAL.replace(
            "\"t_end\": 50}",
            "\"t_end\": 50}, \"tracker\": {\"level\": 0.3}",
        );
        let c = &parse_configs(&with_level).unwrap()[0];
        assert_eq!(c.solver.as_ref().unwrap().front_level, 0.3);
    }

    #[test]
    fn periods_must_increase() {
        assert!(check_periods(&[5.0, 20.0, 80.0]).is_ok());
        assert!(check_periods(&[20.0, 5.0]).is_err());
        assert!(check_periods(&[]).is_err());
    }
}
