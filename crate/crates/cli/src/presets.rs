use kpp_core::fronttrack::TrackerConfig;
use kpp_core::media::{geometric_sequences, MediumDescriptor, PeriodicProfile, PhaseMap};
use kpp_core::solver::SolverConfig;

use crate::config::{Checks, ScenarioConfig, TheoryConfig};
use crate::error::CliError;

const PRESETS: [(&str, &str); 6] = [
    ("homogeneous", "mu = 1 everywhere; both speeds should be 2"),
    ("example1-log-power", "2 + cos(2 pi sqrt(ln x)), a phase with oscillating speeds"),
    ("example2-power", "2 + cos(2 pi sqrt(x)), a phase with a unique speed w_inf"),
    ("example3-x-over-log", "2 + cos(2 pi x / ln x)"),
    ("twovalue-K8", "mu in {4, 1} on geometric intervals, ratios K1 = K2 = 8 (also twovalue-K<K1>[-<K2>])"),
    ("convergence-wL", "w_L -> w_inf for 2 + cos(2 pi y), theory only"),
];

/// Window long enough to average over a local period of the slow media at
/// `X_max = 4000`.
const SLOW_WINDOW: f64 = 80.0;

pub fn list_presets() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

pub fn describe_preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|p| p.0 == name).map(|p| p.1)
}

fn cosine() -> PeriodicProfile {
    PeriodicProfile::cosine(2.0, 1.0).expect("valid profile")
}

/// `X_max = 4000`, `h = 0.1`, `dt = 0.05`, `t_end = 1400`.
fn long_run() -> SolverConfig {
    SolverConfig::new(4000.0, 40_000, 0.05, 1400.0)
}

fn slow_tracker() -> TrackerConfig {
    TrackerConfig {
        window: SLOW_WINDOW,
        ..TrackerConfig::default()
    }
}

fn composed(name: &str, phase: PhaseMap, checks: Checks) -> ScenarioConfig {
    ScenarioConfig {
        scenario: name.into(),
        medium: MediumDescriptor::Composed {
            profile: cosine(),
            phase,
            left: None,
        },
        solver: Some(long_run()),
        tracker: slow_tracker(),
        theory: TheoryConfig::default(),
        checks,
    }
}

fn two_value(name: &str, k1: f64, k2: f64) -> Result<ScenarioConfig, CliError> {
    let solver = long_run();
    let seq = geometric_sequences(4.0, 1.0, k1, k2, 20.0, solver.x_max)
        .map_err(|e| CliError::Config(format!("preset `{name}`: {e}")))?;
    Ok(ScenarioConfig {
        scenario: name.into(),
        medium: MediumDescriptor::TwoValue {
            two_value: seq,
            left: None,
        },
        solver: Some(solver),
        tracker: slow_tracker(),
        theory: TheoryConfig::default(),
        checks: Checks {
            min_gap: Some(1.0),
            min_w_up: Some(3.4),
            max_w_low: Some(2.5),
            regime: Some("oscillating".into()),
            ..Checks::default()
        },
    })
}

/// `twovalue-K8` or `twovalue-K4-16`.
fn parse_ratios(suffix: &str) -> Option<(f64, f64)> {
    let mut parts = suffix.split('-');
    let k1: f64 = parts.next()?.parse().ok()?;
    let k2: f64 = match parts.next() {
        Some(s) => s.parse().ok()?,
        None => k1,
    };
    if parts.next().is_some() {
        return None;
    }
    Some((k1, k2))
}

/// Config for a named preset.
pub fn preset(name: &str) -> Result<ScenarioConfig, CliError> {
    let fixed = |v: kpp_core::Result<PhaseMap>| v.expect("valid phase");
    let cfg = match name {
        "homogeneous" => ScenarioConfig {
            scenario: name.into(),
            medium: MediumDescriptor::Composed {
                profile: PeriodicProfile::constant(1.0).expect("valid profile"),
                phase: fixed(PhaseMap::power(0.5)),
                left: None,
            },
            solver: Some(SolverConfig::new(500.0, 5000, 0.02, 200.0)),
            tracker: TrackerConfig::default(),
            theory: TheoryConfig::default(),
            checks: Checks {
                speed_target: Some(2.0),
                speed_rel_tol: Some(0.03),
                max_gap: Some(0.15),
                ..Checks::default()
            },
        },
        "example1-log-power" => composed(
            name,
            fixed(PhaseMap::log_power(0.5, 1.0)),
            Checks {
                regime: Some("oscillating".into()),
                ..Checks::default()
            },
        ),
        "example2-power" => composed(
            name,
            fixed(PhaseMap::power(0.5)),
            Checks {
                regime: Some("unique".into()),
                max_gap: Some(0.3),
                ..Checks::default()
            },
        ),
        "example3-x-over-log" => composed(
            name,
            fixed(PhaseMap::x_over_log(1.0)),
            Checks {
                regime: Some("unique".into()),
                ..Checks::default()
            },
        ),
        "convergence-wL" => ScenarioConfig {
            scenario: name.into(),
            medium: MediumDescriptor::Composed {
                profile: cosine(),
                phase: fixed(PhaseMap::power(0.5)),
                left: None,
            },
            solver: None,
            tracker: TrackerConfig::default(),
            theory: TheoryConfig {
                w_l: vec![5.0, 20.0, 80.0],
                ..TheoryConfig::default()
            },
            checks: Checks {
                wl_gaps_decreasing: true,
                ..Checks::default()
            },
        },
        _ => match name.strip_prefix("twovalue-K").and_then(parse_ratios) {
            Some((k1, k2)) => two_value(name, k1, k2)?,
            None => {
                return Err(CliError::Config(format!(
                    "unknown preset `{name}`; known: {}",
                    list_presets().join(", ")
                )))
            }
        },
    };
    cfg.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_configs;

    #[test]
    fn required_presets_exist() {
        let names = list_presets();
        for n in [
            "homogeneous",
            "example1-log-power",
            "example2-power",
            "example3-x-over-log",
            "twovalue-K8",
            "convergence-wL",
        ] {
            assert!(names.contains(&n), "{n}");
            assert!(describe_preset(n).is_some());
        }
    }

    #[test]
    fn presets_round_trip_through_json() {
        for n in list_presets() {
            let cfg = preset(n).unwrap();
            let json = serde_json::to_string(&cfg).unwrap();
            let back = parse_configs(&json).unwrap();
            assert_eq!(back, vec![cfg], "{n}");
        }
    }

    #[test]
    fn two_value_family() {
        let cfg = preset("twovalue-K4-16").unwrap();
        match cfg.medium {
            MediumDescriptor::TwoValue { two_value, .. } => {
                assert_eq!(two_value.high_ratios(), vec![4.0; two_value.high_ratios().len()]);
                assert!(two_value.low_ratios().iter().all(|&r| r == 16.0));
            }
            _ => panic!("expected a two-value medium"),
        }
        assert!(preset("twovalue-K").is_err());
        assert!(preset("twovalue-K0.5").is_err());
        assert!(matches!(preset("nope"), Err(CliError::Config(_))));
    }
}
