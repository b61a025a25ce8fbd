use kpp_core::eigen::ConvergenceRow;
use kpp_core::media::Regime;
use kpp_core::theory::SpeedBounds;
use serde::{Deserialize, Serialize};

use crate::config::{Checks, ScenarioConfig};

/// Speed estimates from the simulated front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub w_low_est: f64,
    pub w_up_est: f64,
    pub gap: f64,
    pub windows_used: usize,
    pub t_final: f64,
    pub steps: usize,
    pub early_stop: bool,
}

/// Residual of the approximate eigenfunction at slope `p = j(k*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualDiagnostics {
    pub p: f64,
    pub k: f64,
    /// `(x, r)` with `r` absent at excluded probes.
    pub samples: Vec<(f64, Option<f64>)>,
    pub log_growth_decaying: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Everything a scenario produced except the series written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub regime: Option<Regime>,
    pub empirical: Option<Empirical>,
    pub bounds: Option<SpeedBounds>,
    pub convergence: Vec<ConvergenceRow>,
    pub residuals: Option<ResidualDiagnostics>,
    pub checks: Vec<CheckResult>,
}

impl SpeedReport {
    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn missing(name: &str, what: &str) -> CheckResult {
    CheckResult {
        name: name.into(),
        pass: false,
        detail: format!("no {what} available"),
    }
}

fn bound(name: &str, value: Option<f64>, limit: f64, upper: bool) -> CheckResult {
    match value {
        Some(v) => CheckResult {
            name: name.into(),
            pass: if upper { v <= limit } else { v >= limit },
            detail: format!("{v:.6} {} {limit}", if upper { "<=" } else { ">=" }),
        },
        None => missing(name, "speed estimate"),
    }
}

pub(crate) fn evaluate_checks(
    checks: &Checks,
    empirical: Option<&Empirical>,
    regime: Option<&Regime>,
    convergence: &[ConvergenceRow],
) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if let Some(target) = checks.speed_target {
        let tol = checks.speed_rel_tol.unwrap_or(0.03);
        out.push(match empirical {
            Some(e) => {
                let ok = |w: f64| (w - target).abs() <= tol * target.abs();
                CheckResult {
                    name: "speed_target".into(),
                    pass: ok(e.w_low_est) && ok(e.w_up_est),
                    detail: format!(
                        "w_low {:.6}, w_up {:.6} vs {target} +- {}%",
                        e.w_low_est,
                        e.w_up_est,
                        100.0 * tol
                    ),
                }
            }
            None => missing("speed_target", "speed estimate"),
        });
    }
    let gap = empirical.map(|e| e.gap);
    if let Some(limit) = checks.max_gap {
        out.push(bound("max_gap", gap, limit, true));
    }
    if let Some(limit) = checks.min_gap {
        out.push(bound("min_gap", gap, limit, false));
    }
    if let Some(limit) = checks.min_w_up {
        out.push(bound("min_w_up", empirical.map(|e| e.w_up_est), limit, false));
    }
    if let Some(limit) = checks.max_w_low {
        out.push(bound("max_w_low", empirical.map(|e| e.w_low_est), limit, true));
    }
    if let Some(expected) = &checks.regime {
        out.push(match regime {
            Some(r) => CheckResult {
                name: "regime".into(),
                pass: r.label() == expected,
                detail: format!("{} (expected {expected})", r.label()),
            },
            None => missing("regime", "regime classification"),
        });
    }
    if checks.wl_gaps_decreasing {
        out.push(if convergence.len() < 2 {
            missing("wl_gaps_decreasing", "convergence table")
        } else {
            let gaps: Vec<String> = convergence.iter().map(|r| format!("{:.3e}", r.gap)).collect();
            CheckResult {
                name: "wl_gaps_decreasing".into(),
                pass: convergence.windows(2).all(|w| w[1].gap < w[0].gap),
                detail: gaps.join(" > "),
            }
        });
    }
    out
}
