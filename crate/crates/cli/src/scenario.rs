use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use kpp_core::corrector::{
    build_corrector, eigen_residual_profile, log_growth_check, write_residual_csv,
    ApproxEigenfunction, LogGrowth, ResidualSample,
};
use kpp_core::eigen::{convergence_table, write_convergence_csv, ConvergenceRow};
use kpp_core::fronttrack::{estimates_from_speeds, windowed_speeds, write_trace_csv, FrontTrace, WindowedSpeed};
use kpp_core::media::{classify_regime, default_probes, MediumDescriptor, PeriodicProfile, Regime};
use kpp_core::solver::run;
use kpp_core::theory::{j_of_k, threshold_bounds_thm1, w_infinity, SpeedBounds};
use serde_json::json;

use crate::config::{check_periods, ScenarioConfig};
use crate::error::CliError;
use crate::plot::{convergence_svg, trace_svg};
use crate::report::{evaluate_checks, Empirical, ResidualDiagnostics, SpeedReport};

/// A finished scenario: the report plus the series behind the CSV files.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub report: SpeedReport,
    pub trace: Option<FrontTrace>,
    pub speeds: Vec<WindowedSpeed>,
    pub residuals: Option<(Vec<ResidualSample>, LogGrowth)>,
    pub elapsed_seconds: f64,
}

fn regime_of(cfg: &ScenarioConfig) -> Option<Regime> {
    match &cfg.medium {
        MediumDescriptor::Composed { phase, .. } => Some(classify_regime(phase, &default_probes(phase))),
        MediumDescriptor::TwoValue { .. } => None,
    }
}

fn max_ratio(r: Vec<f64>) -> Option<f64> {
    r.into_iter().reduce(f64::max)
}

fn bounds_of(cfg: &ScenarioConfig, regime: Option<&Regime>) -> kpp_core::Result<Option<SpeedBounds>> {
    let theory = &cfg.theory;
    if !theory.bounds && !theory.w_infinity {
        return Ok(None);
    }
    let b = match &cfg.medium {
        MediumDescriptor::Composed { profile, .. } => {
            let mut b = if theory.w_infinity {
                SpeedBounds::for_profile(profile)?
            } else {
                SpeedBounds::from_extrema(profile.min(), profile.max())
            };
            if let (true, Some(Regime::Threshold { c }), false) = (theory.bounds, regime, profile.is_constant()) {
                let eps = theory
                    .threshold_eps
                    .unwrap_or(0.05 * (profile.max() - profile.min()));
                b = b.with_threshold(&threshold_bounds_thm1(profile, *c, eps)?);
            }
            b
        }
        MediumDescriptor::TwoValue { two_value: seq, .. } => {
            let b = SpeedBounds::from_extrema(seq.mu_minus(), seq.mu_plus());
            match (theory.bounds, max_ratio(seq.high_ratios()), max_ratio(seq.low_ratios())) {
                (true, Some(hi), Some(lo)) => b.with_two_value(seq.mu_plus(), seq.mu_minus(), hi, lo)?,
                _ => b,
            }
        }
    };
    Ok(Some(b))
}

/// Oscillating when the two-value bounds cross.
fn two_value_regime(bounds: Option<&SpeedBounds>) -> Regime {
    match bounds.and_then(|b| b.two_value_lower.zip(b.two_value_upper)) {
        Some((lower, upper)) if lower > upper => Regime::Oscillating,
        _ => Regime::Inconclusive,
    }
}

fn residuals_of(
    profile: &PeriodicProfile,
    phase: &kpp_core::media::PhaseMap,
    k: f64,
) -> kpp_core::Result<(ResidualDiagnostics, Vec<ResidualSample>, LogGrowth)> {
    let p = j_of_k(profile, k)?;
    let aef = ApproxEigenfunction::new(build_corrector(profile, p)?, phase.clone());
    let probes = default_probes(phase);
    let samples = eigen_residual_profile(&aef, &probes)?;
    let growth = log_growth_check(&aef, &probes)?;
    let diag = ResidualDiagnostics {
        p,
        k,
        samples: samples.iter().map(|s| (s.x, s.residual)).collect(),
        log_growth_decaying: growth.decaying,
    };
    Ok((diag, samples, growth))
}

/// Medium, theory, optional eigen sweep, simulation and tracking for one
/// resolved scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let num = |e| CliError::numeric(&cfg.scenario, e);
    let medium = cfg.medium().map_err(num)?;

    let mut regime = regime_of(cfg);
    let bounds = bounds_of(cfg, regime.as_ref()).map_err(num)?;
    if let MediumDescriptor::TwoValue { .. } = cfg.medium {
        regime = Some(two_value_regime(bounds.as_ref()));
    }

    let mut residuals = None;
    let mut diagnostics = None;
    if let MediumDescriptor::Composed { profile, phase, .. } = &cfg.medium {
        if cfg.theory.w_infinity && !profile.is_constant() {
            let (_, k) = w_infinity(profile).map_err(num)?;
            let (d, s, g) = residuals_of(profile, phase, k).map_err(num)?;
            diagnostics = Some(d);
            residuals = Some((s, g));
        }
    }

    let convergence = match cfg.medium_profile() {
        Some(profile) if !cfg.theory.w_l.is_empty() => {
            convergence_table(profile, &cfg.theory.w_l).map_err(num)?
        }
        _ => Vec::new(),
    };

    let (mut trace, mut speeds, mut empirical) = (None, Vec::new(), None);
    if let Some(solver) = &cfg.solver {
        let out = run(&medium, solver, &mut []).map_err(num)?;
        speeds = windowed_speeds(&out.trace, cfg.tracker.window).map_err(num)?;
        let est = estimates_from_speeds(&speeds, cfg.tracker.transient).map_err(num)?;
        empirical = Some(Empirical {
            w_low_est: est.w_low_est,
            w_up_est: est.w_up_est,
            gap: est.gap(),
            windows_used: est.windows_used,
            t_final: out.field.t(),
            steps: out.steps,
            early_stop: out.early_stop,
        });
        trace = Some(out.trace);
    }

    let checks = evaluate_checks(&cfg.checks, empirical.as_ref(), regime.as_ref(), &convergence);
    Ok(Artifacts {
        report: SpeedReport {
            scenario: cfg.scenario.clone(),
            config: cfg.clone(),
            regime,
            empirical,
            bounds,
            convergence,
            residuals: diagnostics,
            checks,
        },
        trace,
        speeds,
        residuals,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn create(dir: &Path, name: &str) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

impl Artifacts {
    /// Write `report.json`, `meta.json` and whichever of `trace.csv`,
    /// `plot.svg`, `residuals.csv`, `convergence.csv`, `convergence.svg`
    /// apply.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.report.to_json() + "\n")?;
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let meta = json!({
            "scenario": self.report.scenario,
            "version": env!("CARGO_PKG_VERSION"),
            "created_unix_seconds": created,
            "elapsed_seconds": self.elapsed_seconds,
        });
        fs::write(dir.join("meta.json"), format!("{meta:#}\n"))?;
        if let Some(trace) = &self.trace {
            let mut f = create(dir, "trace.csv")?;
            write_trace_csv(&mut f, trace, &self.speeds)?;
            f.flush()?;
            fs::write(
                dir.join("plot.svg"),
                trace_svg(&self.report.scenario, trace, &self.speeds, self.report.bounds.as_ref()),
            )?;
        }
        if let Some((samples, growth)) = &self.residuals {
            let mut f = create(dir, "residuals.csv")?;
            write_residual_csv(&mut f, samples, growth)?;
            f.flush()?;
        }
        if !self.report.convergence.is_empty() {
            let mut f = create(dir, "convergence.csv")?;
            write_convergence_csv(&mut f, &self.report.convergence)?;
            f.flush()?;
            fs::write(dir.join("convergence.svg"), convergence_svg(&self.report.convergence))?;
        }
        Ok(())
    }
}

/// `w_L` for each period against `w_inf`.
pub fn convergence_study(
    profile: &PeriodicProfile,
    periods: &[f64],
) -> Result<Vec<ConvergenceRow>, CliError> {
    check_periods(periods)?;
    convergence_table(profile, periods).map_err(|e| CliError::numeric("wL", e))
}
