//! Periodic principal eigenvalues of `L_p phi = phi'' - 2p phi' + (p^2 + mu) phi`
//! and the finite-period speeds `w_L = min_p lambda_p(mu0(. / L)) / p`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::media::{PeriodicProfile, ProfileKind};
use crate::numerics::log_space;
use crate::numerics::optimize::scan_then_golden;
use crate::numerics::tridiag::solve_cyclic;
use crate::theory::limiting_speed;

const MAX_ITERATIONS: usize = 100_000;
const MIN_POINTS: usize = 16;

/// Centered finite-difference discretization of `L_p` on `N` points of `[0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOperator {
    p: f64,
    period: f64,
    mu: Vec<f64>,
    h: f64,
}

impl PeriodicOperator {
    /// `mu[i]` is the rate at `i L / N`.
    pub fn new(p: f64, period: f64, mu: Vec<f64>) -> Result<Self> {
        let n = mu.len();
        if n < MIN_POINTS {
            return Err(param(format!("need at least {MIN_POINTS} grid points, got {n}")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(param(format!("period must be positive, got {period}")));
        }
        if !p.is_finite() || mu.iter().any(|m| !m.is_finite()) {
            return Err(param("non-finite operator coefficient"));
        }
        let h = period / n as f64;
        if h * (2.0 * p.abs() + 1.0) > 1.0 + 1e-12 {
            return Err(Error::Discretization(format!(
                "step {h} too coarse for p = {p}: need h <= {}",
                1.0 / (2.0 * p.abs() + 1.0)
            )));
        }
        Ok(Self { p, period, mu, h })
    }

    /// Rates `mu0(x / L)` sampled on `n` points; two-value profiles are
    /// averaged over `[x - h, x + h]`.
    pub fn from_profile(profile: &PeriodicProfile, p: f64, period: f64, n: usize) -> Result<Self> {
        Self::new(p, period, sample_rates(profile, period, n))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `(lower, diagonal, upper)` coefficients of row `i`.
    fn coefficients(&self) -> (f64, f64, f64) {
        let h2 = self.h * self.h;
        (1.0 / h2 + self.p / self.h, -2.0 / h2 + self.p * self.p, 1.0 / h2 - self.p / self.h)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.mu.len();
        let (lo, d, up) = self.coefficients();
        (0..n)
            .map(|i| {
                let prev = x[(i + n - 1) % n];
                let next = x[(i + 1) % n];
                lo * prev + (d + self.mu[i]) * x[i] + up * next
            })
            .collect()
    }

    /// Solve `(s I - A) z = rhs`.
    fn solve_shifted(&self, s: f64, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.mu.len();
        let (lo, d, up) = self.coefficients();
        let lower = vec![-lo; n - 1];
        let upper = vec![-up; n - 1];
        let diag: Vec<f64> = self.mu.iter().map(|m| s - d - m).collect();
        solve_cyclic(&lower, &diag, &upper, -lo, -up, rhs)
    }
}

fn sample_rates(profile: &PeriodicProfile, period: f64, n: usize) -> Vec<f64> {
    let h = period / n as f64;
    (0..n)
        .map(|i| {
            let x = i as f64 * h;
            match profile.kind() {
                ProfileKind::TwoValue { .. } => {
                    profile.window_average((x - h) / period, (x + h) / period)
                }
                _ => profile.evaluate(x / period),
            }
        })
        .collect()
}

/// Principal eigenvalue and its positive eigenvector (maximum 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Principal eigenvalue by shifted inverse iteration.
///
/// The shift is kept above the Collatz-Wielandt bracket
/// `min (Ax)_i / x_i <= lambda <= max (Ax)_i / x_i`. Iteration stops when the
/// bracket or the increment of the inverse-iteration estimate
/// `s - <x, x> / <x, z>` falls below `1e-11 max(1, |lambda|)`.
pub fn principal_eigenvalue(op: &PeriodicOperator) -> Result<Eigenpair> {
    let n = op.len();
    let mut x = vec![1.0; n];
    let mut previous: Option<f64> = None;
    for iteration in 0..=MAX_ITERATIONS {
        let y = op.apply(&x);
        let (lo, hi) = y
            .iter()
            .zip(&x)
            .map(|(a, b)| a / b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r), h.max(r)));
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Discretization("eigenvector lost positivity".into()));
        }
        let tol = |lambda: f64| 1e-11 * lambda.abs().max(1.0);
        let lambda = 0.5 * (lo + hi);
        if hi - lo < tol(lambda) {
            return Ok(Eigenpair {
                lambda,
                vector: x,
                iterations: iteration,
            });
        }
        let shift = hi + (hi - lo).max(1e-6 * hi.abs().max(1.0));
        let z = op
            .solve_shifted(shift, &x)
            .ok_or_else(|| Error::Discretization("singular shifted operator".into()))?;
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(top > 0.0) || z.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Discretization(
                "negative eigenvector entry; grid too coarse".into(),
            ));
        }
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let xz: f64 = x.iter().zip(&z).map(|(a, b)| a * b).sum();
        let estimate = shift - xx / xz;
        x = z.into_iter().map(|v| v / top).collect();
        if previous.is_some_and(|p| (estimate - p).abs() < tol(estimate)) {
            return Ok(Eigenpair {
                lambda: estimate,
                vector: x,
                iterations: iteration + 1,
            });
        }
        previous = Some(estimate);
    }
    Err(Error::Convergence {
        what: "principal eigenvalue".into(),
        iterations: MAX_ITERATIONS,
    })
}

/// Upper end of the `p` scan, `4 sqrt(max mu0)`.
pub fn p_max(profile: &PeriodicProfile) -> f64 {
    4.0 * profile.max().sqrt()
}

/// Grid size used by [`w_l`]: `h <= min(L / 64, 1 / (2 p_max + 1), 1 / 64)`.
pub fn default_points(profile: &PeriodicProfile, period: f64) -> usize {
    let h = (period / 64.0)
        .min(1.0 / (2.0 * p_max(profile) + 1.0))
        .min(1.0 / 64.0);
    ((period / h).ceil() as usize).max(MIN_POINTS)
}

/// Finite-period speed and its minimizing `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinitePeriodSpeed {
    pub period: f64,
    pub speed: f64,
    pub p: f64,
    pub points: usize,
}

/// `w_L = min_p lambda_p(mu0(. / L)) / p` on the default grid.
pub fn w_l(profile: &PeriodicProfile, period: f64) -> Result<FinitePeriodSpeed> {
    w_l_on_grid(profile, period, default_points(profile, period))
}

/// `w_L` with `n` grid points; `p` is scanned at 16 log-spaced values of
/// `[0.05, 4 sqrt(max mu0)]` and refined by golden section.
pub fn w_l_on_grid(profile: &PeriodicProfile, period: f64, n: usize) -> Result<FinitePeriodSpeed> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(param(format!("period must be positive, got {period}")));
    }
    let mu = sample_rates(profile, period, n);
    let mut failure = None;
    let mut ratio = |p: f64| match PeriodicOperator::new(p, period, mu.clone())
        .and_then(|op| principal_eigenvalue(&op))
    {
        Ok(e) => e.lambda / p,
        Err(e) => {
            failure.get_or_insert(e);
            f64::INFINITY
        }
    };
    let grid = log_space(0.05, p_max(profile), 16);
    let best = scan_then_golden(&mut ratio, &grid, 1e-7);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(FinitePeriodSpeed {
        period,
        speed: best.value,
        p: best.x,
        points: n,
    })
}

/// One line of a `w_L -> w_inf` convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "L")]
    pub period: f64,
    pub w_l: f64,
    pub w_infinity: f64,
    pub gap: f64,
}

pub fn convergence_table(profile: &PeriodicProfile, periods: &[f64]) -> Result<Vec<ConvergenceRow>> {
    let w_inf = limiting_speed(profile)?.speed;
    periods
        .iter()
        .map(|&l| {
            let w = w_l(profile, l)?.speed;
            Ok(ConvergenceRow {
                period: l,
                w_l: w,
                w_infinity: w_inf,
                gap: (w - w_inf).abs(),
            })
        })
        .collect()
}

pub fn write_convergence_csv<W: Write>(mut out: W, rows: &[ConvergenceRow]) -> io::Result<()> {
    writeln!(out, "L,w_L,w_infinity,gap")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.period, r.w_l, r.w_infinity, r.gap)?;
    }
    Ok(())
}
