//! Pointwise residual checks `N[w] = w_t - w_xx - mu w (1 - w)` for the
//! explicit sub- and supersolutions of the spreading-speed bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Grid;
use crate::corrector::{build_corrector, ApproxEigenfunction, Corrector};
use crate::error::{param, Error, Result};
use crate::media::{PeriodicProfile, PhaseMap};
use crate::numerics::ls_slope;
use crate::theory::{j_of_k, limiting_speed, min_radius_subsolution};

/// Outcome of the compactly supported subsolution check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionReport {
    /// `max N[w]` over the support; must be `<= 1e-10`.
    pub max_residual: f64,
    /// Largest `kappa` for which the check still passes.
    pub kappa_star: f64,
    /// `mu- - c^2/4 - (pi / 2R)^2`.
    pub margin: f64,
    pub points: usize,
    pub passes: bool,
}

/// `w = kappa e^{-c z / 2} cos(pi z / (2R))`, `z = x - ct - X_max / 2`, on
/// `|z| < R` at `t = 0`, against `mu-`.
pub fn verify_subsolution(
    mu_minus: f64,
    c: f64,
    radius: f64,
    kappa: f64,
    grid: &Grid,
) -> Result<SubsolutionReport> {
    let r_min = min_radius_subsolution(mu_minus, c)?;
    if !(radius > r_min) {
        return Err(param(format!(
            "radius {radius} must exceed the minimal radius {r_min}"
        )));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(param(format!("kappa must be positive, got {kappa}")));
    }
    let center = 0.5 * grid.x_max();
    let zs: Vec<f64> = grid
        .points()
        .map(|x| x - center)
        .filter(|z| z.abs() < radius)
        .collect();
    if zs.is_empty() {
        return Err(Error::Coverage("no grid point inside the support".into()));
    }
    let k = PI / (2.0 * radius);
    let residual = |kappa: f64, z: f64| {
        let e = (-0.5 * c * z).exp();
        let (cos, sin) = ((k * z).cos(), (k * z).sin());
        let v = e * cos;
        let dv = e * (-0.5 * c * cos - k * sin);
        let ddv = e * ((0.25 * c * c - k * k) * cos + c * k * sin);
        let w = kappa * v;
        // w_t = -c kappa v'
        -c * kappa * dv - kappa * ddv - mu_minus * w * (1.0 - w)
    };
    let worst = |kappa: f64| zs.iter().map(|&z| residual(kappa, z)).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-10;
    let max_residual = worst(kappa);

    let (mut lo, mut hi) = (0.0, 1.0);
    while worst(hi) <= tol && hi < 1e12 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if worst(mid) <= tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SubsolutionReport {
        max_residual,
        kappa_star: lo,
        margin: mu_minus - 0.25 * c * c - k * k,
        points: zs.len(),
        passes: max_residual <= tol,
    })
}

/// Outcome of the exponential supersolution check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSupersolutionReport {
    /// `min N[v] / v` where `v < 1`.
    pub min_normalized_residual: f64,
    /// Slope of `N[v] / v` against `v`; equals `mu+`.
    pub slope: f64,
    /// `max |N[v]|` on the plateau `v = 1`.
    pub plateau_residual: f64,
    pub points: usize,
    pub passes: bool,
}

/// `v = min(1, kappa e^{-sqrt(mu+) (x - 2 sqrt(mu+) t)})` at `t = 0`.
pub fn verify_supersolution_exp(mu_plus: f64, kappa: f64, grid: &Grid) -> Result<ExpSupersolutionReport> {
    if !(mu_plus > 0.0 && kappa > 0.0) {
        return Err(param("mu_plus and kappa must be positive"));
    }
    let lambda = mu_plus.sqrt();
    let speed = 2.0 * mu_plus.sqrt();
    let (mut vs, mut normalized) = (Vec::new(), Vec::new());
    let mut plateau: f64 = 0.0;
    for x in grid.points() {
        let v = kappa * (-lambda * x).exp();
        if v >= 1.0 {
            let v = 1.0;
            plateau = plateau.max((mu_plus * v * (1.0 - v)).abs());
            continue;
        }
        if v < 1e-200 {
            continue;
        }
        let v_t = lambda * speed * v;
        let v_xx = lambda * lambda * v;
        let n = v_t - v_xx - mu_plus * v * (1.0 - v);
        vs.push(v);
        normalized.push(n / v);
    }
    if vs.len() < 2 {
        return Err(Error::Coverage("fewer than two grid points with v < 1".into()));
    }
    let min = normalized.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ExpSupersolutionReport {
        min_normalized_residual: min,
        slope: ls_slope(&vs, &normalized),
        plateau_residual: plateau,
        points: vs.len(),
        passes: min >= -1e-12,
    })
}

/// Outcome of the `min(1, phi_p e^{-p (x - h - c1 t)})` supersolution check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UbarReport {
    pub p: f64,
    pub w_infinity: f64,
    /// `c1 p - k`, the room left for the eigenfunction residual.
    pub slack: f64,
    /// Start of the region where `|r| <= slack` at every later grid point.
    pub coverage_start: f64,
    pub min_residual: f64,
    pub min_normalized_residual: f64,
    pub points: usize,
    pub excluded: usize,
    pub passes: bool,
}

/// Check the supersolution built from the approximate eigenfunction with
/// `p = j(k)` at `t = 0`. Constant profiles use `phi_p = 1`.
pub fn verify_supersolution_ubar(
    profile: &PeriodicProfile,
    phase: &PhaseMap,
    k: f64,
    c1: f64,
    shift: f64,
    grid: &Grid,
) -> Result<UbarReport> {
    let m = profile.max();
    if !(k >= m) {
        return Err(param(format!("level k = {k} must be at least max mu0 = {m}")));
    }
    let w_inf = limiting_speed(profile)?.speed;
    if !(c1 > w_inf) {
        return Err(param(format!("c1 = {c1} must exceed w_inf = {w_inf}")));
    }
    let (p, corrector) = if profile.is_constant() {
        let p = (k - m).sqrt();
        (p, Corrector::homogeneous(m, p)?)
    } else {
        let p = j_of_k(profile, k)?;
        (p, build_corrector(profile, p)?)
    };
    let slack = c1 * p - corrector.h();
    if !(slack > 0.0) {
        return Err(param(format!(
            "c1 = {c1} must exceed k / j(k) = {}",
            corrector.h() / p
        )));
    }
    let aef = ApproxEigenfunction::new(corrector, phase.clone());

    struct Sample {
        x: f64,
        r: Option<f64>,
    }
    let samples: Vec<Sample> = grid
        .points()
        .filter(|&x| x >= phase.x_left())
        .map(|x| Ok(Sample { x, r: aef.residual(x)? }))
        .collect::<Result<_>>()?;
    let excluded = samples.iter().filter(|s| s.r.is_none()).count();
    let mut start = None;
    for s in samples.iter().rev() {
        match s.r {
            Some(r) if r.abs() > slack => break,
            _ => start = Some(s.x),
        }
    }
    let Some(coverage_start) = start else {
        return Err(Error::Coverage(format!(
            "eigenfunction residual exceeds {slack} up to X_max"
        )));
    };

    let (mut min_n, mut min_norm, mut points) = (f64::INFINITY, f64::INFINITY, 0usize);
    for s in samples.iter().filter(|s| s.x >= coverage_start && s.r.is_some()) {
        let x = s.x;
        let log_u = aef.log_value(x)? - p * (x - shift);
        if log_u >= 0.0 {
            continue;
        }
        let u = log_u.exp();
        let d = aef.log_derivative(x)? - p;
        let dd = aef.log_second_derivative(x)?;
        let mu = profile.evaluate(phase.value(x));
        // u_t / u = p c1, u_xx / u = (psi' - p)^2 + psi''
        let normalized = p * c1 - (d * d + dd) - mu * (1.0 - u);
        min_norm = min_norm.min(normalized);
        min_n = min_n.min(normalized * u);
        points += 1;
    }
    if points == 0 {
        return Err(Error::Coverage("no covered grid point with u < 1".into()));
    }
    Ok(UbarReport {
        p,
        w_infinity: w_inf,
        slack,
        coverage_start,
        min_residual: min_n,
        min_normalized_residual: min_norm,
        points,
        excluded,
        passes: min_n >= -1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::w_infinity;

    #[test]
    fn subsolution_example() {
        let grid = Grid::new(100.0, 2000).unwrap();
        let rep = verify_subsolution(1.0, 1.8, 5.0, 1e-3, &grid).unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!((rep.margin - 0.0913).abs() < 1e-4);
        assert!(rep.kappa_star > 1e-3);
        let bad = verify_subsolution(1.0, 1.8, 5.0, 1.0, &grid).unwrap();
        assert!(!bad.passes && bad.max_residual > 0.0);
        assert!(verify_subsolution(1.0, 1.8, 3.6, 1e-3, &grid).is_err());
        assert!(verify_subsolution(1.0, 2.0, 5.0, 1e-3, &grid).is_err());
    }

    #[test]
    fn exponential_supersolution_identity() {
        let grid = Grid::new(20.0, 2000).unwrap();
        let rep = verify_supersolution_exp(4.0, 1.0, &grid).unwrap();
        assert!(rep.passes);
        assert!((rep.slope - 4.0).abs() <= 1e-8);
        let shifted = verify_supersolution_exp(4.0, 1e3, &grid).unwrap();
        assert_eq!(shifted.plateau_residual, 0.0);
    }

    #[test]
    fn ubar_on_power_phase() {
        let prof = PeriodicProfile::cosine(2.0, 1.0).unwrap();
        let (w, k) = w_infinity(&prof).unwrap();
        let grid = Grid::new(2000.0, 20000).unwrap();
        let rep = verify_supersolution_ubar(&prof, &PhaseMap::power(0.5).unwrap(), k, 1.1 * w, 0.0, &grid)
            .unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!(rep.points > 1000);
    }

    #[test]
    fn ubar_homogeneous() {
        let prof = PeriodicProfile::constant(1.0).unwrap();
        let grid = Grid::new(100.0, 1000).unwrap();
        let rep = verify_supersolution_ubar(&prof, &PhaseMap::power(0.5).unwrap(), 2.0, 2.2, 0.0, &grid)
            .unwrap();
        assert!(rep.passes);
        assert!(rep.min_normalized_residual >= 0.2 - 1e-9);
        assert!(verify_supersolution_ubar(&prof, &PhaseMap::power(0.5).unwrap(), 2.0, 1.9, 0.0, &grid).is_err());
    }
}
