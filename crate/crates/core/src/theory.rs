//! Closed-form and quadrature-defined speed quantities: `j`, `H`, `w_inf`,
//! the homogeneous bounds, the two-value bounds at finite ratio `K`, and the
//! bounds obtained when `1/(x phi')` tends to a constant.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::media::PeriodicProfile;
use crate::numerics::log_space;
use crate::numerics::optimize::{bisect, scan_then_golden};

/// `j(k) = int_0^1 sqrt(k - mu0(y)) dy` for `k >= max mu0`.
pub fn j_of_k(profile: &PeriodicProfile, k: f64) -> Result<f64> {
    let m = profile.max();
    if !(k >= m) {
        return Err(Error::Domain(format!("j(k) needs k >= {m}, got {k}")));
    }
    Ok(profile.integrate(0.0, 1.0, |y| (k - profile.evaluate(y)).max(0.0).sqrt()))
}

/// `H(p) = j^{-1}(|p|)` when `|p| >= j(M)`, otherwise `M`.
pub fn h_of_p(profile: &PeriodicProfile, p: f64) -> f64 {
    let m = profile.max();
    let q = p.abs();
    let j = |k: f64| j_of_k(profile, k).expect("k >= M inside the bracket");
    if q <= j(m) {
        return m;
    }
    // j(M + q^2) >= q since mu0 <= M
    let hi = m + q * q + (m - profile.min());
    bisect(|k| j(k) - q, m, hi, 1e-12)
}

/// Limiting speed of a periodic profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitingSpeed {
    pub speed: f64,
    /// Argmin of `k / j(k)`; absent for a constant profile.
    pub k_star: Option<f64>,
    /// Set when the profile is constant and the speed is `2 sqrt(m)`.
    pub homogeneous: bool,
}

/// `w_inf = min_{k >= M} k / j(k)` and its argmin.
pub fn w_infinity(profile: &PeriodicProfile) -> Result<(f64, f64)> {
    if profile.is_constant() {
        return Err(Error::DegenerateProfile(
            "k/j(k) is singular for a constant profile".into(),
        ));
    }
    let m = profile.max();
    let grid = log_space(m + 1e-9, 40.0 * m, 64);
    let g = |k: f64| match j_of_k(profile, k) {
        Ok(j) if j > 0.0 => k / j,
        _ => f64::INFINITY,
    };
    let best = scan_then_golden(g, &grid, 1e-9);
    Ok((best.value, best.x))
}

/// `w_inf` for nonconstant profiles, `2 sqrt(m)` for constant ones.
pub fn limiting_speed(profile: &PeriodicProfile) -> Result<LimitingSpeed> {
    if profile.is_constant() {
        return Ok(LimitingSpeed {
            speed: 2.0 * profile.max().sqrt(),
            k_star: None,
            homogeneous: true,
        });
    }
    let (speed, k) = w_infinity(profile)?;
    Ok(LimitingSpeed {
        speed,
        k_star: Some(k),
        homogeneous: false,
    })
}

fn check_two_value(mu_plus: f64, mu_minus: f64, k: f64) -> Result<()> {
    if !(mu_minus > 0.0 && mu_minus <= mu_plus && mu_plus.is_finite()) {
        return Err(param(format!(
            "need 0 < mu_minus <= mu_plus, got mu_plus = {mu_plus}, mu_minus = {mu_minus}"
        )));
    }
    if !(k > 1.0 && k.is_finite()) {
        return Err(param(format!("ratio K must exceed 1, got {k}")));
    }
    Ok(())
}

/// Lower bound on the maximal speed when `y_n / x_n -> K`:
/// `2 sqrt(mu+) K / ((K - 1) + sqrt(mu+ / mu-))`.
pub fn two_value_lower_bound_wstar(mu_plus: f64, mu_minus: f64, k: f64) -> Result<f64> {
    check_two_value(mu_plus, mu_minus, k)?;
    Ok(2.0 * mu_plus.sqrt() * k / ((k - 1.0) + (mu_plus / mu_minus).sqrt()))
}

/// Upper bound on the minimal speed when `x_{n+1} / y_n -> K`:
/// `2 sqrt(mu-) (K + sqrt(mu+ / mu-)) / (K + sqrt(mu- / mu+))`.
pub fn two_value_upper_bound_wlow(mu_plus: f64, mu_minus: f64, k: f64) -> Result<f64> {
    check_two_value(mu_plus, mu_minus, k)?;
    let r = (mu_plus / mu_minus).sqrt();
    Ok(2.0 * mu_minus.sqrt() * (k + r) / (k + 1.0 / r))
}

/// Bounds available when `1/(x phi'(x)) -> C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBounds {
    pub c: f64,
    pub eps: f64,
    /// Length of the longest arc where `mu0 > max - eps`.
    pub delta: f64,
    /// Length of the longest arc where `mu0 < min + eps`.
    pub delta_prime: f64,
    pub lower_on_wupper: f64,
    pub upper_on_wlower: f64,
}

impl ThresholdBounds {
    /// The two bounds cross, so the minimal speed is strictly below the maximal one.
    pub fn separates(&self) -> bool {
        self.lower_on_wupper > self.upper_on_wlower
    }
}

pub fn threshold_bounds_thm1(profile: &PeriodicProfile, c: f64, eps: f64) -> Result<ThresholdBounds> {
    if profile.is_constant() {
        return Err(Error::DegenerateProfile("constant profile has no plateaus".into()));
    }
    let (lo, hi) = (profile.min(), profile.max());
    if !(eps > 0.0 && eps < 0.5 * (hi - lo)) {
        return Err(param(format!(
            "eps must lie in (0, {}), got {eps}",
            0.5 * (hi - lo)
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(param(format!("C must be positive, got {c}")));
    }
    let delta = profile.plateau_above(eps)?.length;
    let delta_prime = profile.plateau_below(eps)?.length;

    // in terms of e^{-delta C}
    let top = hi - eps;
    let decay = (-delta * c).exp();
    let lower_on_wupper = 2.0 * top.sqrt() / (1.0 + ((top / lo).sqrt() - 1.0) * decay);

    let bottom = lo + eps;
    let decay = (-delta_prime * c).exp();
    let upper_on_wlower = 2.0 * bottom.sqrt() * (1.0 + (hi / bottom).sqrt() * decay)
        / (1.0 + (bottom / hi).sqrt() * decay);

    Ok(ThresholdBounds {
        c,
        eps,
        delta,
        delta_prime,
        lower_on_wupper,
        upper_on_wlower,
    })
}

/// `pi / (2 sqrt(mu- - c^2/4))`; an admissible radius must be strictly larger.
pub fn min_radius_subsolution(mu_minus: f64, c: f64) -> Result<f64> {
    if !(mu_minus > 0.0) {
        return Err(param(format!("mu_minus must be positive, got {mu_minus}")));
    }
    if !(c >= 0.0 && c < 2.0 * mu_minus.sqrt()) {
        return Err(param(format!(
            "speed c must lie in [0, {}), got {c}",
            2.0 * mu_minus.sqrt()
        )));
    }
    Ok(std::f64::consts::PI / (2.0 * (mu_minus - 0.25 * c * c).sqrt()))
}

/// Every theoretical speed value available for a medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedBounds {
    pub lower_homog: f64,
    pub upper_homog: f64,
    pub w_infinity: Option<f64>,
    pub k_star: Option<f64>,
    pub homogeneous: bool,
    pub two_value_k_high: Option<f64>,
    pub two_value_lower: Option<f64>,
    pub two_value_k_low: Option<f64>,
    pub two_value_upper: Option<f64>,
    pub threshold_c: Option<f64>,
    pub threshold_eps: Option<f64>,
    pub threshold_lower_on_wupper: Option<f64>,
    pub threshold_upper_on_wlower: Option<f64>,
}

impl SpeedBounds {
    /// Homogeneous bounds `2 sqrt(min)`, `2 sqrt(max)` only.
    pub fn from_extrema(min: f64, max: f64) -> Self {
        Self {
            lower_homog: 2.0 * min.sqrt(),
            upper_homog: 2.0 * max.sqrt(),
            w_infinity: None,
            k_star: None,
            homogeneous: min == max,
            two_value_k_high: None,
            two_value_lower: None,
            two_value_k_low: None,
            two_value_upper: None,
            threshold_c: None,
            threshold_eps: None,
            threshold_lower_on_wupper: None,
            threshold_upper_on_wlower: None,
        }
    }

    /// Homogeneous bounds plus the limiting speed of the profile.
    pub fn for_profile(profile: &PeriodicProfile) -> Result<Self> {
        let mut b = Self::from_extrema(profile.min(), profile.max());
        let w = limiting_speed(profile)?;
        b.w_infinity = Some(w.speed);
        b.k_star = w.k_star;
        b.homogeneous = w.homogeneous;
        Ok(b)
    }

    /// Add the two-value bounds for ratios `y_n/x_n -> k_high`, `x_{n+1}/y_n -> k_low`.
    pub fn with_two_value(
        mut self,
        mu_plus: f64,
        mu_minus: f64,
        k_high: f64,
        k_low: f64,
    ) -> Result<Self> {
        self.two_value_k_high = Some(k_high);
        self.two_value_lower = Some(two_value_lower_bound_wstar(mu_plus, mu_minus, k_high)?);
        self.two_value_k_low = Some(k_low);
        self.two_value_upper = Some(two_value_upper_bound_wlow(mu_plus, mu_minus, k_low)?);
        Ok(self)
    }

    pub fn with_threshold(mut self, t: &ThresholdBounds) -> Self {
        self.threshold_c = Some(t.c);
        self.threshold_eps = Some(t.eps);
        self.threshold_lower_on_wupper = Some(t.lower_on_wupper);
        self.threshold_upper_on_wlower = Some(t.upper_on_wlower);
        self
    }
}
