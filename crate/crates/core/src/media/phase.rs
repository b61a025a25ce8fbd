use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::error::{param, Error, Result};

/// Family of strictly increasing phase maps `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhaseKind {
    /// `beta * ln(x)^alpha`
    LogPower { alpha: f64, beta: f64 },
    /// `x^alpha`, `0 < alpha < 1`
    Power { alpha: f64 },
    /// `x / ln(x)^alpha`
    XOverLog { alpha: f64 },
    /// `x / L`: an ordinary periodic medium of period `L`.
    Affine {
        #[serde(rename = "L")]
        l: f64,
    },
}

/// A phase map with analytic derivatives up to third order, valid on
/// `[x_left, +inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseKind", into = "PhaseKind")]
pub struct PhaseMap {
    kind: PhaseKind,
    x_left: f64,
}

impl PhaseMap {
    pub fn new(kind: PhaseKind) -> Result<Self> {
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(param(format!("{name} must be positive, got {v}")))
            }
        };
        let x_left = match &kind {
            PhaseKind::LogPower { alpha, beta } => {
                pos(*alpha, "alpha")?;
                pos(*beta, "beta")?;
                E
            }
            PhaseKind::Power { alpha } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(param(format!("power alpha must lie in (0, 1), got {alpha}")));
                }
                0.0
            }
            PhaseKind::XOverLog { alpha } => {
                pos(*alpha, "alpha")?;
                (alpha + 1.0).exp()
            }
            PhaseKind::Affine { l } => {
                pos(*l, "L")?;
                0.0
            }
        };
        Ok(Self { kind, x_left })
    }

    pub fn log_power(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(PhaseKind::LogPower { alpha, beta })
    }

    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(PhaseKind::Power { alpha })
    }

    pub fn x_over_log(alpha: f64) -> Result<Self> {
        Self::new(PhaseKind::XOverLog { alpha })
    }

    pub fn affine(l: f64) -> Result<Self> {
        Self::new(PhaseKind::Affine { l })
    }

    pub fn kind(&self) -> &PhaseKind {
        &self.kind
    }

    /// Left edge of the validity region.
    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.kind {
            PhaseKind::LogPower { alpha, beta } => beta * x.ln().powf(alpha),
            PhaseKind::Power { alpha } => x.powf(alpha),
            PhaseKind::XOverLog { alpha } => x / x.ln().powf(alpha),
            PhaseKind::Affine { l } => x / l,
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match self.kind {
            PhaseKind::LogPower { alpha, beta } => {
                alpha * beta * x.ln().powf(alpha - 1.0) / x
            }
            PhaseKind::Power { alpha } => alpha * x.powf(alpha - 1.0),
            PhaseKind::XOverLog { alpha } => {
                let l = x.ln();
                l.powf(-alpha) - alpha * l.powf(-alpha - 1.0)
            }
            PhaseKind::Affine { l } => 1.0 / l,
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match self.kind {
            PhaseKind::LogPower { alpha, beta } => {
                let l = x.ln();
                alpha * beta * ((alpha - 1.0) * l.powf(alpha - 2.0) - l.powf(alpha - 1.0))
                    / (x * x)
            }
            PhaseKind::Power { alpha } => alpha * (alpha - 1.0) * x.powf(alpha - 2.0),
            PhaseKind::XOverLog { alpha } => {
                let l = x.ln();
                (-alpha * l.powf(-1.0 - alpha) + alpha * (alpha + 1.0) * l.powf(-alpha - 2.0)) / x
            }
            PhaseKind::Affine { .. } => 0.0,
        }
    }

    pub fn d3(&self, x: f64) -> f64 {
        match self.kind {
            PhaseKind::LogPower { alpha, beta } => {
                let l = x.ln();
                alpha
                    * beta
                    * ((alpha - 1.0) * (alpha - 2.0) * l.powf(alpha - 3.0)
                        - 3.0 * (alpha - 1.0) * l.powf(alpha - 2.0)
                        + 2.0 * l.powf(alpha - 1.0))
                    / (x * x * x)
            }
            PhaseKind::Power { alpha } => {
                alpha * (alpha - 1.0) * (alpha - 2.0) * x.powf(alpha - 3.0)
            }
            PhaseKind::XOverLog { alpha } => {
                let l = x.ln();
                (alpha * l.powf(-1.0 - alpha)
                    - alpha * (alpha + 1.0) * (alpha + 2.0) * l.powf(-alpha - 3.0))
                    / (x * x)
            }
            PhaseKind::Affine { .. } => 0.0,
        }
    }

    /// Local period `L(x) = x / phi(x)`.
    pub fn local_period(&self, x: f64) -> f64 {
        x / self.value(x)
    }

    /// Solve `phi(x) = target` on `[x_left, x_hi]` by bisection to relative
    /// tolerance 1e-12.
    pub fn inverse(&self, target: f64, x_hi: f64) -> Result<f64> {
        let (lo0, hi0) = (self.x_left, x_hi);
        if !(target >= self.value(lo0) && target <= self.value(hi0)) {
            return Err(Error::Domain(format!(
                "phase value {target} outside [{}, {}]",
                self.value(lo0),
                self.value(hi0)
            )));
        }
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..300 {
            if hi - lo <= 1e-12 * hi.abs().max(1e-300) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.value(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

impl TryFrom<PhaseKind> for PhaseMap {
    type Error = Error;
    fn try_from(kind: PhaseKind) -> Result<Self> {
        Self::new(kind)
    }
}

impl From<PhaseMap> for PhaseKind {
    fn from(p: PhaseMap) -> Self {
        p.kind
    }
}
