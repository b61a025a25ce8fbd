use serde::{Deserialize, Serialize};

use super::{PeriodicProfile, PhaseMap};
use crate::error::{param, Error, Result};

/// Interval sequences of a two-value medium: `mu_plus` on `(x_n, y_n)` and
/// `mu_minus` on `(y_n, x_{n+1})`.
///
/// `x_seq` may hold one more entry than `y_seq`; the unmatched last `x_n`
/// opens a `mu_plus` interval whose right end lies beyond the stored range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequences", into = "RawSequences")]
pub struct TwoValueSequences {
    mu_plus: f64,
    mu_minus: f64,
    x_seq: Vec<f64>,
    y_seq: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequences {
    mu_plus: f64,
    mu_minus: f64,
    x_seq: Vec<f64>,
    y_seq: Vec<f64>,
}

impl TwoValueSequences {
    pub fn new(mu_plus: f64, mu_minus: f64, x_seq: Vec<f64>, y_seq: Vec<f64>) -> Result<Self> {
        if !(mu_minus > 0.0 && mu_minus < mu_plus && mu_plus.is_finite()) {
            return Err(param(format!(
                "need 0 < mu_minus < mu_plus, got ({mu_minus}, {mu_plus})"
            )));
        }
        if x_seq.is_empty() {
            return Err(param("x_seq must not be empty"));
        }
        if !(y_seq.len() == x_seq.len() || y_seq.len() + 1 == x_seq.len()) {
            return Err(param("x_seq must have as many entries as y_seq, or one more"));
        }
        if !(x_seq[0] >= 0.0) {
            return Err(param("x_seq must start at a nonnegative position"));
        }
        for (n, &x) in x_seq.iter().enumerate() {
            if let Some(&y) = y_seq.get(n) {
                if !(x < y) {
                    return Err(param(format!("need x_{n} < y_{n}, got {x} >= {y}")));
                }
                if let Some(&next) = x_seq.get(n + 1) {
                    if !(y < next) {
                        return Err(param(format!("need y_{n} < x_{}, got {y} >= {next}", n + 1)));
                    }
                }
            }
        }
        Ok(Self {
            mu_plus,
            mu_minus,
            x_seq,
            y_seq,
        })
    }

    pub fn mu_plus(&self) -> f64 {
        self.mu_plus
    }

    pub fn mu_minus(&self) -> f64 {
        self.mu_minus
    }

    pub fn x_seq(&self) -> &[f64] {
        &self.x_seq
    }

    pub fn y_seq(&self) -> &[f64] {
        &self.y_seq
    }

    /// Growth rate at `x`, or `None` left of `x_0`.
    pub fn rate_at(&self, x: f64) -> Option<f64> {
        let idx = self.x_seq.partition_point(|&xn| xn <= x);
        if idx == 0 {
            return None;
        }
        let n = idx - 1;
        match self.y_seq.get(n) {
            Some(&y) if x >= y => Some(self.mu_minus),
            _ => Some(self.mu_plus),
        }
    }

    /// Ratios `y_n / x_n` over complete intervals.
    pub fn high_ratios(&self) -> Vec<f64> {
        self.y_seq
            .iter()
            .zip(&self.x_seq)
            .filter(|(_, &x)| x > 0.0)
            .map(|(y, x)| y / x)
            .collect()
    }

    /// Ratios `x_{n+1} / y_n`.
    pub fn low_ratios(&self) -> Vec<f64> {
        self.y_seq
            .iter()
            .zip(self.x_seq.iter().skip(1))
            .map(|(y, x)| x / y)
            .collect()
    }
}

impl TryFrom<RawSequences> for TwoValueSequences {
    type Error = Error;
    fn try_from(r: RawSequences) -> Result<Self> {
        Self::new(r.mu_plus, r.mu_minus, r.x_seq, r.y_seq)
    }
}

impl From<TwoValueSequences> for RawSequences {
    fn from(s: TwoValueSequences) -> Self {
        RawSequences {
            mu_plus: s.mu_plus,
            mu_minus: s.mu_minus,
            x_seq: s.x_seq,
            y_seq: s.y_seq,
        }
    }
}

/// Sequences with constant ratios `y_n / x_n = k1` and `x_{n+1} / y_n = k2`,
/// truncated at `x_max`.
pub fn geometric_sequences(
    mu_plus: f64,
    mu_minus: f64,
    k1: f64,
    k2: f64,
    x0: f64,
    x_max: f64,
) -> Result<TwoValueSequences> {
    if !(k1 > 1.0 && k2 > 1.0) {
        return Err(param(format!("ratios must exceed 1, got K1={k1}, K2={k2}")));
    }
    if !(x0 > 0.0 && x0 <= x_max) {
        return Err(param(format!("need 0 < x0 <= X_max, got x0={x0}")));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut x = x0;
    while x <= x_max {
        xs.push(x);
        let y = k1 * x;
        if y > x_max {
            break;
        }
        ys.push(y);
        x = k2 * y;
    }
    TwoValueSequences::new(mu_plus, mu_minus, xs, ys)
}

/// Positions solving `phi(x_n) = start + n` and `phi(y_n) = start + n + delta`.
pub fn sequences_from_plateau(
    phase: &PhaseMap,
    start: f64,
    delta: f64,
    mu_plus: f64,
    mu_minus: f64,
    x_max: f64,
) -> Result<TwoValueSequences> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(param(format!("plateau length must lie in (0, 1), got {delta}")));
    }
    let phi_lo = phase.value(phase.x_left());
    let phi_hi = phase.value(x_max);
    let mut n = (phi_lo - start).ceil().max(0.0);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    while start + n <= phi_hi {
        xs.push(phase.inverse(start + n, x_max)?);
        let target = start + n + delta;
        if target > phi_hi {
            break;
        }
        ys.push(phase.inverse(target, x_max)?);
        n += 1.0;
    }
    if xs.is_empty() {
        return Err(Error::Domain(format!(
            "phase range [{phi_lo}, {phi_hi}] holds no interval start"
        )));
    }
    TwoValueSequences::new(mu_plus, mu_minus, xs, ys)
}

/// Two-value medium bounding `mu0(phi(x))` from below: `max mu0 - eps` on
/// preimages of the longest arc where `mu0 > max mu0 - eps`, `min mu0`
/// elsewhere.
pub fn sequences_from_phase(
    profile: &PeriodicProfile,
    phase: &PhaseMap,
    eps: f64,
    x_max: f64,
) -> Result<TwoValueSequences> {
    let plateau = profile.plateau_above(eps)?;
    sequences_from_plateau(
        phase,
        plateau.start,
        plateau.length,
        profile.max() - eps,
        profile.min(),
        x_max,
    )
}
