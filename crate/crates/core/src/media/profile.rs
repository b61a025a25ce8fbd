use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::numerics::quadrature;

/// Shape of a 1-periodic growth profile, as written in JSON descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileKind {
    Constant {
        m: f64,
    },
    /// `a` on `[0, theta)`, `b` on `[theta, 1)`.
    TwoValue {
        a: f64,
        b: f64,
        theta: f64,
    },
    /// `m + amp * cos(2 pi y)`.
    Cosine {
        m: f64,
        amp: f64,
    },
    /// Values at `i / n`, linearly interpolated and wrapped.
    Sampled {
        values: Vec<f64>,
    },
}

/// A positive 1-periodic growth rate `mu0` with cached extrema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileKind", into = "ProfileKind")]
pub struct PeriodicProfile {
    kind: ProfileKind,
    min_val: f64,
    max_val: f64,
    breaks: Vec<f64>,
}

/// An interval `(start, start + length)` of phase, `start` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub start: f64,
    pub length: f64,
}

const PLATEAU_SAMPLES: usize = 10_000;

impl PeriodicProfile {
    pub fn new(kind: ProfileKind) -> Result<Self> {
        let finite_pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(param(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let (min_val, max_val, breaks) = match &kind {
            ProfileKind::Constant { m } => {
                finite_pos(*m, "m")?;
                (*m, *m, vec![])
            }
            ProfileKind::TwoValue { a, b, theta } => {
                finite_pos(*a, "a")?;
                finite_pos(*b, "b")?;
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(param(format!("theta must lie in (0, 1), got {theta}")));
                }
                (a.min(*b), a.max(*b), vec![*theta])
            }
            ProfileKind::Cosine { m, amp } => {
                if !amp.is_finite() {
                    return Err(param("amp must be finite"));
                }
                finite_pos(m - amp.abs(), "m - |amp|")?;
                (m - amp.abs(), m + amp.abs(), vec![0.5])
            }
            ProfileKind::Sampled { values } => {
                if values.len() < 2 {
                    return Err(param("sampled profile needs at least 2 values"));
                }
                for v in values {
                    finite_pos(*v, "sample")?;
                }
                let n = values.len();
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi, (1..n).map(|i| i as f64 / n as f64).collect())
            }
        };
        Ok(Self {
            kind,
            min_val,
            max_val,
            breaks,
        })
    }

    pub fn constant(m: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant { m })
    }

    pub fn two_value(a: f64, b: f64, theta: f64) -> Result<Self> {
        Self::new(ProfileKind::TwoValue { a, b, theta })
    }

    pub fn cosine(m: f64, amp: f64) -> Result<Self> {
        Self::new(ProfileKind::Cosine { m, amp })
    }

    pub fn sampled(values: Vec<f64>) -> Result<Self> {
        Self::new(ProfileKind::Sampled { values })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn min(&self) -> f64 {
        self.min_val
    }

    /// `M`, the maximum of the profile.
    pub fn max(&self) -> f64 {
        self.max_val
    }

    pub fn is_constant(&self) -> bool {
        self.min_val == self.max_val
    }

    /// Interior points of `[0, 1)` where the profile is not smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        let y = y.rem_euclid(1.0);
        match &self.kind {
            ProfileKind::Constant { m } => *m,
            ProfileKind::TwoValue { a, b, theta } => {
                if y < *theta {
                    *a
                } else {
                    *b
                }
            }
            ProfileKind::Cosine { m, amp } => m + amp * (2.0 * PI * y).cos(),
            ProfileKind::Sampled { values } => {
                let n = values.len();
                let t = y * n as f64;
                let i = (t.floor() as usize).min(n - 1);
                let w = t - i as f64;
                values[i] * (1.0 - w) + values[(i + 1) % n] * w
            }
        }
    }

    /// Derivative of the profile where a closed form exists.
    ///
    /// Piecewise-constant kinds return 0 away from their jumps; sampled
    /// profiles return `None` and callers fall back to finite differences.
    pub fn slope(&self, y: f64) -> Option<f64> {
        match &self.kind {
            ProfileKind::Constant { .. } | ProfileKind::TwoValue { .. } => Some(0.0),
            ProfileKind::Cosine { amp, .. } => {
                Some(-2.0 * PI * amp * (2.0 * PI * y.rem_euclid(1.0)).sin())
            }
            ProfileKind::Sampled { .. } => None,
        }
    }

    /// Integral of `g(y)` over `[a, b]`, split at every breakpoint and integer.
    pub fn integrate<G: Fn(f64) -> f64>(&self, a: f64, b: f64, g: G) -> f64 {
        if b < a {
            return -self.integrate(b, a, g);
        }
        let mut points = Vec::new();
        let first = a.floor() as i64;
        let last = b.ceil() as i64;
        for period in first..=last {
            let base = period as f64;
            points.push(base);
            points.extend(self.breaks.iter().map(|t| base + t));
        }
        quadrature::simpson_pieces(&g, a, b, &points)
    }

    /// Mean of the profile over one period.
    pub fn mean(&self) -> f64 {
        self.integrate(0.0, 1.0, |y| self.evaluate(y))
    }

    /// Window average of the profile over `[a, b]`.
    pub fn window_average(&self, a: f64, b: f64) -> f64 {
        self.integrate(a, b, |y| self.evaluate(y)) / (b - a)
    }

    /// Longest arc where `mu0 > max - eps`, located by a 10^4-sample scan and
    /// endpoints refined by bisection.
    pub fn plateau_above(&self, eps: f64) -> Result<Plateau> {
        let level = self.max_val - eps;
        self.longest_run(eps, |v| v > level)
    }

    /// Longest arc where `mu0 < min + eps`.
    pub fn plateau_below(&self, eps: f64) -> Result<Plateau> {
        let level = self.min_val + eps;
        self.longest_run(eps, |v| v < level)
    }

    fn longest_run<C: Fn(f64) -> bool>(&self, eps: f64, inside: C) -> Result<Plateau> {
        if self.is_constant() {
            return Err(Error::DegenerateProfile(
                "constant profile has no plateau distinct from its complement".into(),
            ));
        }
        let range = self.max_val - self.min_val;
        if !(eps > 0.0 && eps < range) {
            return Err(param(format!(
                "eps must lie in (0, {range}), got {eps}"
            )));
        }
        let n = PLATEAU_SAMPLES;
        let at = |i: isize| i as f64 / n as f64;
        let flags: Vec<bool> = (0..n).map(|i| inside(self.evaluate(at(i as isize)))).collect();
        let Some(out) = flags.iter().position(|f| !f) else {
            return Err(param("eps covers the whole period"));
        };
        // walk the circle starting just after an outside sample
        let (mut best_start, mut best_len, mut run_start, mut run_len) = (0isize, 0usize, 0isize, 0usize);
        for step in 1..=n {
            let i = (out + step) % n;
            if flags[i] {
                if run_len == 0 {
                    run_start = (out + step) as isize;
                }
                run_len += 1;
                if run_len > best_len {
                    best_len = run_len;
                    best_start = run_start;
                }
            } else {
                run_len = 0;
            }
        }
        if best_len == 0 {
            return Err(param("no sample satisfies the plateau condition"));
        }
        let first_in = best_start;
        let last_in = best_start + best_len as isize - 1;
        let refine = |inner: f64, outer: f64| {
            let (mut a, mut b) = (inner, outer);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if inside(self.evaluate(m)) {
                    a = m;
                } else {
                    b = m;
                }
                if (a - b).abs() < 1e-14 {
                    break;
                }
            }
            a
        };
        let start = refine(at(first_in), at(first_in - 1));
        let end = refine(at(last_in), at(last_in + 1));
        Ok(Plateau {
            start: start.rem_euclid(1.0),
            length: end - start,
        })
    }
}

impl TryFrom<ProfileKind> for PeriodicProfile {
    type Error = Error;
    fn try_from(kind: ProfileKind) -> Result<Self> {
        Self::new(kind)
    }
}

impl From<PeriodicProfile> for ProfileKind {
    fn from(p: PeriodicProfile) -> Self {
        p.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrema_are_cached() {
        let p = PeriodicProfile::cosine(2.0, -0.5).unwrap();
        assert_eq!((p.min(), p.max()), (1.5, 2.5));
        let q = PeriodicProfile::sampled(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!((q.min(), q.max()), (1.0, 3.0));
    }

    #[test]
    fn rejects_nonpositive_profiles() {
        assert!(PeriodicProfile::cosine(1.0, 1.0).is_err());
        assert!(PeriodicProfile::constant(0.0).is_err());
        assert!(PeriodicProfile::two_value(1.0, 2.0, 1.0).is_err());
        assert!(PeriodicProfile::sampled(vec![1.0]).is_err());
    }

    #[test]
    fn sampled_interpolates_and_wraps() {
        let p = PeriodicProfile::sampled(vec![1.0, 3.0]).unwrap();
        assert!((p.evaluate(0.25) - 2.0).abs() < 1e-15);
        assert!((p.evaluate(0.75) - 2.0).abs() < 1e-15);
        assert!((p.evaluate(-0.5) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_value_mean_is_exact() {
        let p = PeriodicProfile::two_value(4.0, 1.0, 0.5).unwrap();
        assert!((p.mean() - 2.5).abs() < 1e-13);
    }

    #[test]
    fn cosine_plateau_has_length_one_third() {
        // cos(2 pi y) > 1/2 on (-1/6, 1/6)
        let p = PeriodicProfile::cosine(2.0, 1.0).unwrap();
        let pl = p.plateau_above(0.5).unwrap();
        assert!((pl.length - 1.0 / 3.0).abs() < 1e-10, "{pl:?}");
        assert!((pl.start - 5.0 / 6.0).abs() < 1e-10, "{pl:?}");
        let low = p.plateau_below(0.5).unwrap();
        assert!((low.length - 1.0 / 3.0).abs() < 1e-10);
        assert!((low.start - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn two_value_plateau_is_the_high_piece() {
        let p = PeriodicProfile::two_value(4.0, 1.0, 0.3).unwrap();
        let pl = p.plateau_above(1.0).unwrap();
        assert!(pl.start.abs() < 1e-12 || (pl.start - 1.0).abs() < 1e-12);
        assert!((pl.length - 0.3).abs() < 1e-10);
    }

    #[test]
    fn constant_has_no_plateau() {
        let p = PeriodicProfile::constant(1.0).unwrap();
        assert!(matches!(
            p.plateau_above(0.1),
            Err(Error::DegenerateProfile(_))
        ));
    }

    #[test]
    fn json_descriptor() {
        let p: PeriodicProfile =
            serde_json::from_str(r#"{"kind":"cosine","m":2.0,"amp":1.0}"#).unwrap();
        assert_eq!(p.max(), 3.0);
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(back, r#"{"kind":"cosine","m":2.0,"amp":1.0}"#);
        assert!(serde_json::from_str::<PeriodicProfile>(r#"{"kind":"cosine","m":1.0,"amp":2.0}"#).is_err());
        assert!(serde_json::from_str::<PeriodicProfile>(r#"{"kind":"cosine","m":3.0,"amp":1.0,"x":1}"#).is_err());
    }
}
