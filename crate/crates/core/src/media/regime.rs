use serde::{Deserialize, Serialize};

use super::PhaseMap;
use crate::numerics::log_space;

/// Trend classification of a phase map, read off `1/(x phi')`,
/// `phi''/phi'^2` and `phi'''/phi'^2` on a log-spaced probe set.
/// Advisory only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum Regime {
    Oscillating,
    Threshold { c: f64 },
    Unique,
    Inconclusive,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Oscillating => "oscillating",
            Regime::Threshold { .. } => "threshold",
            Regime::Unique => "unique",
            Regime::Inconclusive => "inconclusive",
        }
    }
}

const DECAY_FACTOR: f64 = 10.0;
const GROWTH_FACTOR: f64 = 2.0;
const PLATEAU_SPREAD: f64 = 0.05;
const MIN_DECADES: f64 = 4.0;

/// 30 log-spaced probes over 29 decades starting at `max(10, 2 x_left)`.
pub fn default_probes(phase: &PhaseMap) -> Vec<f64> {
    let lo = (2.0 * phase.x_left()).max(10.0);
    log_space(lo, lo * 1e29, 30)
}

pub fn classify_regime(phase: &PhaseMap, probes: &[f64]) -> Regime {
    let mut xs: Vec<f64> = probes
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > phase.x_left() && x > 0.0)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 || (xs[xs.len() - 1] / xs[0]).log10() < MIN_DECADES {
        return Regime::Inconclusive;
    }
    let g: Vec<f64> = xs.iter().map(|&x| 1.0 / (x * phase.d1(x))).collect();
    let a: Vec<f64> = xs
        .iter()
        .map(|&x| phase.d2(x) / phase.d1(x).powi(2))
        .collect();
    let b: Vec<f64> = xs
        .iter()
        .map(|&x| phase.d3(x) / phase.d1(x).powi(2))
        .collect();
    if g.iter().chain(&a).chain(&b).any(|v| !v.is_finite()) {
        return Regime::Inconclusive;
    }

    let decays = |v: &[f64]| {
        let (first, last) = (v[0].abs(), v[v.len() - 1].abs());
        last < 1e-12 || last * DECAY_FACTOR <= first
    };
    let non_increasing = g.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    if decays(&a) && decays(&b) && non_increasing {
        return Regime::Unique;
    }

    let increasing = g.windows(2).all(|w| w[1] > w[0]);
    if increasing && g[g.len() - 1] >= GROWTH_FACTOR * g[0] {
        return Regime::Oscillating;
    }

    let tail = &g[g.len() / 2..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    let last = g[g.len() - 1];
    if last > 0.0 && (hi - lo) <= PLATEAU_SPREAD * last {
        return Regime::Threshold { c: last };
    }
    Regime::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(phase: PhaseMap) -> Regime {
        let probes = default_probes(&phase);
        classify_regime(&phase, &probes)
    }

    #[test]
    fn examples() {
        assert_eq!(classify(PhaseMap::log_power(0.5, 1.0).unwrap()), Regime::Oscillating);
        assert_eq!(classify(PhaseMap::power(0.5).unwrap()), Regime::Unique);
        assert_eq!(classify(PhaseMap::x_over_log(1.0).unwrap()), Regime::Unique);
        assert_eq!(classify(PhaseMap::affine(3.0).unwrap()), Regime::Unique);
        match classify(PhaseMap::log_power(1.0, 2.0).unwrap()) {
            Regime::Threshold { c } => assert!((c - 0.5).abs() < 1e-9, "c = {c}"),
            other => panic!("expected threshold, got {other:?}"),
        }
    }

    #[test]
    fn short_probe_span_is_inconclusive() {
        let phase = PhaseMap::log_power(0.5, 1.0).unwrap();
        let probes = log_space(10.0, 1e4, 10);
        assert_eq!(classify_regime(&phase, &probes), Regime::Inconclusive);
    }
}
