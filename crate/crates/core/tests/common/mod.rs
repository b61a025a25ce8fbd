//! Closed-form oracles and scenario builders shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use kpp_core::fronttrack::{estimate_spreading_speeds, SpeedEstimates};
use kpp_core::media::{geometric_sequences, Medium, PeriodicProfile, PhaseMap};
use kpp_core::solver::{run, SolverConfig};

/// Complete elliptic integral of the second kind `E(m)` by the
/// arithmetic-geometric mean, `0 <= m < 1`.
pub fn elliptic_e(m: f64) -> f64 {
    let (mut a, mut b, mut c) = (1.0f64, (1.0 - m).sqrt(), m.sqrt());
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        c = c * c / (4.0 * an);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        let term = pow * c * c;
        sum += term;
        if term < 1e-18 {
            break;
        }
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// `int_0^1 sqrt(k - 2 - cos(2 pi y)) dy = (2 / pi) sqrt(k - 1) E(2 / (k - 1))`.
pub fn cosine_j(k: f64) -> f64 {
    2.0 / PI * (k - 1.0).sqrt() * elliptic_e(2.0 / (k - 1.0))
}

/// `j` of the profile equal to `a` on a fraction `theta` of the period and `b` elsewhere.
pub fn two_value_j(a: f64, b: f64, theta: f64, k: f64) -> f64 {
    theta * (k - a).sqrt() + (1.0 - theta) * (k - b).sqrt()
}

/// Minimum of `k / j(k)` over `n` uniform points of `[lo, hi]`.
pub fn brute_force_min(j: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let k = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            k / j(k)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Two-value medium with geometric ratios `K1 = K2 = k`, `mu = (4, 1)`, `x0 = 20`.
pub fn two_value_geometric(k: f64, x_max: f64) -> Medium {
    let seq = geometric_sequences(4.0, 1.0, k, k, 20.0, x_max).unwrap();
    Medium::two_value(seq, None, x_max).unwrap()
}

/// `2 + cos(2 pi sqrt(x))`.
pub fn cosine_of_sqrt(x_max: f64) -> Medium {
    Medium::composed(
        PeriodicProfile::cosine(2.0, 1.0).unwrap(),
        PhaseMap::power(0.5).unwrap(),
        None,
        x_max,
    )
    .unwrap()
}

pub fn homogeneous(m: f64, x_max: f64) -> Medium {
    Medium::composed(
        PeriodicProfile::constant(m).unwrap(),
        PhaseMap::power(0.5).unwrap(),
        None,
        x_max,
    )
    .unwrap()
}

/// Run to `cfg.t_end` and estimate both speeds with a 30% transient.
pub fn simulate(medium: &Medium, cfg: &SolverConfig, window: f64) -> SpeedEstimates {
    let out = run(medium, cfg, &mut []).unwrap();
    estimate_spreading_speeds(&out.trace, window, 0.3).unwrap()
}
