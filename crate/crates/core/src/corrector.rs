//! Periodic correctors `v_p` of `(v' - p)^2 + mu0 = H(p)` and the
//! approximate eigenfunctions `exp(v_p(phi(x)) / phi'(x))` built from them.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::media::{PeriodicProfile, PhaseMap};
use crate::numerics::optimize::bisect;
use crate::theory::{h_of_p, j_of_k};

const TABLE_NODES: usize = 1024;
const FD_STEP: f64 = 1e-6;
/// Points where `level - mu0` is below this are treated as touching the maximum.
const DEGENERATE_GAP: f64 = 1e-10;
/// Half-width of the excluded zone around the kink in `hj_residual`.
const HJ_KINK_ZONE: f64 = 1e-6;
/// Half-width, in phase units, of the excluded zone around kink preimages.
pub const PHASE_KINK_ZONE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    /// `v = p y - S(y)`, used for `p >= j(M)`.
    Plus,
    /// `v = p y + S(y)`, used for `p <= -j(M)`.
    Minus,
    /// `v = p y - S(y)` on `[0, X]`, `p y - 2 S(X) + S(y)` on `[X, 1]`.
    Kinked { x: f64, s_x: f64 },
    /// Constant profile: `v = 0`, `H = p^2 + m`.
    Flat,
}

/// The 1-periodic corrector `v_p` and its eigenvalue `H(p)`.
#[derive(Debug, Clone)]
pub struct Corrector {
    profile: PeriodicProfile,
    p: f64,
    h: f64,
    branch: Branch,
    /// `S(i / TABLE_NODES)` with `S(y) = int_0^y sqrt(level - mu0)`.
    table: Vec<f64>,
}

pub fn build_corrector(profile: &PeriodicProfile, p: f64) -> Result<Corrector> {
    if profile.is_constant() {
        return Err(Error::DegenerateProfile(
            "corrector needs a nonconstant profile".into(),
        ));
    }
    if !p.is_finite() {
        return Err(crate::error::param(format!("p must be finite, got {p}")));
    }
    let m = profile.max();
    let jm = j_of_k(profile, m)?;
    let h = h_of_p(profile, p);
    let mut c = Corrector {
        profile: profile.clone(),
        p,
        h,
        branch: Branch::Plus,
        table: Vec::new(),
    };
    c.table = cumulative_table(profile, h);
    c.branch = if p >= jm {
        Branch::Plus
    } else if p <= -jm {
        Branch::Minus
    } else {
        let x = bisect(|y| p + jm - 2.0 * c.s_integral(y), 0.0, 1.0, 1e-12);
        Branch::Kinked {
            x,
            s_x: c.s_integral(x),
        }
    };
    Ok(c)
}

/// `F(Y) = p + int_Y^1 sqrt(M - mu0) - int_0^Y sqrt(M - mu0)`, whose root is the kink.
pub fn kink_function(profile: &PeriodicProfile, p: f64, y: f64) -> f64 {
    let m = profile.max();
    let s = |t: f64| (m - profile.evaluate(t)).max(0.0).sqrt();
    p + profile.integrate(y, 1.0, s) - profile.integrate(0.0, y, s)
}

fn cumulative_table(profile: &PeriodicProfile, level: f64) -> Vec<f64> {
    let s = |t: f64| (level - profile.evaluate(t)).max(0.0).sqrt();
    let n = TABLE_NODES;
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for i in 0..n {
        acc += profile.integrate(i as f64 / n as f64, (i + 1) as f64 / n as f64, s);
        table.push(acc);
    }
    table
}

impl Corrector {
    /// `v = 0`, `H = p^2 + m` for a constant rate `m`.
    pub(crate) fn homogeneous(m: f64, p: f64) -> Result<Self> {
        Ok(Corrector {
            profile: PeriodicProfile::constant(m)?,
            p,
            h: p * p + m,
            branch: Branch::Flat,
            table: vec![0.0; TABLE_NODES + 1],
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The eigenvalue `H(p)`.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn profile(&self) -> &PeriodicProfile {
        &self.profile
    }

    /// Kink position in `[0, 1]`, present when `|p| < j(M)`.
    pub fn kink(&self) -> Option<f64> {
        match self.branch {
            Branch::Kinked { x, .. } => Some(x),
            _ => None,
        }
    }

    /// One-sided derivatives `(v'(X-), v'(X+))` at the kink.
    pub fn kink_derivatives(&self) -> Option<(f64, f64)> {
        let x = self.kink()?;
        let s = self.s(x);
        Some((self.p - s, self.p + s))
    }

    fn s(&self, y: f64) -> f64 {
        (self.h - self.profile.evaluate(y)).max(0.0).sqrt()
    }

    /// `S(y)` for `y` in `[0, 1]`.
    fn s_integral(&self, y: f64) -> f64 {
        if matches!(self.branch, Branch::Flat) {
            return 0.0;
        }
        let n = TABLE_NODES as f64;
        let i = ((y * n).floor() as usize).min(TABLE_NODES - 1);
        let node = i as f64 / n;
        let level = self.h;
        let profile = &self.profile;
        self.table[i]
            + profile.integrate(node, y, |t| (level - profile.evaluate(t)).max(0.0).sqrt())
    }

    /// `v` on one period, `y` in `[0, 1]`.
    fn value_on_period(&self, y: f64) -> f64 {
        let p = self.p;
        match self.branch {
            Branch::Plus => p * y - self.s_integral(y),
            Branch::Minus => p * y + self.s_integral(y),
            Branch::Kinked { x, s_x } => {
                if y <= x {
                    p * y - self.s_integral(y)
                } else {
                    p * y - 2.0 * s_x + self.s_integral(y)
                }
            }
            Branch::Flat => 0.0,
        }
    }

    /// `v(1) - v(0)`.
    pub fn period_mismatch(&self) -> f64 {
        self.value_on_period(1.0) - self.value_on_period(0.0)
    }

    pub fn value(&self, y: f64) -> f64 {
        self.value_on_period(y.rem_euclid(1.0))
    }

    /// `+1` where `v' = p + s`, `-1` where `v' = p - s`.
    fn sign(&self, y: f64) -> f64 {
        match self.branch {
            Branch::Plus => -1.0,
            Branch::Minus => 1.0,
            Branch::Kinked { x, .. } => {
                if y < x {
                    -1.0
                } else {
                    1.0
                }
            }
            Branch::Flat => 0.0,
        }
    }

    /// `v'(y)`; at the kink the right derivative.
    pub fn derivative(&self, y: f64) -> f64 {
        if matches!(self.branch, Branch::Flat) {
            return 0.0;
        }
        let y = y.rem_euclid(1.0);
        self.p + self.sign(y) * self.s(y)
    }

    /// `v''(y)`, from `+-mu0' / (2 sqrt(level - mu0))` where the profile has a
    /// closed-form slope and `level - mu0` is not degenerate, otherwise a
    /// one-sided difference of `v'` taken away from the kink.
    pub fn second_derivative(&self, y: f64) -> f64 {
        let y = y.rem_euclid(1.0);
        if matches!(self.branch, Branch::Flat) {
            return 0.0;
        }
        let gap = self.h - self.profile.evaluate(y);
        if gap > DEGENERATE_GAP {
            if let Some(slope) = self.profile.slope(y) {
                return -self.sign(y) * slope / (2.0 * gap.sqrt());
            }
        }
        let forward = match self.branch {
            Branch::Kinked { x, .. } => !(y < x && y + FD_STEP >= x),
            _ => true,
        };
        let d0 = self.derivative(y);
        if forward {
            // stay on the same side of the kink
            let d1 = self.p + self.sign(y) * self.s(y + FD_STEP);
            (d1 - d0) / FD_STEP
        } else {
            let d1 = self.p + self.sign(y) * self.s(y - FD_STEP);
            (d0 - d1) / FD_STEP
        }
    }

    /// Circular distance from `y` to the kink, `None` without kink.
    pub fn kink_distance(&self, y: f64) -> Option<f64> {
        let x = self.kink()?;
        let d = (y.rem_euclid(1.0) - x).abs();
        Some(d.min(1.0 - d))
    }

    /// `max |v(y)|` over `samples + 1` points of one period.
    pub fn sup_norm(&self, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| self.value_on_period(i as f64 / samples as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// `max |(v'(y) - p)^2 + mu0(y) - H|` over `n` uniform points of `[0, 1)`,
/// skipping a `1e-6` neighbourhood of the kink.
pub fn hj_residual(c: &Corrector, n: usize) -> Result<f64> {
    if n < 100 {
        return Err(crate::error::param(format!("need at least 100 samples, got {n}")));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let y = i as f64 / n as f64;
        if c.kink_distance(y).is_some_and(|d| d < HJ_KINK_ZONE) {
            continue;
        }
        let d = c.derivative(y) - c.p;
        worst = worst.max((d * d + c.profile.evaluate(y) - c.h).abs());
    }
    Ok(worst)
}

/// `phi_p(x) = exp(v_p(phi(x)) / phi'(x))`.
#[derive(Debug, Clone)]
pub struct ApproxEigenfunction {
    corrector: Corrector,
    phase: PhaseMap,
}

/// One probe of the eigenfunction residual; `residual` is `None` when the
/// probe falls in a kink zone or where `v''` is not defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub x: f64,
    pub residual: Option<f64>,
}

/// `ln phi_p(x) / x` on probes, with a flag set when the last magnitude is
/// below half the first.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrowth {
    pub samples: Vec<(f64, f64)>,
    pub decaying: bool,
}

impl ApproxEigenfunction {
    pub fn new(corrector: Corrector, phase: PhaseMap) -> Self {
        Self { corrector, phase }
    }

    pub fn corrector(&self) -> &Corrector {
        &self.corrector
    }

    pub fn phase(&self) -> &PhaseMap {
        &self.phase
    }

    fn check(&self, x: f64) -> Result<()> {
        if x >= self.phase.x_left() && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} below the phase validity edge {}",
                self.phase.x_left()
            )))
        }
    }

    /// `ln phi_p(x) = v(phi(x)) / phi'(x)`.
    pub fn log_value(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.corrector.value(self.phase.value(x)) / self.phase.d1(x))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.log_value(x)?.exp())
    }

    /// `phi_p' / phi_p = v'(phi) - (phi'' / phi'^2) v(phi)`.
    pub fn log_derivative(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (d1, d2) = (self.phase.d1(x), self.phase.d2(x));
        let y = self.phase.value(x);
        Ok(self.corrector.derivative(y) - d2 / (d1 * d1) * self.corrector.value(y))
    }

    /// `(ln phi_p)''`.
    pub fn log_second_derivative(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (d1, d2, d3) = (self.phase.d1(x), self.phase.d2(x), self.phase.d3(x));
        let y = self.phase.value(x);
        let c = &self.corrector;
        Ok(d1 * c.second_derivative(y) - d2 / d1 * c.derivative(y)
            + (2.0 * d2 * d2 / (d1 * d1 * d1) - d3 / (d1 * d1)) * c.value(y))
    }

    /// Whether `x` maps into a kink zone or onto a point where `level - mu0`
    /// degenerates.
    pub fn is_excluded(&self, x: f64) -> bool {
        let y = self.phase.value(x);
        let c = &self.corrector;
        if c.kink_distance(y).is_some_and(|d| d < PHASE_KINK_ZONE) {
            return true;
        }
        !matches!(c.branch, Branch::Flat) && c.h - c.profile.evaluate(y) < DEGENERATE_GAP
    }

    /// `(L_p phi_p - H phi_p) / phi_p` in its expanded form.
    pub fn residual(&self, x: f64) -> Result<Option<f64>> {
        self.check(x)?;
        if self.is_excluded(x) {
            return Ok(None);
        }
        let (d1, d2) = (self.phase.d1(x), self.phase.d2(x));
        let y = self.phase.value(x);
        let c = &self.corrector;
        let (v, dv) = (c.value(y), c.derivative(y));
        let q = d2 / (d1 * d1);
        let linear = self.log_second_derivative(x)?;
        Ok(Some(
            linear - 2.0 * q * v * dv + (q * v) * (q * v) + 2.0 * c.p * q * v,
        ))
    }
}

/// Residual of the approximate eigenfunction at each probe.
pub fn eigen_residual_profile(
    aef: &ApproxEigenfunction,
    probes: &[f64],
) -> Result<Vec<ResidualSample>> {
    probes
        .iter()
        .map(|&x| {
            Ok(ResidualSample {
                x,
                residual: aef.residual(x)?,
            })
        })
        .collect()
}

pub fn log_growth_check(aef: &ApproxEigenfunction, probes: &[f64]) -> Result<LogGrowth> {
    let samples = probes
        .iter()
        .map(|&x| Ok((x, aef.log_value(x)? / x)))
        .collect::<Result<Vec<_>>>()?;
    let decaying = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) if samples.len() >= 2 => b.1.abs() < 0.5 * a.1.abs(),
        _ => false,
    };
    Ok(LogGrowth { samples, decaying })
}

/// CSV with columns `x,r,log_growth`; skipped residuals are left empty.
pub fn write_residual_csv<W: Write>(
    mut out: W,
    residuals: &[ResidualSample],
    growth: &LogGrowth,
) -> io::Result<()> {
    writeln!(out, "x,r,log_growth")?;
    for (r, g) in residuals.iter().zip(&growth.samples) {
        match r.residual {
            Some(v) => writeln!(out, "{},{},{}", r.x, v, g.1)?,
            None => writeln!(out, "{},,{}", r.x, g.1)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_space;
    use proptest::prelude::*;

    fn cosine() -> PeriodicProfile {
        PeriodicProfile::cosine(2.0, 1.0).unwrap()
    }

    fn two_value() -> PeriodicProfile {
        PeriodicProfile::two_value(4.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn constant_profile_is_rejected() {
        let c = PeriodicProfile::constant(1.0).unwrap();
        assert!(matches!(build_corrector(&c, 1.0), Err(Error::DegenerateProfile(_))));
    }

    #[test]
    fn tiny_amplitude_gives_nearly_flat_corrector() {
        let p = PeriodicProfile::cosine(1.0, 1e-8).unwrap();
        let c = build_corrector(&p, 1.0).unwrap();
        assert!(c.sup_norm(1000) <= 1e-4);
        assert!((c.h() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn two_value_kink_at_three_quarters() {
        let c = build_corrector(&two_value(), 0.0).unwrap();
        assert!((c.kink().unwrap() - 0.75).abs() < 1e-10);
        assert!(hj_residual(&c, 1000).unwrap() < 1e-10);
        assert!(c.period_mismatch().abs() < 1e-9);
    }

    #[test]
    fn kink_derivatives_follow_branches() {
        let prof = cosine();
        let c = build_corrector(&prof, 0.3).unwrap();
        let x = c.kink().unwrap();
        let (l, r) = c.kink_derivatives().unwrap();
        let s = (prof.max() - prof.evaluate(x)).sqrt();
        assert!((l - (0.3 - s)).abs() < 1e-12);
        assert!((r - (0.3 + s)).abs() < 1e-12);
        assert!((c.derivative(x - 1e-9) - l).abs() < 1e-6);
        assert!((c.derivative(x + 1e-9) - r).abs() < 1e-6);
    }

    #[test]
    fn cosine_past_threshold() {
        let prof = cosine();
        let jm = j_of_k(&prof, 3.0).unwrap();
        let c = build_corrector(&prof, jm + 1.0).unwrap();
        assert!(c.kink().is_none());
        assert!(hj_residual(&c, 1000).unwrap() <= 1e-8);
        assert!(c.period_mismatch().abs() <= 1e-9);
    }

    #[test]
    fn reflection_symmetry() {
        let prof = cosine();
        for p in [0.4, 2.5] {
            let a = build_corrector(&prof, p).unwrap();
            let b = build_corrector(&prof, -p).unwrap();
            let ra = hj_residual(&a, 500).unwrap();
            let rb = hj_residual(&b, 500).unwrap();
            assert!((ra - rb).abs() < 1e-12);
            assert_eq!(a.h(), b.h());
        }
    }

    #[test]
    fn second_derivative_matches_difference_of_first() {
        let prof = cosine();
        for p in [-3.0, 0.2, 3.0] {
            let c = build_corrector(&prof, p).unwrap();
            for y in [0.1, 0.33, 0.6, 0.9] {
                if c.kink_distance(y).is_some_and(|d| d < 1e-3) {
                    continue;
                }
                let h = 1e-5;
                let fd = (c.derivative(y + h) - c.derivative(y - h)) / (2.0 * h);
                assert!((fd - c.second_derivative(y)).abs() < 1e-4, "p={p} y={y}");
            }
        }
    }

    #[test]
    fn expanded_residual_matches_direct_operator() {
        let prof = cosine();
        let jm = j_of_k(&prof, 3.0).unwrap();
        let phase = PhaseMap::power(0.5).unwrap();
        for p in [0.3, jm + 0.7] {
            let aef = ApproxEigenfunction::new(build_corrector(&prof, p).unwrap(), phase.clone());
            for x in [150.0, 777.0, 5000.0] {
                let Some(r) = aef.residual(x).unwrap() else { continue };
                let d = aef.log_derivative(x).unwrap();
                let dd = aef.log_second_derivative(x).unwrap();
                // phi_p'' / phi_p = (ln phi_p)'' + ((ln phi_p)')^2
                let direct = dd + d * d - 2.0 * p * d + p * p + prof.evaluate(phase.value(x))
                    - aef.corrector().h();
                assert!((r - direct).abs() < 1e-9 * (1.0 + direct.abs()), "{r} vs {direct}");
            }
        }
    }

    #[test]
    fn log_derivative_matches_difference() {
        let prof = cosine();
        let phase = PhaseMap::power(0.5).unwrap();
        let aef = ApproxEigenfunction::new(build_corrector(&prof, 3.0).unwrap(), phase);
        for x in [200.0, 3000.0] {
            let h = 1e-4;
            let fd = (aef.log_value(x + h).unwrap() - aef.log_value(x - h).unwrap()) / (2.0 * h);
            assert!((fd - aef.log_derivative(x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn affine_residual_collapses_to_second_derivative() {
        let prof = cosine();
        for l in [5.0, 50.0] {
            let phase = PhaseMap::affine(l).unwrap();
            let c = build_corrector(&prof, 3.0).unwrap();
            let aef = ApproxEigenfunction::new(c.clone(), phase);
            let x = 12.3;
            let r = aef.residual(x).unwrap().unwrap();
            assert!((r - c.second_derivative(x / l) / l).abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneous_residual_vanishes() {
        let c = Corrector::homogeneous(1.0, 0.7).unwrap();
        let aef = ApproxEigenfunction::new(c, PhaseMap::power(0.5).unwrap());
        for x in [10.0, 1e3, 1e5] {
            assert!(aef.residual(x).unwrap().unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn power_phase_residual_and_log_growth_decay() {
        let prof = cosine();
        let jm = j_of_k(&prof, 3.0).unwrap();
        let aef = ApproxEigenfunction::new(
            build_corrector(&prof, jm + 1.0).unwrap(),
            PhaseMap::power(0.5).unwrap(),
        );
        let r = |x: f64| aef.residual(x).unwrap().unwrap().abs();
        assert!(r(1e4) < r(1e2));
        // same phase fraction at both probes, so the ratio is sqrt(x2 / x1)
        let (x1, x2) = (10.25f64.powi(2), 100.25f64.powi(2));
        let g = log_growth_check(&aef, &[x1, x2]).unwrap();
        assert!(g.decaying);
        let ratio = g.samples[0].1 / g.samples[1].1;
        assert!((ratio - 100.25 / 10.25).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn probes_below_validity_are_rejected() {
        let aef = ApproxEigenfunction::new(
            build_corrector(&cosine(), 3.0).unwrap(),
            PhaseMap::log_power(0.5, 1.0).unwrap(),
        );
        assert!(matches!(aef.residual(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_has_expected_columns() {
        let aef = ApproxEigenfunction::new(
            build_corrector(&cosine(), 3.0).unwrap(),
            PhaseMap::power(0.5).unwrap(),
        );
        let probes = log_space(10.0, 1e4, 5);
        let res = eigen_residual_profile(&aef, &probes).unwrap();
        let growth = log_growth_check(&aef, &probes).unwrap();
        let mut buf = Vec::new();
        write_residual_csv(&mut buf, &res, &growth).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,r,log_growth\n"));
        assert_eq!(text.lines().count(), 6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn periodic_on_both_branches(t in -3.0f64..3.0) {
            for prof in [cosine(), two_value()] {
                let jm = j_of_k(&prof, prof.max()).unwrap();
                let c = build_corrector(&prof, t * jm).unwrap();
                prop_assert!(c.period_mismatch().abs() <= 1e-9);
                prop_assert!(hj_residual(&c, 400).unwrap() <= 1e-8);
            }
        }

        #[test]
        fn kink_function_is_decreasing(p in -0.8f64..0.8, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let prof = cosine();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(kink_function(&prof, p, lo) >= kink_function(&prof, p, hi) - 1e-12);
        }
    }
}
