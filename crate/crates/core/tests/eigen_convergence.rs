use kpp_core::eigen::{convergence_table, principal_eigenvalue, w_l, PeriodicOperator};
use kpp_core::media::PeriodicProfile;

/// Two-value profile `(4, 1)` with `tanh` transitions of width `1/40`.
fn smoothed_two_value() -> PeriodicProfile {
    let n = 512;
    let values = (0..n)
        .map(|i| {
            let y = i as f64 / n as f64;
            let up = ((y - 0.0) * 40.0).tanh() - ((y - 0.5) * 40.0).tanh() + ((y - 1.0) * 40.0).tanh();
            2.5 + 1.5 * up.clamp(-1.0, 1.0)
        })
        .collect();
    PeriodicProfile::sampled(values).unwrap()
}

#[test]
fn cosine_gaps_decrease() {
    let prof = PeriodicProfile::cosine(2.0, 1.0).unwrap();
    let rows = convergence_table(&prof, &[5.0, 20.0, 80.0]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].gap < w[0].gap), "{rows:?}");
    for r in &rows {
        assert!(r.w_l >= 2.0 * prof.mean().sqrt() - 1e-9);
        assert!(r.w_l <= 2.0 * 3f64.sqrt());
    }
}

#[test]
fn smoothed_two_value_gaps_decrease() {
    let prof = smoothed_two_value();
    assert!(prof.min() < 1.01 && prof.max() > 3.99);
    let rows = convergence_table(&prof, &[5.0, 20.0, 80.0]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].gap < w[0].gap), "{rows:?}");
}

#[test]
fn constant_profile_has_no_gap() {
    let prof = PeriodicProfile::constant(2.0).unwrap();
    for r in convergence_table(&prof, &[5.0, 20.0]).unwrap() {
        assert!(r.gap <= 1e-6, "{r:?}");
    }
}

#[test]
fn eigenvalue_grid_self_convergence() {
    let prof = PeriodicProfile::cosine(2.0, 1.0).unwrap();
    let lambda = |n| {
        let op = PeriodicOperator::from_profile(&prof, 0.7, 5.0, n).unwrap();
        principal_eigenvalue(&op).unwrap().lambda
    };
    let (a, b, c) = (lambda(160), lambda(320), lambda(640));
    let ratio = (a - b) / (b - c);
    assert!((3.5..=4.5).contains(&ratio), "Richardson ratio {ratio}");
}

#[test]
fn p_zero_eigenvalue_lies_in_the_range_of_mu() {
    let prof = PeriodicProfile::cosine(2.0, 1.0).unwrap();
    let op = PeriodicOperator::from_profile(&prof, 0.0, 20.0, 640).unwrap();
    let lambda = principal_eigenvalue(&op).unwrap().lambda;
    assert!(lambda >= prof.mean() - 1e-9 && lambda <= prof.max());
}

#[test]
fn finite_period_speed_exceeds_the_mean_bound() {
    let prof = PeriodicProfile::two_value(4.0, 1.0, 0.5).unwrap();
    for l in [2.0, 10.0] {
        let s = w_l(&prof, l).unwrap();
        assert!(s.speed >= 2.0 * prof.mean().sqrt() - 1e-6, "{s:?}");
        assert!(s.speed <= 4.0);
    }
}
