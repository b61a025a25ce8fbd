mod common;

use common::*;
use kpp_core::media::PeriodicProfile;
use kpp_core::numerics::log_space;
use kpp_core::theory::{h_of_p, j_of_k, limiting_speed, w_infinity};
use proptest::prelude::*;

fn cosine() -> PeriodicProfile {
    PeriodicProfile::cosine(2.0, 1.0).unwrap()
}

#[test]
fn elliptic_oracle_sanity() {
    assert!((elliptic_e(0.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    // E(1/2) = 1.3506438810476755...
    assert!((elliptic_e(0.5) - 1.350_643_881_047_675_5).abs() < 1e-14);
}

#[test]
fn cosine_j_matches_elliptic_closed_form() {
    let prof = cosine();
    for k in log_space(3.01, 300.0, 40) {
        let (got, want) = (j_of_k(&prof, k).unwrap(), cosine_j(k));
        assert!((got - want).abs() <= 1e-10 * want, "k={k}: {got} vs {want}");
    }
}

#[test]
fn two_value_j_matches_closed_form() {
    for theta in [0.1, 0.5, 0.9] {
        let prof = PeriodicProfile::two_value(4.0, 1.0, theta).unwrap();
        for k in log_space(4.0, 400.0, 30) {
            let (got, want) = (j_of_k(&prof, k).unwrap(), two_value_j(4.0, 1.0, theta, k));
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "theta={theta} k={k}");
        }
    }
}

#[test]
fn w_infinity_matches_brute_force() {
    for theta in [0.2, 0.5, 0.8] {
        let prof = PeriodicProfile::two_value(4.0, 1.0, theta).unwrap();
        let (w, k) = w_infinity(&prof).unwrap();
        let brute = brute_force_min(|k| two_value_j(4.0, 1.0, theta, k), 4.0, 40.0, 200_000);
        assert!((w - brute).abs() <= 1e-6 * brute, "theta={theta}");
        assert!((k / two_value_j(4.0, 1.0, theta, k) - w).abs() <= 1e-12 * w);
    }
    let (w, _) = w_infinity(&cosine()).unwrap();
    let brute = brute_force_min(cosine_j, 3.0 + 1e-3, 13.0, 200_000);
    assert!((w - brute).abs() <= 1e-6 * brute);
    assert!((w - 2.870_559_199).abs() < 1e-8);
}

#[test]
fn limiting_speed_lies_between_homogeneous_speeds() {
    for prof in [
        cosine(),
        PeriodicProfile::two_value(4.0, 1.0, 0.5).unwrap(),
        PeriodicProfile::sampled(vec![1.0, 3.0, 2.0, 5.0]).unwrap(),
    ] {
        let s = limiting_speed(&prof).unwrap();
        assert!(s.speed >= 2.0 * prof.mean().sqrt() - 1e-9);
        assert!(s.speed <= 2.0 * prof.max().sqrt() + 1e-9);
        assert!(!s.homogeneous);
    }
}

proptest! {
    #[test]
    fn h_inverts_the_elliptic_j(p in 0.95f64..20.0) {
        let k = h_of_p(&cosine(), p);
        prop_assert!((cosine_j(k) - p).abs() <= 1e-9 * p);
    }

    #[test]
    fn h_is_flat_below_j_of_max(p in -0.89f64..0.89) {
        prop_assert_eq!(h_of_p(&cosine(), p), 3.0);
    }
}
