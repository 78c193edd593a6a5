use std::f64::consts::PI;

use holowdm::specfun::{
    bessel_i0, bessel_i0e, bessel_i1, bessel_i1e, bessel_j0, bessel_ratio_i1_i0, circular_variance, solve_concentration,
};
use proptest::prelude::*;

/// e^{-x} I_ν(x), ν ∈ {0, 1}, summed term by term from the power series for
/// every x, with the exponential folded into the first term.
fn series_scaled(nu: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = (-x).exp() * if nu == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term < 1e-18 * sum && k > 0.5 * x {
            return sum;
        }
        k += 1.0;
    }
}

/// J0 by the periodic trapezoid rule on (1/π) ∫₀^π cos(x sin t) dt, which
/// converges geometrically once the node count exceeds |x|/2.
fn j0_trapezoid(x: f64) -> f64 {
    let n = x.abs().ceil() as usize + 64;
    let h = PI / n as f64;
    (0..n).map(|i| (x * (i as f64 * h).sin()).cos()).sum::<f64>() / n as f64
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

#[test]
fn i0_i1_match_power_series() {
    for x in log_grid(1e-6, 700.0, 400) {
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(bessel_i0e(x).unwrap(), series_scaled(0, x)) < 1e-12, "I0e({x})");
        assert!(rel(bessel_i1e(x).unwrap(), series_scaled(1, x)) < 1e-12, "I1e({x})");
        assert!(rel(bessel_i0(x).unwrap(), series_scaled(0, x) * x.exp()) < 1e-12, "I0({x})");
        assert!(rel(bessel_i1(x).unwrap(), series_scaled(1, x) * x.exp()) < 1e-12, "I1({x})");
    }
    assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
    assert_eq!(bessel_i1(0.0).unwrap(), 0.0);
}

#[test]
fn ratio_large_argument_asymptote() {
    for a in log_grid(1e4, 1e8, 30) {
        let oracle = 1.0 - 1.0 / (2.0 * a) - 1.0 / (8.0 * a * a) - 1.0 / (8.0 * a * a * a);
        assert!(((bessel_ratio_i1_i0(a).unwrap() - oracle) / oracle).abs() < 1e-12, "{a}");
    }
}

#[test]
fn j0_matches_trapezoid() {
    for x in log_grid(1e-6, 1e4, 300) {
        let oracle = j0_trapezoid(x);
        assert!((bessel_j0(x).unwrap() - oracle).abs() < 1e-10, "J0({x})");
        assert_eq!(bessel_j0(-x).unwrap(), bessel_j0(x).unwrap());
    }
    assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
}

#[test]
fn concentration_round_trip_grid() {
    for nu_sq in log_grid(1e-4, 1.0, 200) {
        let alpha = solve_concentration(nu_sq).unwrap();
        assert!((circular_variance(alpha).unwrap() - nu_sq).abs() <= 1e-10, "{nu_sq}");
    }
    assert_eq!(solve_concentration(1.0).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn i0_at_least_one(x in 0.0f64..700.0) {
        prop_assert!(bessel_i0(x).unwrap() >= 1.0);
    }

    #[test]
    fn ratio_in_unit_interval_and_increasing(a in 0.0f64..1e5, da in 1e-3f64..10.0) {
        let r0 = bessel_ratio_i1_i0(a).unwrap();
        let r1 = bessel_ratio_i1_i0(a + da).unwrap();
        prop_assert!((0.0..1.0).contains(&r0));
        prop_assert!(r1 >= r0);
    }

    #[test]
    fn concentration_round_trip(log_nu in -9.2f64..0.0) {
        let nu_sq = log_nu.exp();
        let alpha = solve_concentration(nu_sq).unwrap();
        prop_assert!((circular_variance(alpha).unwrap() - nu_sq).abs() <= 1e-10);
    }

    #[test]
    fn j0_even_and_bounded(x in -1e4f64..1e4) {
        let v = bessel_j0(x).unwrap();
        prop_assert_eq!(v, bessel_j0(-x).unwrap());
        prop_assert!(v.abs() <= 1.0);
    }
}
