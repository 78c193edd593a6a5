use std::f64::consts::PI;

use holowdm::config::ExperimentConfig;
use holowdm::quadrature::{integrate, QuadOptions};
use holowdm::scattering::{acf, acf_quadrature, psd, psf_density, Cluster, ScatteringSpec};
use holowdm::specfun::bessel_j0;
use holowdm::wavenumber::{angular_partition, build_grid, variance_profile, PhysicalConfig, Side};

const LAMBDA: f64 = 0.01;

fn k() -> f64 {
    2.0 * PI / LAMBDA
}

#[test]
fn isotropic_quadrature_is_j0() {
    let iso = ScatteringSpec::isotropic();
    for i in 0..200 {
        let r = 10.0 * LAMBDA * i as f64 / 199.0;
        let g = acf_quadrature(&iso, k(), r).unwrap();
        assert!((g.re - bessel_j0(k() * r).unwrap()).abs() < 1e-8, "r = {r}");
        assert!(g.im.abs() < 1e-8);
    }
}

#[test]
fn psd_and_acf_are_a_fourier_pair() {
    // (1/2π) ∫ S(k_x) e^{j k_x r} dk_x with k_x = k cos θ removes the 1/γ singularity
    let spec = ExperimentConfig::default().scattering_r;
    for r in [0.0, 0.3 * LAMBDA, 1.7 * LAMBDA, 4.0 * LAMBDA] {
        let opts = QuadOptions::default().with_panels(256);
        let kk = k();
        let s = |t: f64| psd(&spec, kk, kk * t.cos()).unwrap() * kk * t.sin() / (2.0 * PI);
        let re = integrate(|t| s(t) * (kk * r * t.cos()).cos(), 1e-6, PI - 1e-6, opts).unwrap();
        let im = integrate(|t| s(t) * (kk * r * t.cos()).sin(), 1e-6, PI - 1e-6, opts).unwrap();
        let g = acf(&spec, kk, r).unwrap();
        assert!((g.re - re).abs() < 1e-8 && (g.im - im).abs() < 1e-8, "r = {r}: {g} vs {re}+{im}j");
    }
}

#[test]
fn mixture_density_properties() {
    let spec = ExperimentConfig::default().scattering_r;
    let mass = spec.forward_mass().unwrap();
    assert!(mass > 0.999 && mass <= 1.0 + 1e-12);
    assert!(psf_density(&spec, PI).is_err());
    assert!(psf_density(&spec, -1e-9).is_err());
    let c = Cluster::new(1.0, 0.5, 0.2).unwrap();
    let single = ScatteringSpec::mixture(vec![c.clone()]).unwrap();
    assert_eq!(psf_density(&single, 0.9).unwrap(), c.density(0.9));
    assert!(psd(&single, k(), 1.01 * k()).unwrap() == 0.0);
    assert!(psd(&single, k(), k()).unwrap().is_infinite());
}

#[test]
fn partitions_tile_the_half_plane() {
    for ratio in [1.0, 3.0, 4.0, 17.0, 128.0] {
        let cfg = PhysicalConfig::from_ratios(LAMBDA, ratio, ratio, 1.0).unwrap();
        let grid = build_grid(&cfg, Side::Receiver);
        assert_eq!(grid.len(), (2.0 * ratio) as usize);
        let total: f64 = grid
            .indices()
            .iter()
            .map(|&n| {
                let (lo, hi) = angular_partition(&cfg, Side::Receiver, n).unwrap();
                assert!(lo <= hi);
                hi - lo
            })
            .sum();
        assert!((total - PI).abs() < 1e-12, "ratio {ratio}: {total}");
    }
}

#[test]
fn reference_mixture_profile_is_sparse() {
    let cfg = ExperimentConfig::default();
    let spec = cfg.scattering_r.clone();
    let raw = variance_profile(&cfg.physical, &spec, Side::Receiver, false).unwrap();
    assert_eq!(raw.len(), 256);
    assert!((raw.total() - spec.forward_mass().unwrap()).abs() < 1e-9);
    let p = raw.normalized().unwrap();
    assert!((p.total() - 1.0).abs() < 1e-10);
    let significant = p.variances().iter().filter(|v| **v > 1e-6).count();
    assert!(significant < 128, "{significant}");

    let iso = variance_profile(&cfg.physical, &ScatteringSpec::isotropic(), Side::Receiver, false).unwrap();
    assert!((iso.total() - 1.0).abs() < 1e-10);
}
