//! Power spectral factors (PSF) of the scattering environment and the
//! autocorrelation function (ACF) / power spectral density (PSD) they induce.
//!
//! The normalized PSF `Ã²(θ)` is either the isotropic constant `1/π` on the
//! forward half-plane `θ ∈ [0, π)`, or a weighted mixture of 2D von Mises
//! densities. The unnormalized factor used in the ACF and PSD is
//! `A²(θ) = 2π Ã²(θ)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::quadrature::{integrate, integrate_complex, QuadOptions};
use crate::specfun::{bessel_i0e, bessel_j0, circular_variance, solve_concentration};

/// Tolerance on the mixture weight sum accepted by [`ScatteringSpec::mixture`].
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// One von Mises scattering cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    weight: f64,
    mean_angle: f64,
    circ_variance: f64,
    concentration: f64,
    // 1 / (2π e^{-α} I0(α))
    scaled_norm: f64,
}

impl Cluster {
    /// Builds a cluster from its circular variance, solving for the concentration.
    pub fn new(weight: f64, mean_angle: f64, circ_variance: f64) -> Result<Self> {
        let alpha = solve_concentration(circ_variance)?;
        Self::build(weight, mean_angle, circ_variance, alpha)
    }

    /// Builds a cluster directly from its concentration `alpha >= 0`.
    pub fn with_concentration(weight: f64, mean_angle: f64, alpha: f64) -> Result<Self> {
        let nu_sq = circular_variance(alpha)?;
        Self::build(weight, mean_angle, nu_sq, alpha)
    }

    fn build(weight: f64, mean_angle: f64, circ_variance: f64, alpha: f64) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(domain(format!("cluster weight {weight} must be positive")));
        }
        if !(0.0..PI).contains(&mean_angle) {
            return Err(domain(format!("cluster mean angle {mean_angle} outside [0, π)")));
        }
        let scaled_norm = 1.0 / (2.0 * PI * bessel_i0e(alpha)?);
        Ok(Self {
            weight,
            mean_angle,
            circ_variance,
            concentration: alpha,
            scaled_norm,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean_angle(&self) -> f64 {
        self.mean_angle
    }

    pub fn circ_variance(&self) -> f64 {
        self.circ_variance
    }

    pub fn concentration(&self) -> f64 {
        self.concentration
    }

    /// Unweighted von Mises density `exp(α cos(θ − θ̄)) / (2π I0(α))`.
    pub fn density(&self, theta: f64) -> f64 {
        let a = self.concentration;
        (a * ((theta - self.mean_angle).cos() - 1.0)).exp() * self.scaled_norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatteringKind {
    Isotropic,
    Mixture,
}

/// Angular scattering model; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSpec {
    kind: ScatteringKind,
    clusters: Vec<Cluster>,
}

impl ScatteringSpec {
    pub fn isotropic() -> Self {
        Self {
            kind: ScatteringKind::Isotropic,
            clusters: Vec::new(),
        }
    }

    /// A von Mises mixture. Weights must sum to one within
    /// [`WEIGHT_SUM_TOL`] and are then rescaled to sum to one exactly.
    pub fn mixture(mut clusters: Vec<Cluster>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(domain("a scattering mixture needs at least one cluster"));
        }
        let total: f64 = clusters.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(domain(format!("mixture weights sum to {total}, expected 1")));
        }
        for c in &mut clusters {
            c.weight /= total;
        }
        Ok(Self {
            kind: ScatteringKind::Mixture,
            clusters,
        })
    }

    pub fn kind(&self) -> ScatteringKind {
        self.kind
    }

    pub fn is_isotropic(&self) -> bool {
        self.kind == ScatteringKind::Isotropic
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// `Ã²(θ)` without the domain check; valid on the closed interval `[0, π]`.
    pub(crate) fn density(&self, theta: f64) -> f64 {
        match self.kind {
            ScatteringKind::Isotropic => 1.0 / PI,
            ScatteringKind::Mixture => self
                .clusters
                .iter()
                .map(|c| c.weight * c.density(theta))
                .sum(),
        }
    }

    /// Mass of `Ã²` over the forward half-plane `[0, π]`. Equals one for the
    /// isotropic model; mixtures lose whatever falls on `(-π, 0)`.
    pub fn forward_mass(&self) -> Result<f64> {
        if self.is_isotropic() {
            return Ok(1.0);
        }
        integrate(|t| self.density(t), 0.0, PI, QuadOptions::default().with_panels(256))
    }
}

/// Normalized PSF `Ã²(θ)` for `θ ∈ [0, π)`.
pub fn psf_density(spec: &ScatteringSpec, theta: f64) -> Result<f64> {
    if !(0.0..PI).contains(&theta) {
        return Err(domain(format!("psf_density: θ = {theta} outside [0, π)")));
    }
    Ok(spec.density(theta))
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !k.is_finite() || k <= 0.0 {
        return Err(domain(format!("wavenumber k = {k} must be positive and finite")));
    }
    Ok(())
}

/// Spatial autocorrelation `Γ(r_x) = ∫₀^π Ã²(θ) e^{j k r_x cos θ} dθ`.
///
/// Isotropic scattering short-circuits to the closed form `J0(k r_x)`; use
/// [`acf_quadrature`] to force numerical integration.
pub fn acf(spec: &ScatteringSpec, k: f64, r_x: f64) -> Result<Complex64> {
    check_wavenumber(k)?;
    if !r_x.is_finite() {
        return Err(domain(format!("acf: non-finite lag {r_x}")));
    }
    if spec.is_isotropic() {
        return Ok(Complex64::new(bessel_j0(k * r_x)?, 0.0));
    }
    acf_quadrature(spec, k, r_x)
}

/// [`acf`] evaluated by adaptive quadrature for every scattering kind.
pub fn acf_quadrature(spec: &ScatteringSpec, k: f64, r_x: f64) -> Result<Complex64> {
    check_wavenumber(k)?;
    if !r_x.is_finite() {
        return Err(domain(format!("acf: non-finite lag {r_x}")));
    }
    let phase = k * r_x;
    // enough panels to resolve both the oscillation and the narrowest cluster
    let panels = 64usize.max((phase.abs() / PI).ceil() as usize * 4);
    integrate_complex(
        |t| Complex64::from_polar(spec.density(t), phase * t.cos()),
        0.0,
        PI,
        QuadOptions::default().with_panels(panels),
    )
}

/// Power spectral density `S(k_x) = A²(arccos(k_x/k)) / √(k² − k_x²)` on the
/// visible region `|k_x| < k`.
///
/// Returns 0 outside the visible region and `f64::INFINITY` at `|k_x| = k`,
/// where the dispersion factor vanishes; integrate in angle, not in `k_x`,
/// across that point.
pub fn psd(spec: &ScatteringSpec, k: f64, k_x: f64) -> Result<f64> {
    check_wavenumber(k)?;
    if !k_x.is_finite() {
        return Err(domain(format!("psd: non-finite k_x {k_x}")));
    }
    let ax = k_x.abs();
    if ax > k {
        return Ok(0.0);
    }
    if ax == k {
        return Ok(f64::INFINITY);
    }
    let gamma = (k * k - k_x * k_x).sqrt();
    if spec.is_isotropic() {
        return Ok(2.0 / gamma);
    }
    let theta = (k_x / k).acos();
    Ok(2.0 * PI * spec.density(theta) / gamma)
}
