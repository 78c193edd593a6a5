//! Wavenumber grids, the dispersion relation, angular partitions and the
//! per-index variance profiles of the angular-domain channel.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::scattering::ScatteringSpec;

/// Normalized lengths below this trigger a warning: the Fourier-series
/// channel model assumes apertures many wavelengths long.
pub const LARGE_APERTURE_RATIO: f64 = 8.0;

/// Geometry of the two parallel line apertures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConfig {
    lambda: f64,
    ratio_s: f64,
    ratio_r: f64,
    separation: f64,
}

/// Aperture side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Source,
    Receiver,
}

// L/λ values within 1e-9 (relative) of an integer are snapped to it, so that
// e.g. 1.28 m / 0.01 m counts as exactly 128 wavelengths.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

impl PhysicalConfig {
    /// Lengths in meters.
    pub fn new(lambda: f64, l_s: f64, l_r: f64, separation: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("wavelength {lambda} must be positive")));
        }
        Self::from_ratios(lambda, l_s / lambda, l_r / lambda, separation)
    }

    /// Lengths given in wavelengths.
    pub fn from_ratios(lambda: f64, l_s_over_lambda: f64, l_r_over_lambda: f64, separation: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("wavelength {lambda} must be positive")));
        }
        for (name, v) in [("L_s", l_s_over_lambda), ("L_r", l_r_over_lambda)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name}/λ = {v} must be positive")));
            }
            if v < LARGE_APERTURE_RATIO {
                log::warn!("{name}/λ = {v} is small; the Fourier-series channel model assumes L/λ >> 1");
            }
        }
        if !(separation >= 0.0) || !separation.is_finite() {
            return Err(domain(format!("separation {separation} must be >= 0")));
        }
        Ok(Self {
            lambda,
            ratio_s: snap(l_s_over_lambda),
            ratio_r: snap(l_r_over_lambda),
            separation,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Wavenumber `k = κ = 2π/λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda
    }

    /// Separation `d` between the apertures. The NLoS statistics do not depend on it.
    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// `L/λ` for one side.
    pub fn ratio(&self, side: Side) -> f64 {
        match side {
            Side::Source => self.ratio_s,
            Side::Receiver => self.ratio_r,
        }
    }

    /// Aperture length in meters.
    pub fn length(&self, side: Side) -> f64 {
        self.ratio(side) * self.lambda
    }

    /// Grid cardinality `⌊2L/λ⌋`.
    pub fn cardinality(&self, side: Side) -> usize {
        (2.0 * self.ratio(side)).floor() as usize
    }

    fn lowest_index(&self, side: Side) -> i64 {
        -(self.ratio(side).floor() as i64)
    }
}

/// Dispersion relation `γ(k_x) = √(k² − k_x²)` on the visible region.
pub fn gamma(k: f64, k_x: f64) -> Result<f64> {
    if !k.is_finite() || !k_x.is_finite() || k <= 0.0 {
        return Err(domain(format!("gamma: invalid arguments k = {k}, k_x = {k_x}")));
    }
    if k_x.abs() > k {
        return Err(domain(format!("gamma: |k_x| = {} exceeds k = {k} (evanescent)", k_x.abs())));
    }
    Ok((k * k - k_x * k_x).max(0.0).sqrt())
}

/// Set of wavenumber indices on one side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavenumberGrid {
    side: Side,
    indices: Vec<i64>,
}

impl WavenumberGrid {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, m: i64) -> bool {
        match (self.indices.first(), self.indices.last()) {
            (Some(&lo), Some(&hi)) => (lo..=hi).contains(&m),
            _ => false,
        }
    }
}

/// Builds the index set on one side.
///
/// The candidates are the integers with `|2πm/L| ≤ k`, i.e. `|m| ≤ L/λ`; the
/// grid keeps the `⌊2L/λ⌋` of smallest magnitude, dropping the top endpoint on
/// ties. For integer `L/λ` this is `{−L/λ, …, L/λ − 1}`.
pub fn build_grid(cfg: &PhysicalConfig, side: Side) -> WavenumberGrid {
    let lo = cfg.lowest_index(side);
    let n = cfg.cardinality(side) as i64;
    WavenumberGrid {
        side,
        indices: (lo..lo + n).collect(),
    }
}

/// Angular interval `[θ_lo, θ_hi]` of plane waves folded into index `n`:
/// `θ_lo = arccos(λ(n+1)/L)`, `θ_hi = arccos(λn/L)`, arguments clamped to `[−1, 1]`.
pub fn angular_partition(cfg: &PhysicalConfig, side: Side, n: i64) -> Result<(f64, f64)> {
    let lo = cfg.lowest_index(side);
    let count = cfg.cardinality(side) as i64;
    if n < lo || n >= lo + count {
        return Err(domain(format!(
            "index {n} outside the {side:?} grid [{lo}, {}]",
            lo + count - 1
        )));
    }
    Ok(partition_unchecked(cfg.ratio(side), n))
}

fn partition_unchecked(ratio: f64, n: i64) -> (f64, f64) {
    let arg = |m: i64| (m as f64 / ratio).clamp(-1.0, 1.0);
    (arg(n + 1).acos(), arg(n).acos())
}

/// Per-index variances `σ²(n)` of the angular-domain channel on one side.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    side: Side,
    indices: Vec<i64>,
    variances: Vec<f64>,
    normalized: bool,
}

/// Tolerance on the unit-sum check for normalized profiles.
pub const NORMALIZATION_TOL: f64 = 1e-10;

impl VarianceProfile {
    /// Builds a profile from explicit values, e.g. for synthetic tests.
    /// `normalized` is set when the values already sum to one.
    pub fn from_values(side: Side, indices: Vec<i64>, variances: Vec<f64>) -> Result<Self> {
        if indices.len() != variances.len() {
            return Err(domain("variance profile: index and value lengths differ"));
        }
        if variances.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(domain("variance profile: entries must be finite and >= 0"));
        }
        let total: f64 = variances.iter().sum();
        Ok(Self {
            side,
            indices,
            normalized: (total - 1.0).abs() <= NORMALIZATION_TOL,
            variances,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Sum of the entries, accumulated in index order.
    pub fn total(&self) -> f64 {
        self.variances.iter().sum()
    }

    /// Profile divided by its sum.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::Numeric("variance profile has zero total mass".into()));
        }
        Ok(Self {
            side: self.side,
            indices: self.indices.clone(),
            variances: self.variances.iter().map(|v| v / total).collect(),
            normalized: true,
        })
    }

    /// Entries sorted in decreasing order.
    pub fn sorted_descending(&self) -> Vec<f64> {
        let mut v = self.variances.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Scaled standard deviations `√L · σ(n)` for an aperture of length `length`.
    pub fn scaled_deviations(&self, length: f64) -> Vec<f64> {
        let s = length.sqrt();
        self.variances.iter().map(|v| s * v.sqrt()).collect()
    }
}

/// `σ²(n) = ∫_{T(n)} Ã²(θ) dθ` for every index of the grid on `side`.
///
/// Partitions are integrated independently (in parallel) and stored in index
/// order, so the result does not depend on scheduling. With `normalize` the
/// profile is divided by its sum.
pub fn variance_profile(
    cfg: &PhysicalConfig,
    spec: &ScatteringSpec,
    side: Side,
    normalize: bool,
) -> Result<VarianceProfile> {
    let grid = build_grid(cfg, side);
    let ratio = cfg.ratio(side);
    let opts = QuadOptions::default().with_panels(4);
    let variances = grid
        .indices()
        .par_iter()
        .map(|&n| {
            let (lo, hi) = partition_unchecked(ratio, n);
            integrate(|t| spec.density(t), lo, hi, opts).map_err(|e| {
                Error::Numeric(format!("variance of index {n} ({side:?}): {e}"))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let profile = VarianceProfile {
        side,
        indices: grid.indices,
        variances,
        normalized: false,
    };
    if normalize {
        profile.normalized()
    } else {
        Ok(profile)
    }
}
