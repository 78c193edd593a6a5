//! Degrees of freedom, water-filling power allocation and ergodic capacity.

use rayon::prelude::*;

use crate::channel::{draw_channel_stream, CorrelationModel, ModelKind};
use crate::dbw_to_watts;
use crate::error::{domain, Result};
use crate::linalg::{gram_smaller, hermitian_eigenvalues, CMatrix};
use crate::wavenumber::{VarianceProfile, NORMALIZATION_TOL};

pub use crate::linalg::{hermitian_eigs, HermitianEigen};

/// Degrees of freedom and the per-side prefix counts behind them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoFResult {
    pub dof: usize,
    pub n_s_prime: usize,
    pub n_r_prime: usize,
    pub epsilon: f64,
}

/// Smallest number of leading entries of `sorted_desc` whose sum reaches `1 − ε`.
pub fn energy_prefix_count(sorted_desc: &[f64], epsilon: f64) -> usize {
    let target = 1.0 - epsilon;
    let mut acc = 0.0;
    for (i, v) in sorted_desc.iter().enumerate() {
        acc += v;
        if acc >= target {
            return i + 1;
        }
    }
    sorted_desc.len()
}

/// Degrees of freedom of the WDM channel.
///
/// Isotropic scattering gives `min(n_s, n_r)`. Otherwise each side counts the
/// fewest strongest indices holding `1 − ε` of its (unit) variance mass, and
/// the DoF is the smaller of the two counts.
pub fn dof(profile_s: &VarianceProfile, profile_r: &VarianceProfile, epsilon: f64, isotropic: bool) -> Result<DoFResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon {epsilon} must lie in (0, 1)")));
    }
    for p in [profile_s, profile_r] {
        if (p.total() - 1.0).abs() > NORMALIZATION_TOL {
            return Err(domain(format!(
                "{:?} profile sums to {}, expected a normalized profile",
                p.side(),
                p.total()
            )));
        }
    }
    let (n_s, n_r) = (profile_s.len(), profile_r.len());
    if isotropic {
        return Ok(DoFResult {
            dof: n_s.min(n_r),
            n_s_prime: n_s,
            n_r_prime: n_r,
            epsilon,
        });
    }
    let n_s_prime = energy_prefix_count(&profile_s.sorted_descending(), epsilon);
    let n_r_prime = energy_prefix_count(&profile_r.sorted_descending(), epsilon);
    Ok(DoFResult {
        dof: n_s_prime.min(n_r_prime),
        n_s_prime,
        n_r_prime,
        epsilon,
    })
}

/// Water-filling solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// Power per eigenmode, in the order the eigenvalues were given.
    pub powers: Vec<f64>,
    /// Water level `μ`; active modes satisfy `P_i + χ²/ϱ_i = μ`.
    pub water_level: f64,
}

/// Water-filling `P_i = max(0, μ − χ²/ϱ_i)` with `Σ P_i = total_power`.
///
/// The eigenvalues may come in any order. The active set is always a prefix of
/// the modes sorted by decreasing gain, so its size is found by bisection over
/// the sorted breakpoints `χ²/ϱ_i` and `μ` then follows in closed form.
pub fn waterfill(eigenvalues: &[f64], total_power: f64, noise_var: f64) -> Result<Allocation> {
    if !(total_power > 0.0) || !total_power.is_finite() {
        return Err(domain(format!("total power {total_power} must be positive")));
    }
    if !(noise_var > 0.0) || !noise_var.is_finite() {
        return Err(domain(format!("noise variance {noise_var} must be positive")));
    }
    if eigenvalues.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(domain("eigenvalues must be finite and >= 0"));
    }
    let mut order: Vec<usize> = (0..eigenvalues.len()).filter(|&i| eigenvalues[i] > 0.0).collect();
    if order.is_empty() {
        return Err(domain("water-filling needs at least one positive eigenvalue"));
    }
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]).then(a.cmp(&b)));
    let floors: Vec<f64> = order.iter().map(|&i| noise_var / eigenvalues[i]).collect();
    let mut prefix = Vec::with_capacity(floors.len() + 1);
    prefix.push(0.0);
    for f in &floors {
        prefix.push(prefix.last().unwrap() + f);
    }
    let level = |k: usize| (total_power + prefix[k]) / k as f64;

    // largest k with level(k) > floors[k-1]; k = 1 always qualifies
    let (mut lo, mut hi) = (1usize, floors.len());
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if level(mid) > floors[mid - 1] {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let mu = level(lo);
    let mut powers = vec![0.0; eigenvalues.len()];
    for (rank, &i) in order.iter().enumerate().take(lo) {
        powers[i] = (mu - floors[rank]).max(0.0);
    }
    Ok(Allocation { powers, water_level: mu })
}

/// `Σ_i log2(1 + P_i ϱ_i / χ²)` under water-filling, for each total power in
/// `powers_watts`. A channel without any positive eigenvalue has zero capacity.
pub fn capacity_for_eigenvalues(eigenvalues: &[f64], powers_watts: &[f64], noise_var: f64) -> Result<Vec<f64>> {
    let clamped: Vec<f64> = eigenvalues.iter().map(|v| v.max(0.0)).collect();
    if clamped.iter().all(|v| *v == 0.0) {
        return Ok(vec![0.0; powers_watts.len()]);
    }
    powers_watts
        .iter()
        .map(|&p| {
            let alloc = waterfill(&clamped, p, noise_var)?;
            Ok(alloc
                .powers
                .iter()
                .zip(&clamped)
                .map(|(pi, g)| (1.0 + pi * g / noise_var).log2())
                .sum())
        })
        .collect()
}

/// Capacity of one channel matrix at each total power.
pub fn capacity_for_channel(h: &CMatrix, powers_watts: &[f64], noise_var: f64) -> Result<Vec<f64>> {
    let eig = hermitian_eigenvalues(&gram_smaller(h))?;
    capacity_for_eigenvalues(&eig, powers_watts, noise_var)
}

/// Realization-averaged capacity curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub power_grid_dbw: Vec<f64>,
    /// Mean capacity in bit/s/Hz at each grid point.
    pub capacity_bits: Vec<f64>,
    pub realizations: usize,
    pub kind: ModelKind,
}

/// Ergodic capacity with per-realization water-filling over all
/// `min(n_s, n_r)` eigenmodes of `H H^H`.
///
/// Realization `r` draws its channel from stream `r` of `base_seed`;
/// realizations run in parallel and are averaged in index order, so the result
/// does not depend on the thread count.
pub fn ergodic_capacity(
    model: &CorrelationModel,
    power_grid_dbw: &[f64],
    noise_var: f64,
    realizations: usize,
    base_seed: u64,
) -> Result<CapacityResult> {
    if realizations == 0 {
        return Err(domain("at least one realization is required"));
    }
    if power_grid_dbw.iter().any(|p| !p.is_finite()) {
        return Err(domain("power grid must be finite"));
    }
    let powers: Vec<f64> = power_grid_dbw.iter().map(|&p| dbw_to_watts(p)).collect();
    let per_draw = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let ch = draw_channel_stream(model, base_seed, r);
            capacity_for_channel(&ch.h, &powers, noise_var)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mean = vec![0.0; powers.len()];
    for caps in &per_draw {
        for (m, c) in mean.iter_mut().zip(caps) {
            *m += c;
        }
    }
    for m in &mut mean {
        *m /= realizations as f64;
    }
    Ok(CapacityResult {
        power_grid_dbw: power_grid_dbw.to_vec(),
        capacity_bits: mean,
        realizations,
        kind: model.kind(),
    })
}
