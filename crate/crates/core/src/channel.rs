//! Correlation models, channel synthesis and the discrete link.
//!
//! Every model is separable: `E[vec(H) vec(H)^H] = R_s ⊗ R_r`, and a channel is
//! drawn as `H = R_r^{1/2} W R_s^{1/2}` with `W` i.i.d. `CN(0, 1)`.
//!
//! Unless the raw scaling is requested, correlation matrices are normalized to
//! `tr(R_s) = n_s` and `tr(R_r) = n_r`, so `E[‖H‖²_F] = n_s n_r` for every
//! model and capacities are comparable across models.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};
use crate::linalg::{check_hermitian, from_real_diagonal, hermitian_sqrt, identity, trace, CMatrix};
use crate::specfun::bessel_j0;
use crate::wavenumber::{PhysicalConfig, Side, VarianceProfile};

/// RNG stream reserved for receiver noise in [`simulate_link`].
pub const NOISE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Diagonal correlation from the wavenumber-domain variance profiles.
    Wdm,
    /// λ/2-sampled aperture with the Jakes correlation `J0(k Δx)`.
    JakesSampled,
    IidRayleigh,
}

/// How correlation matrices are scaled after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationScaling {
    /// `tr(R_s) = n_s`, `tr(R_r) = n_r`.
    TraceNormalized,
    /// No rescaling; for WDM this keeps the `L σ²(·)` entries.
    Raw,
}

/// Source/receiver correlation matrices and their Hermitian square roots.
#[derive(Debug, Clone)]
pub struct CorrelationModel {
    kind: ModelKind,
    r_s: CMatrix,
    r_r: CMatrix,
    r_s_sqrt: CMatrix,
    r_r_sqrt: CMatrix,
    s_diagonal: bool,
    r_diagonal: bool,
}

fn is_diagonal(m: &CMatrix) -> bool {
    m.indexed_iter().all(|((i, j), z)| i == j || *z == Complex64::new(0.0, 0.0))
}

fn normalize_trace(m: &mut CMatrix) -> Result<()> {
    let n = m.nrows() as f64;
    let tr = trace(m).re;
    if !(tr > 0.0) {
        return Err(domain("correlation matrix has non-positive trace"));
    }
    m.mapv_inplace(|z| z * (n / tr));
    Ok(())
}

fn side_sqrt(m: &CMatrix, diagonal: bool) -> Result<CMatrix> {
    if diagonal {
        let d: Vec<f64> = m.diag().iter().map(|z| z.re.max(0.0).sqrt()).collect();
        Ok(from_real_diagonal(&d))
    } else {
        hermitian_sqrt(m)
    }
}

impl CorrelationModel {
    /// Builds a model from explicit Hermitian PSD matrices.
    pub fn from_matrices(kind: ModelKind, mut r_s: CMatrix, mut r_r: CMatrix, scaling: CorrelationScaling) -> Result<Self> {
        check_hermitian(&r_s)?;
        check_hermitian(&r_r)?;
        if r_s.nrows() == 0 || r_r.nrows() == 0 {
            return Err(domain("correlation matrices must be at least 1x1"));
        }
        if scaling == CorrelationScaling::TraceNormalized {
            normalize_trace(&mut r_s)?;
            normalize_trace(&mut r_r)?;
        }
        let s_diagonal = is_diagonal(&r_s);
        let r_diagonal = is_diagonal(&r_r);
        if s_diagonal && r_s.diag().iter().any(|z| z.re < 0.0) || r_diagonal && r_r.diag().iter().any(|z| z.re < 0.0) {
            return Err(domain("diagonal correlation has negative entries"));
        }
        let r_s_sqrt = side_sqrt(&r_s, s_diagonal)?;
        let r_r_sqrt = side_sqrt(&r_r, r_diagonal)?;
        Ok(Self {
            kind,
            r_s,
            r_r,
            r_s_sqrt,
            r_r_sqrt,
            s_diagonal,
            r_diagonal,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn r_s(&self) -> &CMatrix {
        &self.r_s
    }

    pub fn r_r(&self) -> &CMatrix {
        &self.r_r
    }

    pub fn r_s_sqrt(&self) -> &CMatrix {
        &self.r_s_sqrt
    }

    pub fn r_r_sqrt(&self) -> &CMatrix {
        &self.r_r_sqrt
    }

    pub fn n_s(&self) -> usize {
        self.r_s.nrows()
    }

    pub fn n_r(&self) -> usize {
        self.r_r.nrows()
    }

    pub fn correlation(&self, side: Side) -> &CMatrix {
        match side {
            Side::Source => &self.r_s,
            Side::Receiver => &self.r_r,
        }
    }

    /// Covariance of the column-stacked `vec(H)`, `R_sᵀ ⊗ R_r`. All built-in
    /// models have real symmetric `R_s`, where this is `R_s ⊗ R_r`.
    pub fn kronecker(&self) -> CMatrix {
        let (ns, nr) = (self.n_s(), self.n_r());
        let mut out = CMatrix::zeros((ns * nr, ns * nr));
        for m in 0..ns {
            for q in 0..ns {
                let s = self.r_s[[q, m]];
                if s == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for n in 0..nr {
                    for p in 0..nr {
                        out[[m * nr + n, q * nr + p]] = s * self.r_r[[n, p]];
                    }
                }
            }
        }
        out
    }
}

/// WDM correlation from the per-side variance profiles: `R = diag(L σ²(·))`,
/// trace-normalized.
pub fn build_wdm_correlation(
    cfg: &PhysicalConfig,
    profile_s: &VarianceProfile,
    profile_r: &VarianceProfile,
) -> Result<CorrelationModel> {
    build_wdm_correlation_with(cfg, profile_s, profile_r, CorrelationScaling::TraceNormalized)
}

pub fn build_wdm_correlation_with(
    cfg: &PhysicalConfig,
    profile_s: &VarianceProfile,
    profile_r: &VarianceProfile,
    scaling: CorrelationScaling,
) -> Result<CorrelationModel> {
    for (profile, side) in [(profile_s, Side::Source), (profile_r, Side::Receiver)] {
        if profile.len() != cfg.cardinality(side) {
            return Err(domain(format!(
                "{side:?} profile has {} entries, grid has {}",
                profile.len(),
                cfg.cardinality(side)
            )));
        }
    }
    let side_matrix = |p: &VarianceProfile, len: f64| {
        let sd = p.scaled_deviations(len);
        from_real_diagonal(&sd.iter().map(|s| s * s).collect::<Vec<_>>())
    };
    let r_s = side_matrix(profile_s, cfg.length(Side::Source));
    let r_r = side_matrix(profile_r, cfg.length(Side::Receiver));
    CorrelationModel::from_matrices(ModelKind::Wdm, r_s, r_r, scaling)
}

/// Toeplitz matrix `[R]_{ij} = J0(π (i − j))` of an `n`-point λ/2-spaced grid.
pub fn jakes_toeplitz(n: usize) -> Result<CMatrix> {
    let taps = (0..n)
        .map(|d| bessel_j0(std::f64::consts::PI * d as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_shape_fn((n, n), |(i, j)| Complex64::new(taps[i.abs_diff(j)], 0.0)))
}

/// Jakes model sampled at λ/2 over each aperture, `n = ⌊2L/λ⌋` points per side.
pub fn build_jakes_correlation(cfg: &PhysicalConfig) -> Result<CorrelationModel> {
    let r_s = jakes_toeplitz(cfg.cardinality(Side::Source))?;
    let r_r = jakes_toeplitz(cfg.cardinality(Side::Receiver))?;
    CorrelationModel::from_matrices(ModelKind::JakesSampled, r_s, r_r, CorrelationScaling::TraceNormalized)
}

pub fn build_iid_correlation(n_s: usize, n_r: usize) -> Result<CorrelationModel> {
    if n_s == 0 || n_r == 0 {
        return Err(domain("i.i.d. model needs n_s, n_r >= 1"));
    }
    CorrelationModel::from_matrices(ModelKind::IidRayleigh, identity(n_s), identity(n_r), CorrelationScaling::Raw)
}

/// One channel draw.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h: CMatrix,
    pub seed: u64,
    pub stream: u64,
    pub kind: ModelKind,
    /// Transmit indices by decreasing `[R_s]_{mm}`; ties keep index order.
    pub tx_order: Vec<usize>,
}

impl ChannelRealization {
    pub fn n_r(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_s(&self) -> usize {
        self.h.ncols()
    }
}

fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn cn01(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// i.i.d. `CN(0, 1)` matrix, filled row-major from the `(seed, stream)` generator.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64, stream: u64) -> CMatrix {
    let mut rng = seeded_rng(seed, stream);
    CMatrix::from_shape_simple_fn((rows, cols), || cn01(&mut rng))
}

/// [`draw_channel_stream`] on stream 0.
pub fn draw_channel(model: &CorrelationModel, seed: u64) -> ChannelRealization {
    draw_channel_stream(model, seed, 0)
}

/// Draws `H = R_r^{1/2} W R_s^{1/2}` with `W` generated from the ChaCha stream
/// `(seed, stream)`. Monte Carlo loops use the realization index as stream, so
/// every draw is reproducible independently of scheduling.
pub fn draw_channel_stream(model: &CorrelationModel, seed: u64, stream: u64) -> ChannelRealization {
    let (ns, nr) = (model.n_s(), model.n_r());
    let mut h = gaussian_matrix(nr, ns, seed, stream);
    if model.r_diagonal {
        for (i, mut row) in h.rows_mut().into_iter().enumerate() {
            let s = model.r_r_sqrt[[i, i]].re;
            row.mapv_inplace(|z| z * s);
        }
    } else {
        h = model.r_r_sqrt.dot(&h);
    }
    if model.s_diagonal {
        for (j, mut col) in h.columns_mut().into_iter().enumerate() {
            let s = model.r_s_sqrt[[j, j]].re;
            col.mapv_inplace(|z| z * s);
        }
    } else {
        h = h.dot(&model.r_s_sqrt);
    }
    let mut tx_order: Vec<usize> = (0..ns).collect();
    tx_order.sort_by(|&a, &b| model.r_s[[b, b]].re.total_cmp(&model.r_s[[a, a]].re));
    ChannelRealization {
        h,
        seed,
        stream,
        kind: model.kind,
        tx_order,
    }
}

/// `y = H_N x + z` where `H_N` holds the `N = x.len()` strongest transmit
/// columns and `z` is i.i.d. `CN(0, noise_var)` drawn from `(seed, NOISE_STREAM)`.
pub fn simulate_link(
    channel: &ChannelRealization,
    x: &[Complex64],
    noise_var: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    let n_streams = x.len();
    let limit = channel.n_s().min(channel.n_r());
    if n_streams > limit {
        return Err(domain(format!(
            "{n_streams} streams exceed min(n_s, n_r) = {limit}"
        )));
    }
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(domain(format!("noise variance {noise_var} must be >= 0")));
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(domain("transmit vector has non-finite entries"));
    }
    let columns = &channel.tx_order[..n_streams];
    let mut rng = seeded_rng(seed, NOISE_STREAM);
    let scale = noise_var.sqrt();
    Ok((0..channel.n_r())
        .map(|n| {
            let signal: Complex64 = columns.iter().zip(x).map(|(&m, xm)| channel.h[[n, m]] * xm).sum();
            signal + cn01(&mut rng) * scale
        })
        .collect())
}
