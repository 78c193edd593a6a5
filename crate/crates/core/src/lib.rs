//! Wavenumber-division multiplexing (WDM) for holographic MIMO line apertures
//! under non-line-of-sight scattering.
//!
//! The crate covers the whole numerical pipeline:
//!
//! - [`specfun`]: Bessel functions `I0`, `I1`, `J0` and the von Mises
//!   concentration solver.
//! - [`scattering`]: power spectral factors built from von Mises mixtures (or
//!   isotropic scattering) and the autocorrelation / power spectral density
//!   pair they induce.
//! - [`wavenumber`]: wavenumber grids, the dispersion relation, angular
//!   partitions and per-index variance profiles.
//! - [`channel`]: correlation matrices for the WDM, sampled Jakes and i.i.d.
//!   Rayleigh models, channel synthesis `H = R_r^{1/2} W R_s^{1/2}` and the
//!   discrete link `y = H x + z`.
//! - [`metrics`]: degrees of freedom, water-filling and ergodic capacity.
//! - [`harness`]: the named experiments (PSF profile, eigenvalue spectrum,
//!   DoF, capacity) producing [`table::Table`]s.
//! - [`config`]: JSON experiment configuration.

pub mod channel;
pub mod config;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod quadrature;
pub mod scattering;
pub mod specfun;
pub mod table;
pub mod wavenumber;

pub use error::{Error, Result};

/// Converts a power in dBW to watts.
pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}
