//! Named experiments producing result tables.
//!
//! | experiment | columns |
//! |------------|---------|
//! | `psf`      | `theta_rad,model,psf_density` |
//! | `eigs`     | `index,model,normalized_eigenvalue` |
//! | `dof`      | `model,dof,n_s_prime,n_r_prime,epsilon` |
//! | `capacity` | `p_dbw,model,capacity_bits_per_s_per_hz` |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::channel::{build_iid_correlation, build_jakes_correlation, build_wdm_correlation, CorrelationModel};
use crate::config::{ExperimentConfig, ExperimentModel};
use crate::error::Result;
use crate::linalg::{hermitian_eigenvalues, trace};
use crate::metrics::{dof, ergodic_capacity, CapacityResult, DoFResult};
use crate::scattering::ScatteringSpec;
use crate::table::{Cell, Table};
use crate::wavenumber::{variance_profile, Side, VarianceProfile};

/// Angle samples in the PSF table.
pub const PSF_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Psf,
    Eigs,
    Dof,
    Capacity,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [Self::Psf, Self::Eigs, Self::Dof, Self::Capacity];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Psf => "psf",
            Self::Eigs => "eigs",
            Self::Dof => "dof",
            Self::Capacity => "capacity",
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name())
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Scattering spec behind a WDM model on one side; `None` for iid / Jakes.
pub fn model_scattering(cfg: &ExperimentConfig, model: ExperimentModel, side: Side) -> Option<ScatteringSpec> {
    match model {
        ExperimentModel::Isotropic => Some(ScatteringSpec::isotropic()),
        ExperimentModel::NonIsotropic => Some(cfg.scattering(side).clone()),
        _ => None,
    }
}

/// Normalized variance profiles `(source, receiver)` of a WDM model.
pub fn model_profiles(cfg: &ExperimentConfig, model: ExperimentModel) -> Result<Option<(VarianceProfile, VarianceProfile)>> {
    let (Some(ss), Some(sr)) = (
        model_scattering(cfg, model, Side::Source),
        model_scattering(cfg, model, Side::Receiver),
    ) else {
        return Ok(None);
    };
    let ps = variance_profile(&cfg.physical, &ss, Side::Source, true)?;
    let pr = variance_profile(&cfg.physical, &sr, Side::Receiver, true)?;
    Ok(Some((ps, pr)))
}

/// Correlation model for one experiment model.
pub fn build_model(cfg: &ExperimentConfig, model: ExperimentModel) -> Result<CorrelationModel> {
    let p = &cfg.physical;
    match model {
        ExperimentModel::Iid => build_iid_correlation(p.cardinality(Side::Source), p.cardinality(Side::Receiver)),
        ExperimentModel::Jakes => build_jakes_correlation(p),
        ExperimentModel::Isotropic | ExperimentModel::NonIsotropic => {
            let (ps, pr) = model_profiles(cfg, model)?.expect("WDM models have profiles");
            build_wdm_correlation(p, &ps, &pr)
        }
    }
}

/// `Ã²(θ)` on `θ_i = iπ/1024`, `i = 0..1024`, for each WDM model in the config.
pub fn run_psf_profile(cfg: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new(["theta_rad", "model", "psf_density"]);
    for &model in cfg.models.iter().filter(|m| m.is_wdm()) {
        let spec = model_scattering(cfg, model, Side::Receiver).expect("WDM model");
        for i in 0..PSF_POINTS {
            let theta = PI * i as f64 / PSF_POINTS as f64;
            let v = crate::scattering::psf_density(&spec, theta)?;
            table.push_row(vec![theta.into(), model.name().into(), v.into()])?;
        }
    }
    Ok(table)
}

/// Eigenvalues of `R_r`, decreasing and divided by the trace, per model.
pub fn eigen_spectra(cfg: &ExperimentConfig) -> Result<Vec<(ExperimentModel, Vec<f64>)>> {
    cfg.models
        .iter()
        .map(|&model| {
            let m = build_model(cfg, model)?;
            let r = m.r_r();
            let tr = trace(r).re;
            let values = hermitian_eigenvalues(r)?.into_iter().map(|v| v / tr).collect();
            Ok((model, values))
        })
        .collect()
}

pub fn run_eigen_spectrum(cfg: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new(["index", "model", "normalized_eigenvalue"]);
    for (model, values) in eigen_spectra(cfg)? {
        for (i, v) in values.into_iter().enumerate() {
            table.push_row(vec![(i + 1).into(), model.name().into(), v.into()])?;
        }
    }
    Ok(table)
}

/// DoF of every WDM model in the config.
pub fn run_dof(cfg: &ExperimentConfig) -> Result<Vec<(ExperimentModel, DoFResult)>> {
    let mut out = Vec::new();
    for &model in cfg.models.iter().filter(|m| m.is_wdm()) {
        let (ps, pr) = model_profiles(cfg, model)?.expect("WDM model");
        out.push((model, dof(&ps, &pr, cfg.epsilon, model == ExperimentModel::Isotropic)?));
    }
    Ok(out)
}

pub fn dof_table(results: &[(ExperimentModel, DoFResult)]) -> Result<Table> {
    let mut table = Table::new(["model", "dof", "n_s_prime", "n_r_prime", "epsilon"]);
    for (model, d) in results {
        table.push_row(vec![
            model.name().into(),
            d.dof.into(),
            d.n_s_prime.into(),
            d.n_r_prime.into(),
            d.epsilon.into(),
        ])?;
    }
    Ok(table)
}

/// Ergodic capacity curve of every model. All models share the seed, so they
/// see the same white matrices `W` (common random numbers).
pub fn run_capacity(cfg: &ExperimentConfig) -> Result<Vec<(ExperimentModel, CapacityResult)>> {
    cfg.models
        .iter()
        .map(|&model| {
            let m = build_model(cfg, model)?;
            let res = ergodic_capacity(&m, &cfg.power_grid_dbw, cfg.noise_var_watts(), cfg.realizations, cfg.seed)?;
            Ok((model, res))
        })
        .collect()
}

pub fn capacity_table(results: &[(ExperimentModel, CapacityResult)]) -> Result<Table> {
    let mut table = Table::new(["p_dbw", "model", "capacity_bits_per_s_per_hz"]);
    for (model, res) in results {
        for (p, c) in res.power_grid_dbw.iter().zip(&res.capacity_bits) {
            table.push_row(vec![Cell::Real(*p), model.name().into(), Cell::Real(*c)])?;
        }
    }
    Ok(table)
}

/// Runs one experiment to its table.
pub fn run_experiment(cfg: &ExperimentConfig, experiment: Experiment) -> Result<Table> {
    match experiment {
        Experiment::Psf => run_psf_profile(cfg),
        Experiment::Eigs => run_eigen_spectrum(cfg),
        Experiment::Dof => dof_table(&run_dof(cfg)?),
        Experiment::Capacity => capacity_table(&run_capacity(cfg)?),
    }
}
