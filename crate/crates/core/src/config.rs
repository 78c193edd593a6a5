//! Experiment configuration: a flat JSON object whose omitted keys take the
//! reference defaults (two apertures of 128 wavelengths at 30 GHz, two
//! scattering clusters at 30° and 60°).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scattering::{Cluster, ScatteringSpec, WEIGHT_SUM_TOL};
use crate::wavenumber::{PhysicalConfig, Side};

/// Channel models compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentModel {
    /// i.i.d. Rayleigh fading.
    Iid,
    /// Jakes correlation sampled at λ/2.
    Jakes,
    /// WDM channel under isotropic scattering.
    Isotropic,
    /// WDM channel under the configured cluster mixture.
    NonIsotropic,
}

impl ExperimentModel {
    pub const ALL: [ExperimentModel; 4] = [Self::Iid, Self::Jakes, Self::Isotropic, Self::NonIsotropic];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Iid => "iid",
            Self::Jakes => "jakes",
            Self::Isotropic => "isotropic",
            Self::NonIsotropic => "non_isotropic",
        }
    }

    /// Whether the model is a WDM channel with a scattering PSF.
    pub fn is_wdm(&self) -> bool {
        matches!(self, Self::Isotropic | Self::NonIsotropic)
    }
}

impl fmt::Display for ExperimentModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model `{s}` (expected iid, jakes, isotropic or non_isotropic)"))
    }
}

/// A fully validated experiment setup.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub physical: PhysicalConfig,
    /// Mixture used by the non-isotropic model at the source.
    pub scattering_s: ScatteringSpec,
    /// Mixture used by the non-isotropic model at the receiver.
    pub scattering_r: ScatteringSpec,
    pub models: Vec<ExperimentModel>,
    pub epsilon: f64,
    pub power_grid_dbw: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub noise_var_dbw: f64,
}

impl ExperimentConfig {
    pub fn noise_var_watts(&self) -> f64 {
        crate::dbw_to_watts(self.noise_var_dbw)
    }

    pub fn scattering(&self, side: Side) -> &ScatteringSpec {
        match side {
            Side::Source => &self.scattering_s,
            Side::Receiver => &self.scattering_r,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        parse_config("").expect("built-in defaults are valid")
    }
}

pub const DEFAULT_LAMBDA_M: f64 = 0.01;
pub const DEFAULT_LENGTH_OVER_LAMBDA: f64 = 128.0;
pub const DEFAULT_SEPARATION_M: f64 = 1.0;
pub const DEFAULT_EPSILON: f64 = 0.003;
pub const DEFAULT_REALIZATIONS: usize = 500;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_NOISE_VAR_DBW: f64 = 0.0;

fn default_power_grid() -> Vec<f64> {
    (0..=6).map(|i| 5.0 * i as f64).collect()
}

fn default_clusters() -> Vec<RawCluster> {
    vec![
        RawCluster { mean_deg: 30.0, circ_var: 0.01, weight: 0.5 },
        RawCluster { mean_deg: 60.0, circ_var: 0.005, weight: 0.5 },
    ]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    mean_deg: f64,
    circ_var: f64,
    weight: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lambda_m: Option<f64>,
    #[serde(rename = "L_s_over_lambda")]
    l_s_over_lambda: Option<f64>,
    #[serde(rename = "L_r_over_lambda")]
    l_r_over_lambda: Option<f64>,
    d_m: Option<f64>,
    epsilon: Option<f64>,
    noise_var_dbw: Option<f64>,
    power_grid_dbw: Option<Vec<f64>>,
    realizations: Option<usize>,
    seed: Option<u64>,
    models: Option<Vec<String>>,
    clusters: Option<Vec<RawCluster>>,
    /// Source-side clusters when scattering is not symmetric; defaults to `clusters`.
    source_clusters: Option<Vec<RawCluster>>,
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

fn build_mixture(key: &str, raw: &[RawCluster]) -> Result<ScatteringSpec> {
    if raw.is_empty() {
        return Err(invalid(key, "at least one cluster is required"));
    }
    let mut clusters = Vec::with_capacity(raw.len());
    for (i, c) in raw.iter().enumerate() {
        if !(c.weight > 0.0) || !c.weight.is_finite() {
            return Err(invalid(format!("{key}[{i}].weight"), format!("must be positive, got {}", c.weight)));
        }
        if !(c.circ_var > 0.0 && c.circ_var <= 1.0) {
            return Err(invalid(format!("{key}[{i}].circ_var"), format!("must lie in (0, 1], got {}", c.circ_var)));
        }
        if !(0.0..180.0).contains(&c.mean_deg) {
            return Err(invalid(format!("{key}[{i}].mean_deg"), format!("must lie in [0, 180), got {}", c.mean_deg)));
        }
        let cluster = Cluster::new(c.weight, c.mean_deg * PI / 180.0, c.circ_var)
            .map_err(|e| invalid(format!("{key}[{i}]"), e.to_string()))?;
        clusters.push(cluster);
    }
    let total: f64 = raw.iter().map(|c| c.weight).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(invalid(format!("{key}.weight"), format!("weights sum to {total}, expected 1")));
    }
    ScatteringSpec::mixture(clusters).map_err(|e| invalid(key, e.to_string()))
}

/// Parses and validates a JSON configuration. Empty input yields the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = if text.trim().is_empty() {
        RawConfig::default()
    } else {
        serde_json::from_str(text).map_err(|e| invalid("<document>", e.to_string()))?
    };

    let lambda = positive("lambda_m", raw.lambda_m.unwrap_or(DEFAULT_LAMBDA_M))?;
    let ls = positive("L_s_over_lambda", raw.l_s_over_lambda.unwrap_or(DEFAULT_LENGTH_OVER_LAMBDA))?;
    let lr = positive("L_r_over_lambda", raw.l_r_over_lambda.unwrap_or(DEFAULT_LENGTH_OVER_LAMBDA))?;
    let d = raw.d_m.unwrap_or(DEFAULT_SEPARATION_M);
    if !(d >= 0.0) || !d.is_finite() {
        return Err(invalid("d_m", format!("must be >= 0, got {d}")));
    }
    let physical = PhysicalConfig::from_ratios(lambda, ls, lr, d).map_err(|e| invalid("<physical>", e.to_string()))?;

    let epsilon = raw.epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    let noise_var_dbw = raw.noise_var_dbw.unwrap_or(DEFAULT_NOISE_VAR_DBW);
    if !noise_var_dbw.is_finite() {
        return Err(invalid("noise_var_dbw", "must be finite"));
    }
    let power_grid_dbw = raw.power_grid_dbw.unwrap_or_else(default_power_grid);
    if power_grid_dbw.is_empty() {
        return Err(invalid("power_grid_dbw", "must not be empty"));
    }
    if let Some(i) = power_grid_dbw.iter().position(|p| !p.is_finite()) {
        return Err(invalid(format!("power_grid_dbw[{i}]"), "must be finite"));
    }
    let realizations = raw.realizations.unwrap_or(DEFAULT_REALIZATIONS);
    if realizations == 0 {
        return Err(invalid("realizations", "must be >= 1"));
    }
    let models = match raw.models {
        None => ExperimentModel::ALL.to_vec(),
        Some(names) => {
            if names.is_empty() {
                return Err(invalid("models", "must not be empty"));
            }
            let mut out: Vec<ExperimentModel> = Vec::new();
            for (i, n) in names.iter().enumerate() {
                let m: ExperimentModel = n.parse().map_err(|e: String| invalid(format!("models[{i}]"), e))?;
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            out
        }
    };

    let clusters = raw.clusters.unwrap_or_else(default_clusters);
    let scattering_r = build_mixture("clusters", &clusters)?;
    let scattering_s = match raw.source_clusters {
        Some(src) => build_mixture("source_clusters", &src)?,
        None => scattering_r.clone(),
    };

    Ok(ExperimentConfig {
        physical,
        scattering_s,
        scattering_r,
        models,
        epsilon,
        power_grid_dbw,
        realizations,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        noise_var_dbw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(r: Result<ExperimentConfig>) -> String {
        match r {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_is_reference_setup() {
        for text in ["", "  \n", "{}"] {
            let c = parse_config(text).unwrap();
            assert_eq!(c.physical.lambda(), 0.01);
            assert_eq!(c.physical.ratio(Side::Source), 128.0);
            assert_eq!(c.physical.ratio(Side::Receiver), 128.0);
            assert_eq!(c.epsilon, 0.003);
            assert_eq!(c.realizations, 500);
            assert_eq!(c.noise_var_watts(), 1.0);
            assert_eq!(c.models, ExperimentModel::ALL.to_vec());
            let cl = c.scattering_r.clusters();
            assert_eq!(cl.len(), 2);
            assert!((cl[0].mean_angle() - PI / 6.0).abs() < 1e-15);
            assert_eq!(cl[1].circ_variance(), 0.005);
            assert_eq!(c.scattering_s, c.scattering_r);
        }
    }

    #[test]
    fn explicit_clusters() {
        let c = parse_config(
            r#"{"clusters": [{"mean_deg": 30, "circ_var": 0.01, "weight": 0.5},
                             {"mean_deg": 60, "circ_var": 0.005, "weight": 0.5}],
                "models": ["jakes", "isotropic"], "seed": 9}"#,
        )
        .unwrap();
        assert_eq!(c.scattering_r, ExperimentConfig::default().scattering_r);
        assert_eq!(c.models, vec![ExperimentModel::Jakes, ExperimentModel::Isotropic]);
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn validation_names_the_key() {
        let bad_sum = r#"{"clusters": [{"mean_deg": 30, "circ_var": 0.01, "weight": 0.45},
                                       {"mean_deg": 60, "circ_var": 0.005, "weight": 0.45}]}"#;
        assert_eq!(key_of(parse_config(bad_sum)), "clusters.weight");
        let bad_var = r#"{"clusters": [{"mean_deg": 30, "circ_var": 1.5, "weight": 1.0}]}"#;
        assert_eq!(key_of(parse_config(bad_var)), "clusters[0].circ_var");
        let zero_var = r#"{"clusters": [{"mean_deg": 30, "circ_var": 0.0, "weight": 1.0}]}"#;
        assert_eq!(key_of(parse_config(zero_var)), "clusters[0].circ_var");
        assert_eq!(key_of(parse_config(r#"{"lambda_m": 0}"#)), "lambda_m");
        assert_eq!(key_of(parse_config(r#"{"L_r_over_lambda": -3}"#)), "L_r_over_lambda");
        assert_eq!(key_of(parse_config(r#"{"models": ["foo"]}"#)), "models[0]");
        assert_eq!(key_of(parse_config(r#"{"realizations": 0}"#)), "realizations");
        assert_eq!(key_of(parse_config(r#"{"epsilon": 1.0}"#)), "epsilon");
        assert_eq!(key_of(parse_config(r#"{"bogus": 1}"#)), "<document>");
        assert_eq!(key_of(parse_config("[1, 2")), "<document>");
    }

    #[test]
    fn asymmetric_scattering() {
        let c = parse_config(r#"{"source_clusters": [{"mean_deg": 90, "circ_var": 0.2, "weight": 1}]}"#).unwrap();
        assert_ne!(c.scattering_s, c.scattering_r);
        assert_eq!(c.scattering(Side::Source).clusters().len(), 1);
    }
}
