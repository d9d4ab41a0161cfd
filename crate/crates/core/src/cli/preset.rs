//! Named experiment configurations stored as TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subspace::ModelParams;
use crate::sweep::{EstimatorKind, SweepConfig};

const BUILTIN: [(&str, &str); 4] = [
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig9-d-sweep", include_str!("../../presets/fig9-d-sweep.toml")),
    ("fig9-n-sweep", include_str!("../../presets/fig9-n-sweep.toml")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitPlan {
    pub estimators: Vec<EstimatorKind>,
    /// Smallest training-set size included in the fit.
    pub min_n: Option<usize>,
    pub max_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub version: u32,
    pub d: Vec<usize>,
    pub n: Vec<usize>,
    pub sigma: Vec<f64>,
    /// `lo:hi:points_per_decade`.
    pub grid: String,
    pub seeds: usize,
    pub estimators: Vec<EstimatorKind>,
    pub fit: Option<FitPlan>,
}

/// One concrete sweep of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub stem: String,
    pub config: SweepConfig,
}

impl Preset {
    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(name, _)| *name)
    }

    pub fn builtin(name: &str) -> Option<Result<Preset>> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_toml(text))
    }

    pub fn from_toml(text: &str) -> Result<Preset> {
        let preset: Preset = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if preset.d.is_empty() || preset.n.is_empty() || preset.sigma.is_empty() {
            return Err(Error::Config("preset needs at least one value of d, n and sigma".into()));
        }
        Ok(preset)
    }

    /// A built-in name, or else a path to a TOML file.
    pub fn load(name_or_path: &str) -> Result<Preset> {
        if let Some(preset) = Self::builtin(name_or_path) {
            return preset;
        }
        let path = Path::new(name_or_path);
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Cartesian product of `d`, `n` and `sigma`, in that nesting order.
    pub fn variants(&self, train_sizes: &[usize], seeds: usize, base_seed: u64) -> Result<Vec<Variant>> {
        let mut out = Vec::new();
        for &d in &self.d {
            for &n in &self.n {
                for &sigma in &self.sigma {
                    let params = ModelParams::new(d, n, sigma)?;
                    let mut config = SweepConfig::new(params, train_sizes.to_vec(), self.estimators.clone());
                    config.n_seeds = seeds;
                    config.base_seed = base_seed;
                    config.validate()?;
                    out.push(Variant {
                        stem: format!("{}_d{d}_n{n}_sigma{sigma}", self.name),
                        config,
                    });
                }
            }
        }
        Ok(out)
    }
}
