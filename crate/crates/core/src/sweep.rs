//! Seeded sweeps of risk versus training-set size.
//!
//! Each `(N, seed)` cell draws its own basis and dataset from a seed derived
//! from `(base_seed, N index, seed index)` alone, so results do not depend on
//! which thread runs which cell. Aggregation walks cells in `N`-then-seed
//! order after all of them finish.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{self, GdConfig, Iterations, SpectralRisk, DEFAULT_K_MAX_EXP};
use crate::risk::{risk_closed_form, risk_monte_carlo, LinearEstimator};
use crate::rng;
use crate::subspace::{self, ModelParams};

/// Default number of independent runs per training-set size.
pub const DEFAULT_SEEDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    /// The optimal map `U U^T / (1 + sigma_z^2)`.
    Opt,
    /// PCA subspace estimate with optimal shrinkage.
    Pca,
    /// Gradient descent with oracle early stopping.
    Esgd,
    /// Gradient descent run to convergence, `X Y^+`.
    Pinv,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [Self::Opt, Self::Pca, Self::Esgd, Self::Pinv];

    /// Column prefix used in curve files.
    pub fn tag(self) -> &'static str {
        match self {
            Self::Opt => "OPT",
            Self::Pca => "PCA",
            Self::Esgd => "ESGD",
            Self::Pinv => "PINV",
        }
    }

    fn needs_svd(self) -> bool {
        !matches!(self, Self::Opt)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!("unknown estimator `{s}` (expected opt, pca, esgd or pinv)"))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub params: ModelParams,
    pub train_sizes: Vec<usize>,
    pub n_seeds: usize,
    pub estimators: Vec<EstimatorKind>,
    pub base_seed: u64,
    /// Fresh test samples for a Monte-Carlo risk estimate; 0 disables it.
    pub mc_test_size: usize,
}

impl SweepConfig {
    pub fn new(params: ModelParams, train_sizes: Vec<usize>, estimators: Vec<EstimatorKind>) -> Self {
        Self {
            params,
            train_sizes,
            n_seeds: DEFAULT_SEEDS,
            estimators,
            base_seed: 0,
            mc_test_size: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.train_sizes.is_empty() {
            return Err(Error::Config("train_sizes is empty".into()));
        }
        if self.train_sizes[0] == 0 {
            return Err(Error::Config("train sizes must be positive".into()));
        }
        if self.train_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("train_sizes must be strictly ascending".into()));
        }
        if self.n_seeds == 0 {
            return Err(Error::Config("n_seeds must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators requested".into()));
        }
        let mut seen = self.estimators.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.estimators.len() {
            return Err(Error::Config("estimators listed more than once".into()));
        }
        if self.mc_test_size == 1 {
            return Err(Error::Config("mc_test_size must be 0 or at least 2".into()));
        }
        Ok(())
    }
}

/// Per-estimator aggregate over seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    /// Column prefix, e.g. `ESGD`.
    pub label: String,
    pub mean: Vec<f64>,
    /// Population standard deviation over seeds.
    pub std: Vec<f64>,
    /// Mean Monte-Carlo risk, when test samples were requested.
    pub monte_carlo: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskCurve {
    pub train_sizes: Vec<usize>,
    pub series: Vec<Series>,
    pub config: Option<SweepConfig>,
}

impl RiskCurve {
    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    /// `(N, mean)` pairs of one series.
    pub fn points(&self, label: &str) -> Option<Vec<(f64, f64)>> {
        self.series(label).map(|s| {
            self.train_sizes
                .iter()
                .zip(&s.mean)
                .map(|(&n, &m)| (n as f64, m))
                .collect()
        })
    }
}

#[derive(Debug, Clone)]
struct CellOutcome {
    risks: Vec<f64>,
    monte_carlo: Vec<f64>,
}

fn run_cell(config: &SweepConfig, size_index: usize, seed_index: usize) -> Result<CellOutcome> {
    let params = &config.params;
    let count = config.train_sizes[size_index];
    let seed = rng::cell_seed(config.base_seed, size_index, seed_index);
    let basis = subspace::sample_basis(params.n, params.d, seed)?;
    let data = subspace::sample_dataset(params, &basis, count, seed)?;
    let cache = if config.estimators.iter().any(|k| k.needs_svd()) {
        Some(estimators::svd_of(&data)?)
    } else {
        None
    };
    let spectral = match &cache {
        Some(c) if config
            .estimators
            .iter()
            .any(|k| matches!(k, EstimatorKind::Esgd | EstimatorKind::Pinv)) =>
        {
            Some(SpectralRisk::new(c, &data.clean, &basis, params)?)
        }
        _ => None,
    };
    let grid = estimators::default_k_grid(DEFAULT_K_MAX_EXP);

    let mut risks = Vec::with_capacity(config.estimators.len());
    let mut monte_carlo = Vec::new();
    for &kind in &config.estimators {
        // Risk from the cheapest exact route, plus the filter needed to
        // rebuild a dense map when a Monte-Carlo check is requested.
        let (risk, iterations) = match kind {
            EstimatorKind::Opt => {
                let w = subspace::optimal_estimator(params, &basis)?;
                (risk_closed_form(&w, &basis, params)?, None)
            }
            EstimatorKind::Pca => {
                let w = estimators::pca_estimator(cache.as_ref().expect("svd computed"), params)?;
                (risk_closed_form(&w, &basis, params)?, None)
            }
            EstimatorKind::Esgd => {
                let eval = spectral.as_ref().expect("spectral risk computed");
                let eta = GdConfig::default_for(cache.as_ref().expect("svd computed"), Iterations::Infinity).eta;
                let choice = eval.select(eta, &grid)?;
                (choice.risk, Some(GdConfig::new(eta, choice.k_opt)))
            }
            EstimatorKind::Pinv => {
                let c = cache.as_ref().expect("svd computed");
                let cfg = GdConfig::default_for(c, Iterations::Infinity);
                (spectral.as_ref().expect("spectral risk computed").risk(&cfg)?, Some(cfg))
            }
        };
        if !risk.is_finite() {
            return Err(Error::Numerical(format!("{kind} risk is not finite")));
        }
        risks.push(risk);

        if config.mc_test_size >= 2 {
            let w: LinearEstimator = match (kind, iterations) {
                (EstimatorKind::Opt, _) => subspace::optimal_estimator(params, &basis)?,
                (EstimatorKind::Pca, _) => {
                    estimators::pca_estimator(cache.as_ref().expect("svd computed"), params)?
                }
                (_, Some(cfg)) => {
                    estimators::gd_estimator_closed(cache.as_ref().expect("svd computed"), &data.clean, &cfg)?
                }
                (_, None) => unreachable!("gradient estimators carry a config"),
            };
            let report = risk_monte_carlo(&w, &basis, params, config.mc_test_size, seed)?;
            monte_carlo.push(report.monte_carlo_mean);
        }
    }
    Ok(CellOutcome { risks, monte_carlo })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<RiskCurve> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = (0..config.train_sizes.len())
        .flat_map(|i| (0..config.n_seeds).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Result<CellOutcome>> = cells
        .par_iter()
        .map(|&(i, j)| {
            run_cell(config, i, j).map_err(|e| Error::Cell {
                train_size: config.train_sizes[i],
                size_index: i,
                seed_index: j,
                source: Box::new(e),
            })
        })
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let with_mc = config.mc_test_size >= 2;
    let series = config
        .estimators
        .iter()
        .enumerate()
        .map(|(e, kind)| {
            let mut mean = Vec::with_capacity(config.train_sizes.len());
            let mut std = Vec::with_capacity(config.train_sizes.len());
            let mut mc = Vec::new();
            for per_size in outcomes.chunks(config.n_seeds) {
                let values: Vec<f64> = per_size.iter().map(|o| o.risks[e]).collect();
                let (m, s) = mean_std(&values);
                mean.push(m);
                std.push(s);
                if with_mc {
                    let values: Vec<f64> = per_size.iter().map(|o| o.monte_carlo[e]).collect();
                    mc.push(mean_std(&values).0);
                }
            }
            Series {
                label: kind.tag().to_string(),
                mean,
                std,
                monte_carlo: with_mc.then_some(mc),
            }
        })
        .collect();
    Ok(RiskCurve {
        train_sizes: config.train_sizes.clone(),
        series,
        config: Some(config.clone()),
    })
}

/// Runs the sweep on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<RiskCurve> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_sweep(config))
}

/// Geometric grid `lo * 10^(i / points_per_decade)` up to `hi`, rounded to
/// integers and deduplicated.
pub fn default_train_grid(lo: usize, hi: usize, points_per_decade: usize) -> Result<Vec<usize>> {
    if lo == 0 || lo >= hi || points_per_decade == 0 {
        return Err(Error::Config(format!(
            "grid needs 1 <= lo < hi and points_per_decade >= 1, got {lo}:{hi}:{points_per_decade}"
        )));
    }
    let limit = hi as f64 * (1.0 + 1e-12);
    let mut grid: Vec<usize> = Vec::new();
    for i in 0.. {
        let value = lo as f64 * 10f64.powf(i as f64 / points_per_decade as f64);
        if value > limit {
            break;
        }
        let rounded = value.round() as usize;
        if grid.last() != Some(&rounded) {
            grid.push(rounded);
        }
    }
    Ok(grid)
}
