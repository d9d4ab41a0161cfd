//! Population risk `R(W) = E ||W y - x||^2 / d` of a linear denoiser.
//!
//! For Gaussian signal coefficients and noise the expectation has the exact
//! form `(1/d) ||(W - I) U||_F^2 + (sigma_z^2 / d) ||W||_F^2`, which is what
//! [`risk_closed_form`] evaluates. [`risk_monte_carlo`] estimates the same
//! quantity from fresh samples and is used to cross-check it.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::subspace::{self, gaussian_matrix, ModelParams, SubspaceBasis, ORTHONORMAL_TOL};

/// A linear map `y -> W y` on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearEstimator {
    Dense(DMatrix<f64>),
    /// `scale * B B^T` with `B` having orthonormal columns.
    ScaledProjection { scale: f64, basis: DMatrix<f64> },
}

impl LinearEstimator {
    /// Dense map; rejects non-square or non-finite matrices.
    pub fn dense(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::Dimension(format!(
                "estimator must be square, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("estimator has non-finite entries".into()));
        }
        Ok(Self::Dense(w))
    }

    /// Scaled projection after checking that `basis` is orthonormal.
    pub fn try_scaled_projection(scale: f64, basis: DMatrix<f64>) -> Result<Self> {
        if basis.ncols() > basis.nrows() {
            return Err(Error::Dimension(format!(
                "projection basis must be tall, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        let err = subspace::orthonormality_error(&basis);
        if !(err <= ORTHONORMAL_TOL) {
            return Err(Error::Invariant(format!(
                "projection basis is not orthonormal (max |B^T B - I| = {err:e})"
            )));
        }
        Ok(Self::ScaledProjection { scale, basis })
    }

    pub(crate) fn scaled_projection(scale: f64, basis: DMatrix<f64>) -> Self {
        debug_assert!(subspace::orthonormality_error(&basis) <= ORTHONORMAL_TOL);
        Self::ScaledProjection { scale, basis }
    }

    pub fn zeros(n: usize) -> Self {
        Self::Dense(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self::Dense(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(w) => w.nrows(),
            Self::ScaledProjection { basis, .. } => basis.nrows(),
        }
    }

    /// Applies the map to every column of `y`.
    pub fn apply(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Self::Dense(w) => w * y,
            Self::ScaledProjection { scale, basis } => basis * (basis.tr_mul(y) * *scale),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Self::Dense(w) => w.clone(),
            Self::ScaledProjection { scale, basis } => basis * basis.transpose() * *scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskReport {
    pub closed_form: f64,
    pub monte_carlo_mean: f64,
    /// Sample standard deviation of per-example losses over `sqrt(n_test)`.
    pub monte_carlo_se: f64,
    pub n_test: usize,
}

/// Quantities appearing in the PCA and early-stopping risk bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryDiagnostics {
    /// `(d + n sigma_z^2) ln(n) / N`
    pub gamma: f64,
    /// `n sigma_z^2 ln(n) / N`
    pub psi: f64,
    /// `sigma_z^2 / (1 + sigma_z^2)`
    pub floor: f64,
    pub train_size: usize,
}

fn check_shapes(w: &LinearEstimator, basis: &SubspaceBasis, params: &ModelParams) -> Result<()> {
    basis.check_params(params)?;
    if w.dim() != params.n {
        return Err(Error::Dimension(format!(
            "estimator acts on R^{} but model has n={}",
            w.dim(),
            params.n
        )));
    }
    Ok(())
}

/// Exact population risk.
pub fn risk_closed_form(
    w: &LinearEstimator,
    basis: &SubspaceBasis,
    params: &ModelParams,
) -> Result<f64> {
    check_shapes(w, basis, params)?;
    let d = params.d as f64;
    let var = params.noise_var();
    let u = basis.matrix();
    let risk = match w {
        LinearEstimator::Dense(m) => {
            let bias = m * u - u;
            (bias.norm_squared() + var * m.norm_squared()) / d
        }
        LinearEstimator::ScaledProjection { scale, basis: b } => {
            let captured = b.tr_mul(u).norm_squared();
            let s = *scale;
            ((s - 1.0).powi(2) * captured + (d - captured) + var * s * s * b.ncols() as f64) / d
        }
    };
    Ok(risk)
}

/// Risk minus the irreducible floor.
pub fn excess_risk(w: &LinearEstimator, basis: &SubspaceBasis, params: &ModelParams) -> Result<f64> {
    Ok(risk_closed_form(w, basis, params)? - subspace::optimal_risk(params))
}

const MC_BATCH: usize = 1024;

/// Monte-Carlo estimate of the risk from `n_test` fresh samples.
pub fn risk_monte_carlo(
    w: &LinearEstimator,
    basis: &SubspaceBasis,
    params: &ModelParams,
    n_test: usize,
    seed: u64,
) -> Result<RiskReport> {
    if n_test < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: n_test,
        });
    }
    let closed_form = risk_closed_form(w, basis, params)?;
    let mut signal_rng = rng::stream(seed, Stream::TestSignal);
    let mut noise_rng = rng::stream(seed, Stream::TestNoise);
    let d = params.d as f64;

    // Welford accumulation of per-example losses.
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut remaining = n_test;
    while remaining > 0 {
        let batch = remaining.min(MC_BATCH);
        remaining -= batch;
        let coeffs = gaussian_matrix(&mut signal_rng, params.d, batch, 1.0);
        let x = basis.matrix() * coeffs;
        let y = if params.sigma_z == 0.0 {
            x.clone()
        } else {
            &x + gaussian_matrix(&mut noise_rng, params.n, batch, params.sigma_z)
        };
        let resid = w.apply(&y) - x;
        for col in resid.column_iter() {
            let loss = col.norm_squared() / d;
            count += 1;
            let delta = loss - mean;
            mean += delta / count as f64;
            m2 += delta * (loss - mean);
        }
    }
    let var = m2 / (count - 1) as f64;
    Ok(RiskReport {
        closed_form,
        monte_carlo_mean: mean,
        monte_carlo_se: (var / count as f64).sqrt(),
        n_test,
    })
}

/// Risk of the shrinkage estimator `U_hat U_hat^T / (1 + sigma_z^2)` via the
/// subspace-error decomposition
/// `(1 + 2 s^2) / (1 + s^2)^2 * ||U_hat_perp^T U||^2 / d + s^2 / (1 + s^2)`,
/// where `s = sigma_z`. The complement term is computed as
/// `d - ||U_hat^T U||^2`. When `U_hat` has rank `r < d` the noise term of the
/// missing directions, `sigma_z^2 (d - r) / (d (1 + sigma_z^2)^2)`, is
/// subtracted.
pub fn pca_risk_specialized(
    u_hat: &DMatrix<f64>,
    basis: &SubspaceBasis,
    params: &ModelParams,
) -> Result<f64> {
    basis.check_params(params)?;
    if u_hat.nrows() != params.n {
        return Err(Error::Dimension(format!(
            "estimated basis has {} rows but n={}",
            u_hat.nrows(),
            params.n
        )));
    }
    let err = subspace::orthonormality_error(u_hat);
    if !(err <= ORTHONORMAL_TOL) {
        return Err(Error::Invariant(format!(
            "estimated basis is not orthonormal (max |B^T B - I| = {err:e})"
        )));
    }
    let d = params.d as f64;
    let r = u_hat.ncols() as f64;
    let var = params.noise_var();
    let shrink = params.shrinkage();
    let missed = d - u_hat.tr_mul(basis.matrix()).norm_squared();
    let weight = (1.0 + 2.0 * var) * shrink * shrink;
    Ok(weight * missed / d + subspace::optimal_risk(params) - var * shrink * shrink * (d - r) / d)
}

pub fn theory_diagnostics(params: &ModelParams, train_size: usize) -> Result<TheoryDiagnostics> {
    params.validate()?;
    if train_size == 0 {
        return Err(Error::EmptyDataset);
    }
    let log_n = (params.n as f64).ln();
    let noise_dims = params.n as f64 * params.noise_var();
    let count = train_size as f64;
    Ok(TheoryDiagnostics {
        gamma: (params.d as f64 + noise_dims) * log_n / count,
        psi: noise_dims * log_n / count,
        floor: subspace::optimal_risk(params),
        train_size,
    })
}
