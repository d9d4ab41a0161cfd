//! The subspace signal model: signals `x = U c` on a random `d`-dimensional
//! subspace of `R^n`, observed through additive white Gaussian noise.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::LinearEstimator;
use crate::rng::{self, Stream};

/// Tolerance for the orthonormality check of a basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Latent signal dimension.
    pub d: usize,
    /// Ambient dimension.
    pub n: usize,
    /// Noise standard deviation.
    pub sigma_z: f64,
}

impl ModelParams {
    pub fn new(d: usize, n: usize, sigma_z: f64) -> Result<Self> {
        let params = Self { d, n, sigma_z };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d >= self.n {
            return Err(Error::Dimension(format!(
                "need 1 <= d < n, got d={} n={}",
                self.d, self.n
            )));
        }
        if !(self.sigma_z >= 0.0 && self.sigma_z.is_finite()) {
            return Err(Error::Config(format!(
                "sigma_z must be finite and nonnegative, got {}",
                self.sigma_z
            )));
        }
        Ok(())
    }

    pub fn noise_var(&self) -> f64 {
        self.sigma_z * self.sigma_z
    }

    /// Shrinkage factor `1 / (1 + sigma_z^2)` of the optimal estimator.
    pub fn shrinkage(&self) -> f64 {
        1.0 / (1.0 + self.noise_var())
    }
}

/// An `n x d` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    matrix: DMatrix<f64>,
    id: u64,
}

impl SubspaceBasis {
    /// Wraps a matrix after checking that its columns are orthonormal.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.ncols() == 0 || matrix.ncols() > matrix.nrows() {
            return Err(Error::Dimension(format!(
                "basis must be tall with at least one column, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let err = orthonormality_error(&matrix);
        if !(err <= ORTHONORMAL_TOL) {
            return Err(Error::Invariant(format!(
                "basis columns are not orthonormal (max |B^T B - I| = {err:e})"
            )));
        }
        let id = fingerprint(&matrix);
        Ok(Self { matrix, id })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.matrix.ncols()
    }

    /// Content fingerprint; equal bases have equal ids.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub(crate) fn check_params(&self, params: &ModelParams) -> Result<()> {
        if self.ambient_dim() != params.n || self.rank() != params.d {
            return Err(Error::Dimension(format!(
                "basis is {}x{} but params have n={} d={}",
                self.ambient_dim(),
                self.rank(),
                params.n,
                params.d
            )));
        }
        Ok(())
    }
}

/// Largest absolute entry of `B^T B - I`.
pub fn orthonormality_error(b: &DMatrix<f64>) -> f64 {
    let gram = b.tr_mul(b);
    let mut err = 0.0_f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((gram[(i, j)] - target).abs());
        }
    }
    err
}

fn fingerprint(m: &DMatrix<f64>) -> u64 {
    let mut words = Vec::with_capacity(m.len() + 2);
    words.push(m.nrows() as u64);
    words.push(m.ncols() as u64);
    words.extend(m.iter().map(|v| v.to_bits()));
    rng::hash_words(&words)
}

/// Matrix of i.i.d. standard normals, filled column by column.
pub(crate) fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Draws a uniformly random orthonormal `n x d` basis.
///
/// The basis is the Q factor of a Gaussian matrix, with column signs chosen
/// so that the triangular factor has a positive diagonal. The result is a
/// deterministic function of `(n, d, seed)`.
pub fn sample_basis(n: usize, d: usize, seed: u64) -> Result<SubspaceBasis> {
    if d == 0 || d >= n {
        return Err(Error::Dimension(format!(
            "need 1 <= d < n, got d={d} n={n}"
        )));
    }
    let mut rng = rng::stream(seed, Stream::Basis);
    let g = gaussian_matrix(&mut rng, n, d, 1.0);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    SubspaceBasis::from_matrix(q)
}

/// A training set of clean/noisy pairs stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub clean: DMatrix<f64>,
    pub noisy: DMatrix<f64>,
    pub params: ModelParams,
    pub basis_id: u64,
    pub seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.clean.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.clean.ncols() == 0
    }
}

/// Draws `count` pairs `x_i = U c_i`, `y_i = x_i + z_i`.
///
/// Signal coefficients and noise come from independent streams, so the clean
/// matrix for a given seed does not depend on `sigma_z`.
pub fn sample_dataset(
    params: &ModelParams,
    basis: &SubspaceBasis,
    count: usize,
    seed: u64,
) -> Result<Dataset> {
    params.validate()?;
    basis.check_params(params)?;
    if count == 0 {
        return Err(Error::EmptyDataset);
    }
    let coeffs = gaussian_matrix(&mut rng::stream(seed, Stream::Signal), params.d, count, 1.0);
    let clean = basis.matrix() * coeffs;
    let noisy = if params.sigma_z == 0.0 {
        clean.clone()
    } else {
        let noise = gaussian_matrix(
            &mut rng::stream(seed, Stream::Noise),
            params.n,
            count,
            params.sigma_z,
        );
        &clean + noise
    };
    Ok(Dataset {
        clean,
        noisy,
        params: *params,
        basis_id: basis.id(),
        seed,
    })
}

/// The risk-minimizing linear map `W* = U U^T / (1 + sigma_z^2)`.
pub fn optimal_estimator(params: &ModelParams, basis: &SubspaceBasis) -> Result<LinearEstimator> {
    params.validate()?;
    basis.check_params(params)?;
    Ok(LinearEstimator::scaled_projection(
        params.shrinkage(),
        basis.matrix().clone(),
    ))
}

/// Irreducible risk `sigma_z^2 / (1 + sigma_z^2)`.
pub fn optimal_risk(params: &ModelParams) -> f64 {
    let v = params.noise_var();
    v / (1.0 + v)
}
