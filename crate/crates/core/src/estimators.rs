//! Learned linear denoisers: PCA shrinkage, gradient descent on the
//! empirical loss `||W Y - X||_F^2` (explicit iterations and the spectral
//! filter closed form), and the converged pseudoinverse solution `X Y^+`.
//!
//! Starting from `W = 0`, `k` gradient steps with stepsize `eta` give
//! `W^k = X V_y D_k U_y^T`, where `D_k` is diagonal with entries
//! `(1 - (1 - eta s_i^2)^k) / s_i` over the singular values `s_i` of `Y`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::LinearEstimator;
use crate::subspace::{Dataset, ModelParams, SubspaceBasis};

/// Slack allowed on `eta * s_max^2 <= 1`.
pub const STEPSIZE_SLACK: f64 = 1e-12;

/// Right-side columns whose condition `s_max / s_i` exceeds this are
/// re-orthogonalized after being derived from the Gram eigenvectors.
const REORTH_CONDITION: f64 = 1e3;

/// Thin SVD `Y = U_y diag(S_y) V_y^T` restricted to the numerical rank.
#[derive(Debug, Clone)]
pub struct SvdCache {
    left: DMatrix<f64>,
    singular_values: DVector<f64>,
    right: DMatrix<f64>,
    rank_tol: f64,
}

impl SvdCache {
    /// Decomposes an arbitrary `n x N` matrix.
    pub fn from_matrix(y: &DMatrix<f64>) -> Result<Self> {
        thin_svd(y)
    }

    /// `n x r` left singular vectors.
    pub fn left(&self) -> &DMatrix<f64> {
        &self.left
    }

    /// Descending singular values, all above `rank_tol`.
    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    /// `N x r` right singular vectors.
    pub fn right(&self) -> &DMatrix<f64> {
        &self.right
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.left.nrows()
    }

    pub fn sample_count(&self) -> usize {
        self.right.nrows()
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.get(0).copied().unwrap_or(0.0)
    }

    /// `U_y diag(S_y) V_y^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.left.clone();
        for (mut col, s) in scaled.column_iter_mut().zip(self.singular_values.iter()) {
            col *= *s;
        }
        scaled * self.right.transpose()
    }
}

/// Thin SVD of the noisy training matrix.
pub fn svd_of(dataset: &Dataset) -> Result<SvdCache> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    thin_svd(&dataset.noisy)
}

/// Thin SVD through the eigendecomposition of the smaller Gram matrix.
///
/// The eigenvectors give one side exactly orthonormal; the other side is
/// recovered as `Y v_i / s_i` (or `Y^T u_i / s_i`). Eigenvalues below
/// `4 max(n, N) eps lambda_max` are indistinguishable from rounding in the
/// Gram matrix and are discarded, so the singular-value cutoff is
/// `s_max sqrt(4 max(n, N) eps)`.
fn thin_svd(y: &DMatrix<f64>) -> Result<SvdCache> {
    let (rows, cols) = y.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyDataset);
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let wide = cols > rows;
    let gram = if wide { y * y.transpose() } else { y.tr_mul(y) };
    let eig = gram.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("Gram eigendecomposition did not converge".into()));
    }

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let lambda_max = eig.eigenvalues[order[0]].max(0.0);
    let eps_floor = 4.0 * rows.max(cols) as f64 * f64::EPSILON;
    let rank_tol = (lambda_max * eps_floor).sqrt();
    let kept: Vec<usize> = order
        .into_iter()
        .take_while(|&i| lambda_max > 0.0 && eig.eigenvalues[i] > lambda_max * eps_floor)
        .collect();
    let r = kept.len();

    let side_len = eig.eigenvectors.nrows();
    let mut exact = DMatrix::zeros(side_len, r);
    let mut singular_values = DVector::zeros(r);
    for (j, &i) in kept.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        // Sign convention: largest-magnitude entry positive.
        let pivot = v.iamax();
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        exact.set_column(j, &v);
        singular_values[j] = eig.eigenvalues[i].sqrt();
    }

    let mut derived = if wide { y.tr_mul(&exact) } else { y * &exact };
    for (mut col, s) in derived.column_iter_mut().zip(singular_values.iter()) {
        col /= *s;
    }
    reorthogonalize_tail(&mut derived, &singular_values);

    let (left, right) = if wide { (exact, derived) } else { (derived, exact) };
    Ok(SvdCache {
        left,
        singular_values,
        right,
        rank_tol,
    })
}

/// Columns `Y v_i / s_i` lose orthogonality roughly like `eps (s_max/s_i)^2`.
/// The ill-conditioned tail is projected off the well-conditioned head twice
/// and then orthonormalized with a sign-preserving QR.
fn reorthogonalize_tail(derived: &mut DMatrix<f64>, singular_values: &DVector<f64>) {
    let r = singular_values.len();
    if r == 0 {
        return;
    }
    let s_max = singular_values[0];
    let head = singular_values
        .iter()
        .position(|&s| s_max / s > REORTH_CONDITION)
        .unwrap_or(r);
    if head == r {
        return;
    }
    let tail_len = r - head;
    let mut tail = derived.columns(head, tail_len).into_owned();
    if head > 0 {
        let head_block = derived.columns(0, head).into_owned();
        for _ in 0..2 {
            let coeffs = head_block.tr_mul(&tail);
            tail -= &head_block * coeffs;
        }
    }
    let qr = tail.qr();
    let rdiag = qr.r().diagonal();
    let mut q = qr.q();
    for j in 0..tail_len {
        if rdiag[j] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    derived.columns_mut(head, tail_len).copy_from(&q);
}

/// Number of gradient steps; `Infinity` denotes the converged limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Iterations {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Iterations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Iterations::Finite(k) => write!(f, "{k}"),
            Iterations::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Iterations {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "INFINITY" => Ok(Iterations::Infinity),
            other => other
                .parse::<u64>()
                .map(Iterations::Finite)
                .map_err(|_| Error::Config(format!("invalid iteration count `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub eta: f64,
    pub iterations: Iterations,
}

impl GdConfig {
    pub fn new(eta: f64, iterations: Iterations) -> Self {
        Self { eta, iterations }
    }

    /// Largest stepsize keeping the filter in `[0, 1]`: `1 / s_max^2`.
    pub fn default_for(cache: &SvdCache, iterations: Iterations) -> Self {
        let s = cache.max_singular_value();
        let eta = if s > 0.0 { 1.0 / (s * s) } else { 1.0 };
        Self { eta, iterations }
    }

    fn check(&self, cache: &SvdCache) -> Result<()> {
        let s = cache.max_singular_value();
        let product = self.eta * s * s;
        if !(self.eta > 0.0 && self.eta.is_finite()) || product > 1.0 + STEPSIZE_SLACK {
            return Err(Error::Stepsize {
                eta: self.eta,
                product,
            });
        }
        Ok(())
    }
}

/// Geometric grid `{0, 1, 2, 4, ..., 2^max_exp} ∪ {inf}`.
pub fn default_k_grid(max_exp: u32) -> Vec<Iterations> {
    std::iter::once(Iterations::Finite(0))
        .chain((0..=max_exp).map(|e| Iterations::Finite(1u64 << e)))
        .chain(std::iter::once(Iterations::Infinity))
        .collect()
}

/// Exponent of the largest finite entry of the default grid.
pub const DEFAULT_K_MAX_EXP: u32 = 20;

/// `(1 - eta s^2)^k`, the fraction of direction `s` not yet fitted.
pub fn filter_residual(s: f64, eta: f64, k: Iterations) -> f64 {
    match k {
        Iterations::Finite(0) => 1.0,
        Iterations::Finite(k) => {
            let x = (eta * s * s).min(1.0);
            (k as f64 * (-x).ln_1p()).exp()
        }
        Iterations::Infinity => 0.0,
    }
}

/// Diagonal entry `(1 - (1 - eta s^2)^k) / s` of `D_k`.
pub fn filter_value(s: f64, eta: f64, k: Iterations) -> f64 {
    match k {
        Iterations::Finite(0) => 0.0,
        Iterations::Finite(k) => {
            let x = (eta * s * s).min(1.0);
            -(k as f64 * (-x).ln_1p()).exp_m1() / s
        }
        Iterations::Infinity => 1.0 / s,
    }
}

fn filter_vector(cache: &SvdCache, eta: f64, k: Iterations) -> DVector<f64> {
    cache.singular_values.map(|s| filter_value(s, eta, k))
}

fn check_clean(cache: &SvdCache, x: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != cache.ambient_dim() || x.ncols() != cache.sample_count() {
        return Err(Error::Dimension(format!(
            "clean matrix is {}x{} but the decomposition is of a {}x{} matrix",
            x.nrows(),
            x.ncols(),
            cache.ambient_dim(),
            cache.sample_count()
        )));
    }
    Ok(())
}

/// `X V_y diag(filter) U_y^T`.
fn filtered_map(cache: &SvdCache, x: &DMatrix<f64>, filter: &DVector<f64>) -> DMatrix<f64> {
    let mut m = x * &cache.right;
    for (mut col, f) in m.column_iter_mut().zip(filter.iter()) {
        col *= *f;
    }
    m * cache.left.transpose()
}

/// PCA shrinkage estimator `U_hat U_hat^T / (1 + sigma_z^2)` on the leading
/// `min(d, r)` left singular vectors.
pub fn pca_estimator(cache: &SvdCache, params: &ModelParams) -> Result<LinearEstimator> {
    params.validate()?;
    if cache.ambient_dim() != params.n {
        return Err(Error::Dimension(format!(
            "decomposition has n={} but params have n={}",
            cache.ambient_dim(),
            params.n
        )));
    }
    let r = params.d.min(cache.rank());
    Ok(LinearEstimator::scaled_projection(
        params.shrinkage(),
        cache.left.columns(0, r).into_owned(),
    ))
}

/// Gradient-descent estimator in spectral-filter form.
pub fn gd_estimator_closed(cache: &SvdCache, x: &DMatrix<f64>, cfg: &GdConfig) -> Result<LinearEstimator> {
    cfg.check(cache)?;
    check_clean(cache, x)?;
    LinearEstimator::dense(filtered_map(cache, x, &filter_vector(cache, cfg.eta, cfg.iterations)))
}

/// Runs `k` explicit steps `W <- W - eta (W Y - X) Y^T` from `W = 0`.
pub fn gd_estimator_iterative(dataset: &Dataset, cfg: &GdConfig) -> Result<LinearEstimator> {
    let steps = match cfg.iterations {
        Iterations::Finite(k) => k,
        Iterations::Infinity => {
            return Err(Error::Unsupported(
                "explicit gradient descent needs a finite iteration count".into(),
            ))
        }
    };
    let n = dataset.noisy.nrows();
    let y = &dataset.noisy;
    let x = &dataset.clean;
    let mut w = DMatrix::zeros(n, n);
    for step in 0..steps {
        let grad = (&w * y - x) * y.transpose();
        w -= grad * cfg.eta;
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { iteration: step + 1 });
        }
    }
    Ok(LinearEstimator::Dense(w))
}

/// Converged estimator `X Y^+`.
pub fn pinv_estimator(cache: &SvdCache, x: &DMatrix<f64>) -> Result<LinearEstimator> {
    check_clean(cache, x)?;
    LinearEstimator::dense(filtered_map(cache, x, &filter_vector(cache, 1.0, Iterations::Infinity)))
}

/// Closed-form risk of every filtered estimator `X V_y diag(f) U_y^T` for a
/// fixed training set, without forming the `n x n` map.
///
/// With `M = X V_y` and `G = U_y^T U`, the bias is `||M diag(f) G - U||_F^2`
/// and the noise term is `sigma_z^2 sum_i f_i^2 ||M e_i||^2`.
#[derive(Debug, Clone)]
pub struct SpectralRisk<'a> {
    cache: &'a SvdCache,
    params: ModelParams,
    basis: &'a DMatrix<f64>,
    projected_clean: DMatrix<f64>,
    column_energy: DVector<f64>,
    alignment: DMatrix<f64>,
}

impl<'a> SpectralRisk<'a> {
    pub fn new(
        cache: &'a SvdCache,
        x: &DMatrix<f64>,
        basis: &'a SubspaceBasis,
        params: &ModelParams,
    ) -> Result<Self> {
        check_clean(cache, x)?;
        basis.check_params(params)?;
        let projected_clean = x * &cache.right;
        let column_energy = DVector::from_iterator(
            projected_clean.ncols(),
            projected_clean.column_iter().map(|c| c.norm_squared()),
        );
        let alignment = cache.left.tr_mul(basis.matrix());
        Ok(Self {
            cache,
            params: *params,
            basis: basis.matrix(),
            projected_clean,
            column_energy,
            alignment,
        })
    }

    pub fn risk_of_filter(&self, filter: &DVector<f64>) -> f64 {
        let mut scaled = self.alignment.clone();
        for (mut row, f) in scaled.row_iter_mut().zip(filter.iter()) {
            row *= *f;
        }
        let bias = (&self.projected_clean * scaled - self.basis).norm_squared();
        let noise: f64 = filter
            .iter()
            .zip(self.column_energy.iter())
            .map(|(f, e)| f * f * e)
            .sum();
        (bias + self.params.noise_var() * noise) / self.params.d as f64
    }

    pub fn risk(&self, cfg: &GdConfig) -> Result<f64> {
        cfg.check(self.cache)?;
        Ok(self.risk_of_filter(&filter_vector(self.cache, cfg.eta, cfg.iterations)))
    }

    /// Oracle early stopping over `grid` with stepsize `eta`.
    pub fn select(&self, eta: f64, grid: &[Iterations]) -> Result<StoppingChoice> {
        if grid.is_empty() {
            return Err(Error::Config("iteration grid is empty".into()));
        }
        GdConfig::new(eta, Iterations::Infinity).check(self.cache)?;
        let limit = filter_vector(self.cache, eta, Iterations::Infinity);
        let mut sorted = grid.to_vec();
        sorted.sort();
        sorted.dedup();

        let mut risks = Vec::with_capacity(sorted.len());
        let mut best: Option<(usize, f64)> = None;
        for (i, &k) in sorted.iter().enumerate() {
            let filter = filter_vector(self.cache, eta, k);
            // A finite k whose filter equals the limit bit for bit is W^inf.
            let k = if k != Iterations::Infinity && filter == limit {
                Iterations::Infinity
            } else {
                k
            };
            let risk = self.risk_of_filter(&filter);
            risks.push((k, risk));
            if best.is_none_or(|(_, r)| risk < r) {
                best = Some((i, risk));
            }
        }
        let (idx, risk) = best.expect("grid is non-empty");
        Ok(StoppingChoice {
            k_opt: risks[idx].0,
            eta,
            risk,
            risks,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingChoice {
    pub k_opt: Iterations,
    pub eta: f64,
    pub risk: f64,
    /// Risk at each grid point in ascending `k`; saturated finite points are
    /// reported as `Infinity`.
    pub risks: Vec<(Iterations, f64)>,
}

/// Oracle-stopped gradient-descent estimator with the default stepsize
/// `1 / s_max^2`: the grid point of least true risk, ties to the smaller `k`.
pub fn early_stopped_estimator(
    cache: &SvdCache,
    x: &DMatrix<f64>,
    basis: &SubspaceBasis,
    params: &ModelParams,
    k_grid: &[Iterations],
) -> Result<(LinearEstimator, StoppingChoice)> {
    let eta = GdConfig::default_for(cache, Iterations::Infinity).eta;
    let choice = SpectralRisk::new(cache, x, basis, params)?.select(eta, k_grid)?;
    let w = LinearEstimator::dense(filtered_map(
        cache,
        x,
        &filter_vector(cache, eta, choice.k_opt),
    ))?;
    Ok((w, choice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::risk_closed_form;
    use crate::subspace::{orthonormality_error, sample_basis, sample_dataset};

    fn small(n: usize, d: usize, count: usize, sigma: f64, seed: u64) -> (ModelParams, SubspaceBasis, Dataset) {
        let p = ModelParams::new(d, n, sigma).unwrap();
        let b = sample_basis(n, d, seed).unwrap();
        let ds = sample_dataset(&p, &b, count, seed + 1).unwrap();
        (p, b, ds)
    }

    fn rel_dist(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn duplicated_column_has_rank_one() {
        let col = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let y = DMatrix::from_columns(&[col.clone(), col]);
        let cache = SvdCache::from_matrix(&y).unwrap();
        assert_eq!(cache.rank(), 1);
        assert!(rel_dist(&cache.reconstruct(), &y) < 1e-12);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let cache = SvdCache::from_matrix(&DMatrix::zeros(4, 3)).unwrap();
        assert_eq!(cache.rank(), 0);
        assert_eq!(cache.max_singular_value(), 0.0);
    }

    #[test]
    fn rejects_non_finite() {
        let mut y = DMatrix::zeros(3, 3);
        y[(0, 0)] = f64::INFINITY;
        assert!(matches!(SvdCache::from_matrix(&y), Err(Error::Numerical(_))));
    }

    #[test]
    fn svd_matches_reference_decomposition() {
        for &(n, count) in &[(60, 25), (30, 80), (40, 40)] {
            let (_, _, ds) = small(n, 5, count, 0.3, 3);
            let cache = svd_of(&ds).unwrap();
            let reference = ds.noisy.clone().svd(false, false);
            let mut want: Vec<f64> = reference.singular_values.iter().copied().collect();
            want.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert_eq!(cache.rank(), n.min(count));
            for (got, want) in cache.singular_values().iter().zip(&want) {
                assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{got} vs {want}");
            }
            assert!(rel_dist(&cache.reconstruct(), &ds.noisy) <= 1e-8);
            assert!(orthonormality_error(cache.left()) <= 1e-8);
            assert!(orthonormality_error(cache.right()) <= 1e-8);
        }
    }

    #[test]
    fn svd_invariants_near_square_noise() {
        // Square noise-dominated matrices have tiny trailing singular values.
        let (_, _, ds) = small(100, 10, 100, 0.05, 8);
        let cache = svd_of(&ds).unwrap();
        let s = cache.singular_values();
        assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
        assert!(s.iter().all(|&v| v > cache.rank_tol()));
        assert!(rel_dist(&cache.reconstruct(), &ds.noisy) <= 1e-8);
        assert!(orthonormality_error(cache.left()) <= 1e-8);
        assert!(orthonormality_error(cache.right()) <= 1e-8);
    }

    fn spectral_ratios(count: usize, seed: u64) -> (f64, f64) {
        let (_, _, ds) = small(1000, 10, count, 0.1, seed);
        let cache = svd_of(&ds).unwrap();
        let s = cache.singular_values();
        let count = count as f64;
        let signal = s[9] * s[9] / count / 1.01;
        let edge = 0.01 * (1.0 + (1000.0 / count).sqrt()).powi(2);
        (signal, s[10] * s[10] / count / edge)
    }

    #[test]
    fn signal_and_noise_singular_values_separate() {
        // The smallest signal value sits near the edge (1 - sqrt(d/N))^2 = 0.864
        // at N = 2000, so the lower bound is taken from there.
        let (signal, noise) = spectral_ratios(2000, 21);
        assert!((0.85..=1.2).contains(&signal), "{signal}");
        assert!((0.5..=1.5).contains(&noise), "{noise}");
    }

    #[test]
    fn spectral_gap_at_five_thousand_samples() {
        for seed in 0..5 {
            let (signal, noise) = spectral_ratios(5000, 300 + seed);
            assert!(signal >= 0.8, "seed {seed}: {signal}");
            assert!(noise <= 1.5, "seed {seed}: {noise}");
        }
    }

    #[test]
    fn zero_iterations_give_zero_map() {
        let (p, b, ds) = small(20, 3, 15, 0.1, 1);
        let cache = svd_of(&ds).unwrap();
        let cfg = GdConfig::default_for(&cache, Iterations::Finite(0));
        let w = gd_estimator_closed(&cache, &ds.clean, &cfg).unwrap();
        assert!(w.to_dense().iter().all(|&v| v == 0.0));
        assert!((risk_closed_form(&w, &b, &p).unwrap() - 1.0).abs() < 1e-12);
        let w_it = gd_estimator_iterative(&ds, &cfg).unwrap();
        assert!(w_it.to_dense().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn one_step_is_scaled_correlation() {
        let (_, _, ds) = small(20, 3, 15, 0.1, 2);
        let cfg = GdConfig::new(0.003, Iterations::Finite(1));
        let w = gd_estimator_iterative(&ds, &cfg).unwrap().to_dense();
        let want = (&ds.clean * ds.noisy.transpose()) * 0.003;
        assert_eq!(w, want);
    }

    #[test]
    fn iterative_rejects_infinity() {
        let (_, _, ds) = small(10, 2, 5, 0.1, 2);
        let cfg = GdConfig::new(0.01, Iterations::Infinity);
        assert!(matches!(gd_estimator_iterative(&ds, &cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn iterative_detects_divergence() {
        let (_, _, ds) = small(10, 2, 5, 0.1, 2);
        let cfg = GdConfig::new(1e3, Iterations::Finite(500));
        assert!(matches!(gd_estimator_iterative(&ds, &cfg), Err(Error::Divergence { .. })));
    }

    #[test]
    fn closed_form_rejects_large_stepsize() {
        let (_, _, ds) = small(10, 2, 5, 0.1, 2);
        let cache = svd_of(&ds).unwrap();
        let mut cfg = GdConfig::default_for(&cache, Iterations::Finite(3));
        cfg.eta *= 1.01;
        assert!(matches!(
            gd_estimator_closed(&cache, &ds.clean, &cfg),
            Err(Error::Stepsize { .. })
        ));
    }

    #[test]
    fn closed_form_matches_iterations() {
        let (_, _, ds) = small(40, 5, 30, 0.1, 4);
        let cache = svd_of(&ds).unwrap();
        let cfg = GdConfig::default_for(&cache, Iterations::Finite(50));
        let closed = gd_estimator_closed(&cache, &ds.clean, &cfg).unwrap().to_dense();
        let iter = gd_estimator_iterative(&ds, &cfg).unwrap().to_dense();
        assert!(rel_dist(&closed, &iter) <= 1e-8);

        let (_, _, ds) = small(20, 3, 15, 0.2, 5);
        let cache = svd_of(&ds).unwrap();
        let cfg = GdConfig::default_for(&cache, Iterations::Finite(200));
        let closed = gd_estimator_closed(&cache, &ds.clean, &cfg).unwrap().to_dense();
        let iter = gd_estimator_iterative(&ds, &cfg).unwrap().to_dense();
        assert!(rel_dist(&closed, &iter) <= 1e-8);
    }

    #[test]
    fn infinite_iterations_match_pseudoinverse() {
        let (_, _, ds) = small(30, 4, 50, 0.1, 6);
        let cache = svd_of(&ds).unwrap();
        let cfg = GdConfig::default_for(&cache, Iterations::Infinity);
        let gd = gd_estimator_closed(&cache, &ds.clean, &cfg).unwrap().to_dense();
        let pinv = pinv_estimator(&cache, &ds.clean).unwrap().to_dense();
        assert!(rel_dist(&gd, &pinv) <= 1e-10);
        let reference = ds.noisy.clone().pseudo_inverse(1e-12).unwrap();
        assert!(rel_dist(&pinv, &(&ds.clean * reference)) <= 1e-8);
    }

    #[test]
    fn noiseless_pseudoinverse_interpolates() {
        let (_, _, ds) = small(30, 4, 12, 0.0, 7);
        let cache = svd_of(&ds).unwrap();
        assert_eq!(cache.rank(), 4);
        let w = pinv_estimator(&cache, &ds.clean).unwrap();
        assert!(rel_dist(&w.apply(&ds.noisy), &ds.clean) < 1e-12);
    }

    #[test]
    fn filter_is_monotone_and_converges() {
        for &x in &[1.0, 0.5, 1e-3, 1e-7] {
            let s = 2.0;
            let eta = x / (s * s);
            let mut prev = 0.0;
            for e in 0..=20 {
                let v = filter_value(s, eta, Iterations::Finite(1 << e));
                assert!(v >= prev && v <= 1.0 / s);
                prev = v;
            }
            if x >= 1e-3 {
                assert!((prev - 0.5).abs() < 1e-12);
            }
            assert_eq!(filter_value(s, eta, Iterations::Infinity), 0.5);
            assert_eq!(filter_value(s, eta, Iterations::Finite(0)), 0.0);
        }
    }

    #[test]
    fn pca_noiseless_recovers_subspace() {
        let (p, b, ds) = small(50, 5, 20, 0.0, 9);
        let cache = svd_of(&ds).unwrap();
        let w = pca_estimator(&cache, &p).unwrap();
        assert!(risk_closed_form(&w, &b, &p).unwrap().abs() < 1e-12);
        assert!(rel_dist(&w.apply(&ds.clean), &ds.clean) < 1e-12);
    }

    #[test]
    fn pca_truncates_when_fewer_samples_than_dims() {
        let (p, b, ds) = small(1000, 10, 1, 0.1, 10);
        let cache = svd_of(&ds).unwrap();
        let w = pca_estimator(&cache, &p).unwrap();
        match &w {
            LinearEstimator::ScaledProjection { basis, .. } => assert_eq!(basis.ncols(), 1),
            other => panic!("{other:?}"),
        }
        let generic = risk_closed_form(&LinearEstimator::dense(w.to_dense()).unwrap(), &b, &p).unwrap();
        let factored = risk_closed_form(&w, &b, &p).unwrap();
        assert!((generic - factored).abs() < 1e-10);
        assert!(factored >= 0.9 * (1.0 - 1.0 / 1.01f64.powi(2)));
        assert!(factored > 0.85);
    }

    #[test]
    fn spectral_risk_matches_dense_risk() {
        let (p, b, ds) = small(40, 4, 60, 0.2, 11);
        let cache = svd_of(&ds).unwrap();
        let eval = SpectralRisk::new(&cache, &ds.clean, &b, &p).unwrap();
        for k in default_k_grid(12) {
            let cfg = GdConfig::default_for(&cache, k);
            let dense = gd_estimator_closed(&cache, &ds.clean, &cfg).unwrap();
            let want = risk_closed_form(&dense, &b, &p).unwrap();
            assert!((eval.risk(&cfg).unwrap() - want).abs() <= 1e-10 * want.max(1.0), "k={k}");
        }
    }

    #[test]
    fn early_stopping_picks_grid_minimum() {
        let (p, b, ds) = small(100, 10, 100, 0.05, 12);
        let cache = svd_of(&ds).unwrap();
        let grid = default_k_grid(DEFAULT_K_MAX_EXP);
        let (w, choice) = early_stopped_estimator(&cache, &ds.clean, &b, &p, &grid).unwrap();
        let min = choice.risks.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        assert_eq!(choice.risk, min);
        let inf_risk = choice.risks.last().unwrap().1;
        assert!(choice.risk <= inf_risk + 1e-12);
        assert!((risk_closed_form(&w, &b, &p).unwrap() - choice.risk).abs() < 1e-10);
        assert!(choice.k_opt != Iterations::Infinity);
    }

    #[test]
    fn noiseless_early_stopping_runs_to_convergence() {
        for seed in 0..5 {
            let (p, b, ds) = small(200, 10, 100, 0.0, 20 + seed);
            let cache = svd_of(&ds).unwrap();
            let grid = default_k_grid(DEFAULT_K_MAX_EXP);
            let (_, choice) = early_stopped_estimator(&cache, &ds.clean, &b, &p, &grid).unwrap();
            assert_eq!(choice.k_opt, Iterations::Infinity, "seed {seed}: {:?}", choice.risks);
            let risks: Vec<f64> = choice.risks.iter().map(|r| r.1).collect();
            assert!(risks.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn iterations_parse_and_order() {
        assert_eq!("inf".parse::<Iterations>().unwrap(), Iterations::Infinity);
        assert_eq!("12".parse::<Iterations>().unwrap(), Iterations::Finite(12));
        assert!("x".parse::<Iterations>().is_err());
        assert!(Iterations::Finite(u64::MAX) < Iterations::Infinity);
        let g = default_k_grid(20);
        assert_eq!(g.len(), 23);
        assert_eq!(g[0], Iterations::Finite(0));
        assert_eq!(g[21], Iterations::Finite(1 << 20));
    }
}
