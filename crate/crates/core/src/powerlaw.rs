//! Power-law fits `value ≈ beta * N^alpha` by least squares in log-log space.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum relative SSE reduction for a two-segment fit to count as a break.
pub const BREAK_EVIDENCE: f64 = 0.05;
pub const DEFAULT_MIN_SEGMENT: usize = 3;
/// Excess values at or below this fraction of the largest value are dropped.
pub const DROP_RELATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub log_beta: f64,
    pub r_squared: f64,
    /// Sum of squared residuals in natural-log space.
    pub sse: f64,
    /// Index range of the input points covered by the fit.
    pub region: Range<usize>,
    /// Points actually used; differs from the region length when some were
    /// dropped.
    pub n_points: usize,
    /// Indices removed because their excess over the floor was not positive.
    pub dropped: Vec<usize>,
    /// Floor subtracted before fitting.
    pub floor: Option<f64>,
}

impl PowerLawFit {
    pub fn beta(&self) -> f64 {
        self.log_beta.exp()
    }

    /// `beta * n^alpha`; for excess fits this is the value above the floor.
    pub fn predict(&self, n: f64) -> f64 {
        (self.log_beta + self.alpha * n.ln()).exp()
    }

    /// Training-set size at which [`predict`](Self::predict) reaches `value`.
    pub fn solve_for_size(&self, value: f64) -> Result<f64> {
        if self.alpha == 0.0 {
            return Err(Error::Numerical("a flat fit cannot be inverted".into()));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Numerical(format!("cannot solve for a target value of {value}")));
        }
        Ok(((value.ln() - self.log_beta) / self.alpha).exp())
    }
}

/// Ordinary or weighted least squares of `y` on `x`.
fn line_fit(x: &[f64], y: &[f64], w: Option<&[f64]>) -> (f64, f64, f64, f64) {
    let weight = |i: usize| w.map_or(1.0, |w| w[i]);
    let total: f64 = (0..x.len()).map(weight).sum();
    let mx = (0..x.len()).map(|i| weight(i) * x[i]).sum::<f64>() / total;
    let my = (0..x.len()).map(|i| weight(i) * y[i]).sum::<f64>() / total;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += weight(i) * dx * dx;
        sxy += weight(i) * dx * dy;
        syy += weight(i) * dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = (0..x.len())
        .map(|i| weight(i) * (y[i] - intercept - slope * x[i]).powi(2))
        .sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    (slope, intercept, sse, r2)
}

fn check_sizes(points: &[(f64, f64)], indices: &[usize]) -> Result<()> {
    let bad: Vec<usize> = indices
        .iter()
        .copied()
        .filter(|&i| !(points[i].0 > 0.0 && points[i].0.is_finite()))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Domain { indices: bad });
    }
    let mut sizes: Vec<f64> = indices.iter().map(|&i| points[i].0).collect();
    sizes.sort_by(f64::total_cmp);
    if sizes.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InsufficientData("training-set sizes must be distinct".into()));
    }
    Ok(())
}

fn resolve_region(len: usize, region: Option<Range<usize>>) -> Result<Range<usize>> {
    let region = region.unwrap_or(0..len);
    if region.start > region.end || region.end > len {
        return Err(Error::Config(format!(
            "fit region {}..{} is outside 0..{len}",
            region.start, region.end
        )));
    }
    Ok(region)
}

/// Fit over the given point indices, which must all hold positive values.
fn fit_indices(
    points: &[(f64, f64)],
    indices: &[usize],
    weights: Option<&[f64]>,
    floor: Option<f64>,
) -> Result<(f64, f64, f64, f64)> {
    if indices.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "a power-law fit needs at least 2 points, got {}",
            indices.len()
        )));
    }
    check_sizes(points, indices)?;
    let base = floor.unwrap_or(0.0);
    let x: Vec<f64> = indices.iter().map(|&i| points[i].0.ln()).collect();
    let y: Vec<f64> = indices.iter().map(|&i| (points[i].1 - base).ln()).collect();
    let w: Option<Vec<f64>> = weights.map(|w| indices.iter().map(|&i| w[i]).collect());
    Ok(line_fit(&x, &y, w.as_deref()))
}

fn build_fit(
    points: &[(f64, f64)],
    kept: &[usize],
    dropped: Vec<usize>,
    weights: Option<&[f64]>,
    floor: Option<f64>,
) -> Result<PowerLawFit> {
    let (alpha, log_beta, sse, r_squared) = fit_indices(points, kept, weights, floor)?;
    Ok(PowerLawFit {
        alpha,
        log_beta,
        r_squared,
        sse,
        region: kept[0]..kept[kept.len() - 1] + 1,
        n_points: kept.len(),
        dropped,
        floor,
    })
}

/// Plain fit of `value = beta * N^alpha` over `region` (all points if `None`).
pub fn fit_powerlaw(points: &[(f64, f64)], region: Option<Range<usize>>) -> Result<PowerLawFit> {
    fit_powerlaw_weighted(points, region, None)
}

/// Weighted fit; `weights[i]` multiplies the squared log residual of point `i`.
pub fn fit_powerlaw_weighted(
    points: &[(f64, f64)],
    region: Option<Range<usize>>,
    weights: Option<&[f64]>,
) -> Result<PowerLawFit> {
    let region = resolve_region(points.len(), region)?;
    if let Some(w) = weights {
        if w.len() != points.len() || w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("weights must be positive, one per point".into()));
        }
    }
    let bad: Vec<usize> = region.clone().filter(|&i| !(points[i].1 > 0.0)).collect();
    if !bad.is_empty() {
        return Err(Error::Domain { indices: bad });
    }
    let kept: Vec<usize> = region.collect();
    build_fit(points, &kept, Vec::new(), weights, None)
}

/// Indices in `region` whose excess over `floor` is meaningfully positive, and
/// the ones dropped.
fn split_excess(points: &[(f64, f64)], region: Range<usize>, floor: f64) -> (Vec<usize>, Vec<usize>) {
    let scale = points[region.clone()]
        .iter()
        .map(|p| p.1.abs())
        .fold(0.0, f64::max);
    let tol = DROP_RELATIVE_TOL * scale;
    region.partition(|&i| points[i].1 - floor > tol)
}

/// Fit of `value - floor = beta * N^alpha`, dropping points whose excess is
/// not positive.
pub fn fit_excess_powerlaw(
    points: &[(f64, f64)],
    floor: f64,
    region: Option<Range<usize>>,
) -> Result<PowerLawFit> {
    if !floor.is_finite() {
        return Err(Error::Config("floor must be finite".into()));
    }
    let region = resolve_region(points.len(), region)?;
    let (kept, dropped) = split_excess(points, region, floor);
    build_fit(points, &kept, dropped, None, Some(floor))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentedFit {
    pub left: PowerLawFit,
    pub right: PowerLawFit,
    /// Index of the first point of the right segment.
    pub break_index: usize,
    /// Geometric mean of the sizes on either side of the break.
    pub break_size: f64,
    pub total_sse: f64,
    pub single: PowerLawFit,
    /// Two segments cut the single-fit SSE by at least [`BREAK_EVIDENCE`].
    pub breakpoint_evident: bool,
}

/// Best two-segment fit over all break positions leaving at least `min_seg`
/// points on each side. Ties go to the earlier break.
pub fn fit_segmented(points: &[(f64, f64)], min_seg: usize, floor: Option<f64>) -> Result<SegmentedFit> {
    if min_seg < 2 {
        return Err(Error::Config("min_seg must be at least 2".into()));
    }
    if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::Config("training-set sizes must be strictly ascending".into()));
    }
    let (kept, dropped) = match floor {
        Some(f) => {
            if !f.is_finite() {
                return Err(Error::Config("floor must be finite".into()));
            }
            split_excess(points, 0..points.len(), f)
        }
        None => {
            let bad: Vec<usize> = (0..points.len()).filter(|&i| !(points[i].1 > 0.0)).collect();
            if !bad.is_empty() {
                return Err(Error::Domain { indices: bad });
            }
            ((0..points.len()).collect(), Vec::new())
        }
    };
    if kept.len() < 2 * min_seg {
        return Err(Error::InsufficientData(format!(
            "a two-segment fit with min_seg = {min_seg} needs {} points, got {}",
            2 * min_seg,
            kept.len()
        )));
    }

    let single = build_fit(points, &kept, dropped.clone(), None, floor)?;
    // Totals within rounding noise of each other count as ties.
    let tie_tol = 1e-12 * single.sse + 1e-24;
    let mut best: Option<(usize, f64)> = None;
    for b in min_seg..=kept.len() - min_seg {
        let (_, _, left_sse, _) = fit_indices(points, &kept[..b], None, floor)?;
        let (_, _, right_sse, _) = fit_indices(points, &kept[b..], None, floor)?;
        let total = left_sse + right_sse;
        if best.is_none_or(|(_, t)| total < t - tie_tol) {
            best = Some((b, total));
        }
    }
    let (b, total_sse) = best.expect("at least one break position");
    let split_dropped = |range: Range<usize>| -> Vec<usize> {
        dropped.iter().copied().filter(|i| range.contains(i)).collect()
    };
    let mut left = build_fit(points, &kept[..b], Vec::new(), None, floor)?;
    left.dropped = split_dropped(left.region.clone());
    let mut right = build_fit(points, &kept[b..], Vec::new(), None, floor)?;
    right.dropped = split_dropped(right.region.clone());
    let break_size = (points[kept[b - 1]].0 * points[kept[b]].0).sqrt();
    let breakpoint_evident = single.sse > 0.0 && (single.sse - total_sse) / single.sse >= BREAK_EVIDENCE;
    Ok(SegmentedFit {
        break_index: kept[b],
        break_size,
        total_sse,
        breakpoint_evident,
        left,
        right,
        single,
    })
}
