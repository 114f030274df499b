use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::{hyperspherical, hyperspherical_domain, Chart, Grid, SharedChart};
use crate::error::{GeomError, Result};
use crate::fd;
use crate::linalg::VecN;
use crate::sampling::Halton;

use super::blocks::{rotation_chart, rotation_hypersurface, BlockHypersurface, BlockOptions};

/// Warped product `L^k ×_ρ S^{m}`: a base chart into the half-space
/// `(x_1, …, x_k, d)`, the warping function sampled on the base grid and the
/// fiber dimension `m`. The fiber is the round sphere of radius
/// `fiber_radius_convention`.
#[derive(Clone)]
pub struct WarpedProductSpec {
    pub base_chart: SharedChart,
    pub base_grid: Grid,
    pub rho: Vec<f64>,
    pub fiber_dim: usize,
    pub fiber_radius_convention: f64,
}

impl std::fmt::Debug for WarpedProductSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarpedProductSpec")
            .field("base_grid", &self.base_grid)
            .field("fiber_dim", &self.fiber_dim)
            .field("fiber_radius_convention", &self.fiber_radius_convention)
            .finish_non_exhaustive()
    }
}

impl WarpedProductSpec {
    pub fn new(base_chart: SharedChart, counts: &[usize], rho: Vec<f64>, fiber_dim: usize) -> Result<Self> {
        if base_chart.ambient_dim() != base_chart.param_dim() + 1 {
            return Err(GeomError::DimensionMismatch { expected: base_chart.param_dim() + 1, found: base_chart.ambient_dim() });
        }
        let base_grid = Grid::new(base_chart.domain(), counts)?;
        if rho.len() != base_grid.len() {
            return Err(GeomError::DimensionMismatch { expected: base_grid.len(), found: rho.len() });
        }
        if rho.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(GeomError::InvalidInput("warping function must be finite and nonnegative".into()));
        }
        if fiber_dim == 0 {
            return Err(GeomError::InvalidInput("fiber dimension must be positive".into()));
        }
        Ok(Self { base_chart, base_grid, rho, fiber_dim, fiber_radius_convention: 1.0 })
    }

    /// Samples `rho` on the base grid.
    pub fn from_fn(base_chart: SharedChart, counts: &[usize], rho: impl Fn(&[f64]) -> f64, fiber_dim: usize) -> Result<Self> {
        let grid = Grid::new(base_chart.domain(), counts)?;
        let values = (0..grid.len()).map(|i| rho(&grid.params(i))).collect();
        Self::new(base_chart, counts, values, fiber_dim)
    }

    pub fn with_fiber_radius(mut self, c: f64) -> Self {
        self.fiber_radius_convention = c;
        self
    }

    pub fn base_dim(&self) -> usize {
        self.base_chart.param_dim()
    }

    /// Fiber chart: the sphere `S^m` of radius `fiber_radius_convention`.
    pub fn fiber_point(&self, s: &[f64]) -> VecN {
        hyperspherical(s) * self.fiber_radius_convention
    }
}

/// `⟨u, u'⟩ + ρ(node)^2 ⟨v, v'⟩` with base tangents `u` in the half-space and
/// fiber tangents `v` tangent to the fiber sphere.
pub fn warped_metric_eval(spec: &WarpedProductSpec, node: usize, u: &VecN, u2: &VecN, v: &VecN, v2: &VecN) -> f64 {
    let rho = spec.rho[node];
    u.dot(u2) + rho * rho * v.dot(v2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    pub fd_step: f64,
    /// Fiber parameter points per base node.
    pub fiber_samples: usize,
    /// Allowed `|d - c ρ|`, relative to `max(1, d)`.
    pub realizability_tol: f64,
    pub seed: u64,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self { fd_step: 1e-4, fiber_samples: 4, realizability_tol: 1e-6, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// Max over samples of `‖G_fd - G_w‖_∞ / ‖G_w‖_∞`.
    pub max_relative_error: f64,
    pub samples: usize,
    pub fd_step: f64,
}

#[derive(Debug, Clone)]
pub struct WarpedRotation {
    pub rotation: BlockHypersurface,
    pub metric: MetricReport,
}

/// Realizes a warped product whose warping function is a constant multiple
/// of the axis distance as a rotation hypersurface, and compares the induced
/// first fundamental form with the warped metric.
pub fn warped_to_rotation(spec: &WarpedProductSpec, block: &BlockOptions, metric: MetricOptions) -> Result<WarpedRotation> {
    let k = spec.base_dim();
    let c = spec.fiber_radius_convention;
    for node in 0..spec.base_grid.len() {
        let d = spec.base_chart.eval(&spec.base_grid.params(node))[k];
        let mismatch = (d - c * spec.rho[node]).abs();
        if mismatch > metric.realizability_tol * d.abs().max(1.0) {
            return Err(GeomError::Unrealizable { node, mismatch });
        }
    }
    let n = k + spec.fiber_dim;
    let rotation = rotation_hypersurface(k, n, Arc::clone(&spec.base_chart), block)?;
    let report = metric_report(spec, metric)?;
    Ok(WarpedRotation { rotation, metric: report })
}

fn gram(cols: &[VecN]) -> DMatrix<f64> {
    DMatrix::from_fn(cols.len(), cols.len(), |i, j| cols[i].dot(&cols[j]))
}

/// First fundamental form of the rotation chart by central differences
/// against [`warped_metric_eval`] on the matching coordinate vectors.
pub fn metric_report(spec: &WarpedProductSpec, opts: MetricOptions) -> Result<MetricReport> {
    let k = spec.base_dim();
    let m = spec.fiber_dim;
    let h = opts.fd_step;
    let margin = 0.2;
    let chart = rotation_chart(k, k + m, Arc::clone(&spec.base_chart), margin);
    let fiber_domain = hyperspherical_domain(m, margin);
    let fiber_params: Vec<Vec<f64>> = Halton::new(m, opts.seed)
        .take(opts.fiber_samples.max(1))
        .map(|u| u.iter().zip(&fiber_domain).map(|(t, a)| a.lo + t * a.len()).collect())
        .collect();
    let base = |u: &[f64]| spec.base_chart.eval(u);
    let fiber = |s: &[f64]| spec.fiber_point(s);
    let full = |w: &[f64]| chart.eval(w);

    let mut worst: f64 = 0.0;
    let mut count = 0;
    for node in 0..spec.base_grid.len() {
        let u = spec.base_grid.params(node);
        if !spec.base_grid.is_interior(&u, h) || spec.rho[node] <= 0.0 {
            continue;
        }
        let base_t: Vec<VecN> = (0..k).map(|i| fd::partial(&base, &u, i, h)).collect();
        for s in &fiber_params {
            let fiber_t: Vec<VecN> = (0..m).map(|a| fd::partial(&fiber, s, a, h)).collect();
            let mut w = u.clone();
            w.extend_from_slice(s);
            let cols: Vec<VecN> = (0..k + m).map(|i| fd::partial(&full, &w, i, h)).collect();
            let g_fd = gram(&cols);
            let zb = VecN::zeros(k + 1);
            let zf = VecN::zeros(m + 1);
            let g_w = DMatrix::from_fn(k + m, k + m, |i, j| match (i < k, j < k) {
                (true, true) => warped_metric_eval(spec, node, &base_t[i], &base_t[j], &zf, &zf),
                (false, false) => warped_metric_eval(spec, node, &zb, &zb, &fiber_t[i - k], &fiber_t[j - k]),
                (true, false) => warped_metric_eval(spec, node, &base_t[i], &zb, &zf, &fiber_t[j - k]),
                (false, true) => warped_metric_eval(spec, node, &zb, &base_t[j], &fiber_t[i - k], &zf),
            });
            let scale = g_w.amax();
            if scale <= 0.0 {
                return Err(GeomError::DegenerateTangents { params: w });
            }
            worst = worst.max((g_fd - &g_w).amax() / scale);
            count += 1;
        }
    }
    Ok(MetricReport { max_relative_error: worst, samples: count, fd_step: h })
}
