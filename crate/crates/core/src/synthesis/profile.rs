use nalgebra::DMatrix;

use crate::chart::{Chart, Grid, SharedChart};
use crate::error::{GeomError, Result};
use crate::fd;
use crate::isoparametric::WeylGroupRep;
use crate::linalg::VecN;
use crate::polar::SectionSubspace;
use crate::spatial::KdTree;

const PROFILE_FD_STEP: f64 = 1e-6;
const MIN_SINGULAR_VALUE: f64 = 1e-6;
const CLOSURE_GAP: f64 = 1e-8;

/// One grid node of a profile, with chart derivatives in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSample {
    pub params: Vec<f64>,
    pub coords: VecN,
    pub point: VecN,
    pub tangents: Vec<VecN>,
}

/// Hypersurface `L` of a section, given by a chart into section coordinates
/// and sampled on a grid.
#[derive(Clone)]
pub struct ProfileHypersurface {
    section: SectionSubspace,
    chart: SharedChart,
    grid: Grid,
    closed: bool,
    samples: Vec<ProfileSample>,
    tree: KdTree,
}

impl std::fmt::Debug for ProfileHypersurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProfileHypersurface")
            .field("section", &self.section)
            .field("grid", &self.grid)
            .field("closed", &self.closed)
            .field("samples", &self.samples.len())
            .finish_non_exhaustive()
    }
}

impl ProfileHypersurface {
    /// Samples `chart` on a grid with `counts` nodes per axis. The chart must
    /// have one parameter less than the section rank and be an immersion at
    /// every node; periodic axes must close up.
    pub fn new(section: SectionSubspace, chart: SharedChart, counts: &[usize]) -> Result<Self> {
        let rank = section.rank();
        if chart.ambient_dim() != rank {
            return Err(GeomError::DimensionMismatch { expected: rank, found: chart.ambient_dim() });
        }
        if chart.param_dim() + 1 != rank {
            return Err(GeomError::DimensionMismatch { expected: rank - 1, found: chart.param_dim() });
        }
        let grid = Grid::new(chart.domain(), counts)?;
        let closed = !chart.domain().is_empty() && chart.domain().iter().all(|a| a.periodic);

        let mut samples = Vec::with_capacity(grid.len());
        for node in 0..grid.len() {
            let params = grid.params(node);
            let coords = chart.eval(&params);
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(GeomError::NonFinite);
            }
            for (axis, a) in chart.domain().iter().enumerate() {
                if a.periodic {
                    let mut lo = params.clone();
                    let mut hi = params.clone();
                    lo[axis] = a.lo;
                    hi[axis] = a.hi;
                    let gap = (chart.eval(&lo) - chart.eval(&hi)).norm();
                    if gap > CLOSURE_GAP {
                        return Err(GeomError::NotClosed { gap });
                    }
                }
            }
            let jac = jacobian(chart.as_ref(), &params);
            let min_sv = if jac.ncols() == 0 {
                f64::INFINITY
            } else {
                jac.clone().svd(false, false).singular_values.min()
            };
            if min_sv <= MIN_SINGULAR_VALUE {
                return Err(GeomError::NotImmersed { node, min_sv });
            }
            let tangents = jac.column_iter().map(|c| section.point(c.as_slice())).collect();
            samples.push(ProfileSample { point: section.point(coords.as_slice()), params, coords, tangents });
        }
        let tree = KdTree::new(samples.iter().map(|s| s.coords.clone()).collect());
        Ok(Self { section, chart, grid, closed, samples, tree })
    }

    pub fn section(&self) -> &SectionSubspace {
        &self.section
    }

    pub fn chart(&self) -> &SharedChart {
        &self.chart
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Distance from a point in section coordinates to the profile: nearest
    /// sample, refined by Gauss-Newton steps on the chart inside its domain.
    pub fn distance_to(&self, y: &VecN) -> f64 {
        let Some((k, d0)) = self.tree.nearest(y) else {
            return f64::INFINITY;
        };
        let domain = self.chart.domain();
        let mut u = self.samples[k].params.clone();
        let mut best = d0;
        for _ in 0..12 {
            let r = y - self.chart.eval(&u);
            best = best.min(r.norm());
            if best < 1e-14 {
                break;
            }
            let jac = jacobian(self.chart.as_ref(), &u);
            let Ok(step) = jac.svd(true, true).solve(&r, 1e-12) else {
                break;
            };
            for (i, a) in domain.iter().enumerate() {
                u[i] += step[i];
                if !a.periodic {
                    u[i] = u[i].clamp(a.lo, a.hi);
                }
            }
            if step.norm() < 1e-15 {
                break;
            }
        }
        best.min((y - self.chart.eval(&u)).norm())
    }
}

/// Chart Jacobian by central differences; columns are the partials.
pub(crate) fn jacobian(chart: &dyn Chart, u: &[f64]) -> DMatrix<f64> {
    let f = |v: &[f64]| chart.eval(v);
    let cols: Vec<VecN> = (0..u.len()).map(|axis| fd::partial(&f, u, axis, PROFILE_FD_STEP)).collect();
    if cols.is_empty() {
        return DMatrix::zeros(chart.ambient_dim(), 0);
    }
    DMatrix::from_columns(&cols)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylInvarianceReport {
    pub max_deviation: f64,
    pub invariant: bool,
    pub tol: f64,
    /// Group element and sample attaining the maximum.
    pub worst: Option<(usize, usize)>,
}

/// Distance from each image `w·x` of a profile sample to the profile.
pub fn check_weyl_invariance(profile: &ProfileHypersurface, w: &WeylGroupRep, tol: f64) -> WeylInvarianceReport {
    let mut max_deviation: f64 = 0.0;
    let mut worst = None;
    for idx in 0..w.order() {
        for (k, s) in profile.samples().iter().enumerate() {
            let image = w.apply_ambient(idx, &s.point);
            let off = profile.section().distance(&image);
            let d = profile.distance_to(&profile.section().coordinates(&image)).max(off);
            if d > max_deviation {
                max_deviation = d;
                worst = Some((idx, k));
            }
        }
    }
    WeylInvarianceReport { max_deviation, invariant: max_deviation < tol, tol, worst }
}

/// Parameters of the evenness gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvennessOptions {
    /// Highest derivative order examined; odd orders `1, 3, ..` up to it.
    pub order: usize,
    pub step: f64,
    pub tol: f64,
}

impl Default for EvennessOptions {
    fn default() -> Self {
        Self { order: 5, step: 0.05, tol: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvennessReport {
    /// `(order, max |f^(order)(0)|)` over graph components.
    pub odd_derivatives: Vec<(usize, f64)>,
    pub failed_order: Option<usize>,
    pub passed: bool,
    pub options: EvennessOptions,
}

/// Odd derivatives at 0 of a vector-valued graph function, by central
/// differences of accuracy 4.
pub fn graph_evenness(f: &dyn Fn(f64) -> VecN, opts: EvennessOptions) -> EvennessReport {
    let dim = f(0.0).len();
    let mut odd_derivatives = Vec::new();
    let mut failed_order = None;
    for order in (1..=opts.order).step_by(2) {
        let value = (0..dim)
            .map(|c| fd::derivative(&|s| f(s)[c], 0.0, order, 4, opts.step).abs())
            .fold(0.0, f64::max);
        if value > opts.tol && failed_order.is_none() {
            failed_order = Some(order);
        }
        odd_derivatives.push((order, value));
    }
    EvennessReport { odd_derivatives, failed_order, passed: failed_order.is_none(), options: opts }
}

pub fn scalar_graph_evenness(f: &dyn Fn(f64) -> f64, opts: EvennessOptions) -> EvennessReport {
    graph_evenness(&|s| VecN::from_element(1, f(s)), opts)
}

/// Evenness of a profile where it meets a reflection wall. The profile near
/// `chart(u0)` is written as a graph over the wall normal `a` along the
/// parameter line `axis`; the graph's odd derivatives must vanish for the
/// reflected profile to close up smoothly. Charts are evaluated slightly
/// beyond the wall, so they must extend smoothly there.
pub fn boundary_smoothness_check(
    chart: &dyn Chart,
    u0: &[f64],
    axis: usize,
    wall_normal: &VecN,
    opts: EvennessOptions,
) -> Result<EvennessReport> {
    let a = wall_normal.normalize();
    let q = chart.eval(u0);
    let line = |t: f64| {
        let mut u = u0.to_vec();
        u[axis] += t;
        chart.eval(&u)
    };
    let f = |v: &[f64]| chart.eval(v);
    let tau = fd::partial(&f, u0, axis, PROFILE_FD_STEP);
    let speed = tau.dot(&a);
    if tau.norm() == 0.0 || 1.0 - speed.abs() / tau.norm() > 1e-6 {
        return Err(GeomError::GraphExtraction(format!(
            "profile tangent is not orthogonal to the wall (cosine {:.3e})",
            speed.abs() / tau.norm().max(f64::MIN_POSITIVE)
        )));
    }
    let graph = |s: f64| -> VecN {
        let mut t = s / speed;
        for _ in 0..60 {
            let r = (line(t) - &q).dot(&a) - s;
            if r.abs() < 1e-15 {
                break;
            }
            let h = 1e-7;
            let dr = ((line(t + h) - line(t - h)).dot(&a)) / (2.0 * h);
            t -= r / dr;
        }
        let p = line(t) - &q;
        &p - &a * p.dot(&a)
    };
    Ok(graph_evenness(&graph, opts))
}
