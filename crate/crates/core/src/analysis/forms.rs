use nalgebra::DMatrix;

use crate::chart::{Chart, Grid};
use crate::error::{GeomError, Result};
use crate::fd;
use crate::linalg::{column_frame, symmetric_eigen, VecN, DEFAULT_RANK_TOL};

const MIN_METRIC_EIGENVALUE: f64 = 1e-8;
const CENTROID_TIE: f64 = 1e-12;

/// Fundamental forms of a chart at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample {
    pub point: VecN,
    pub params: Vec<f64>,
    pub tangents: Vec<VecN>,
    pub normal: VecN,
    /// Gram matrix of the coordinate tangents.
    pub first_ff: DMatrix<f64>,
    /// `h_ij = -⟨∂_i ∂_j F, ν⟩`.
    pub second_ff_scalar: DMatrix<f64>,
    /// Eigenvalues of the shape operator `g^{-1} h`, ascending.
    pub principal_curvatures: Vec<f64>,
}

impl CurvatureSample {
    /// Largest `|κ|`, the operator norm of the shape operator.
    pub fn shape_norm(&self) -> f64 {
        self.principal_curvatures.iter().fold(0.0, |m, k| m.max(k.abs()))
    }
}

fn check_stencil(chart: &dyn Chart, params: &[f64], h: f64) -> Result<()> {
    if params.len() != chart.param_dim() {
        return Err(GeomError::DimensionMismatch { expected: chart.param_dim(), found: params.len() });
    }
    for (axis, (a, u)) in chart.domain().iter().zip(params).enumerate() {
        if !a.periodic && (u - h < a.lo - 1e-12 || u + h > a.hi + 1e-12) {
            return Err(GeomError::StencilOutsideDomain { axis });
        }
    }
    Ok(())
}

/// First and second fundamental forms of a hypersurface chart by central
/// differences of step `fd_step`. The unit normal spans the orthogonal
/// complement of the tangents and points away from the centroid of the
/// stencil points; on flat stencils the largest normal component is made
/// positive instead.
pub fn fundamental_forms(chart: &dyn Chart, params: &[f64], fd_step: f64) -> Result<CurvatureSample> {
    let n = chart.param_dim();
    if chart.ambient_dim() != n + 1 {
        return Err(GeomError::DimensionMismatch { expected: n + 1, found: chart.ambient_dim() });
    }
    check_stencil(chart, params, fd_step)?;
    let f = |v: &[f64]| chart.eval(v);
    let point = chart.eval(params);
    let tangents: Vec<VecN> = (0..n).map(|i| fd::partial(&f, params, i, fd_step)).collect();
    let first_ff = DMatrix::from_fn(n, n, |i, j| tangents[i].dot(&tangents[j]));
    let (g_eigs, _) = symmetric_eigen(&first_ff);
    if g_eigs.first().is_some_and(|e| *e <= MIN_METRIC_EIGENVALUE) || g_eigs.iter().any(|e| !e.is_finite()) {
        return Err(GeomError::DegenerateTangents { params: params.to_vec() });
    }
    let span = column_frame(&DMatrix::from_columns(&tangents), DEFAULT_RANK_TOL)
        .map_err(|_| GeomError::DegenerateTangents { params: params.to_vec() })?;
    let normal_space = span.complement();
    if normal_space.rank() != 1 {
        return Err(GeomError::DegenerateTangents { params: params.to_vec() });
    }
    let mut normal = normal_space.basis()[0].clone();

    let mut centroid = VecN::zeros(n + 1);
    for i in 0..n {
        for s in [-1.0, 1.0] {
            let mut v = params.to_vec();
            v[i] += s * fd_step;
            centroid += chart.eval(&v);
        }
    }
    centroid /= (2 * n) as f64;
    let away = (&point - &centroid).dot(&normal);
    let flip = if away.abs() > CENTROID_TIE * fd_step * fd_step {
        away < 0.0
    } else {
        let k = normal.iamax();
        normal[k] < 0.0
    };
    if flip {
        normal = -normal;
    }

    let mut second_ff_scalar = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = -fd::second_partial(&f, params, i, j, fd_step).dot(&normal);
            second_ff_scalar[(i, j)] = v;
            second_ff_scalar[(j, i)] = v;
        }
    }
    let chol = first_ff.clone().cholesky().ok_or_else(|| GeomError::DegenerateTangents { params: params.to_vec() })?;
    let l_inv = chol.l().try_inverse().ok_or_else(|| GeomError::DegenerateTangents { params: params.to_vec() })?;
    let shape = &l_inv * &second_ff_scalar * l_inv.transpose();
    let (principal_curvatures, _) = symmetric_eigen(&((&shape + shape.transpose()) * 0.5));
    Ok(CurvatureSample {
        point,
        params: params.to_vec(),
        tangents,
        normal,
        first_ff,
        second_ff_scalar,
        principal_curvatures,
    })
}

/// Number of principal curvatures with `|κ| < eig_tol`.
pub fn relative_nullity(sample: &CurvatureSample, eig_tol: f64) -> usize {
    sample.principal_curvatures.iter().filter(|k| k.abs() < eig_tol).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullityReport {
    /// Grid nodes that admit a full stencil.
    pub nodes: Vec<usize>,
    pub nullity: Vec<usize>,
    pub threshold: f64,
}

impl NullityReport {
    pub fn min(&self) -> Option<usize> {
        self.nullity.iter().copied().min()
    }
}

/// Grid nodes whose stencil of half-width `h` stays inside the domain.
pub fn stencil_nodes(grid: &Grid, h: f64) -> Vec<usize> {
    (0..grid.len()).filter(|&i| grid.is_interior(&grid.params(i), h)).collect()
}

pub fn nullity_report(chart: &dyn Chart, grid: &Grid, fd_step: f64, eig_tol: f64) -> Result<NullityReport> {
    let nodes = stencil_nodes(grid, fd_step);
    let nullity = nodes
        .iter()
        .map(|&i| fundamental_forms(chart, &grid.params(i), fd_step).map(|s| relative_nullity(&s, eig_tol)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NullityReport { nodes, nullity, threshold: eig_tol })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub tangent: bool,
    /// `|⟨F, ν⟩|`.
    pub normal_component: f64,
}

/// Whether the position vector is tangent to the hypersurface at `params`.
pub fn position_tangency(chart: &dyn Chart, params: &[f64], fd_step: f64, tol: f64) -> Result<Tangency> {
    let s = fundamental_forms(chart, params, fd_step)?;
    let normal_component = s.point.dot(&s.normal).abs();
    Ok(Tangency { tangent: normal_component < tol, normal_component })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicScan {
    pub nodes: Vec<usize>,
    /// Smallest shape-operator norm over scanned nodes.
    pub min_norm: f64,
    pub scanned: usize,
    pub tol: f64,
}

/// Nodes where every principal curvature is below `tol` in absolute value.
pub fn totally_geodesic_points(chart: &dyn Chart, grid: &Grid, fd_step: f64, tol: f64) -> Result<GeodesicScan> {
    let mut nodes = Vec::new();
    let mut min_norm = f64::INFINITY;
    let scan = stencil_nodes(grid, fd_step);
    for &i in &scan {
        let norm = fundamental_forms(chart, &grid.params(i), fd_step)?.shape_norm();
        min_norm = min_norm.min(norm);
        if norm < tol {
            nodes.push(i);
        }
    }
    Ok(GeodesicScan { nodes, min_norm, scanned: scan.len(), tol })
}

/// Nodes where all principal curvatures exceed `tol`.
pub fn strictly_convex_nodes(chart: &dyn Chart, grid: &Grid, fd_step: f64, tol: f64) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for i in stencil_nodes(grid, fd_step) {
        let s = fundamental_forms(chart, &grid.params(i), fd_step)?;
        if s.principal_curvatures.iter().all(|k| *k > tol) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Gaussian curvature of a two-parameter chart from its metric alone
/// (Brioschi). The metric is differenced with step `fd_step`; tangents use a
/// tenth of it.
pub fn intrinsic_curvature_2d(chart: &dyn Chart, params: &[f64], fd_step: f64) -> Result<f64> {
    if chart.param_dim() != 2 {
        return Err(GeomError::DimensionMismatch { expected: 2, found: chart.param_dim() });
    }
    let inner = 0.1 * fd_step;
    check_stencil(chart, params, fd_step + inner)?;
    let f = |v: &[f64]| chart.eval(v);
    let metric = |v: &[f64]| {
        let xu = fd::partial(&f, v, 0, inner);
        let xv = fd::partial(&f, v, 1, inner);
        VecN::from_vec(vec![xu.dot(&xu), xu.dot(&xv), xv.dot(&xv)])
    };
    let m0 = metric(params);
    let (e, ff, g) = (m0[0], m0[1], m0[2]);
    let du = fd::partial(&metric, params, 0, fd_step);
    let dv = fd::partial(&metric, params, 1, fd_step);
    let e_vv = fd::second_partial(&metric, params, 1, 1, fd_step)[0];
    let g_uu = fd::second_partial(&metric, params, 0, 0, fd_step)[2];
    let f_uv = fd::second_partial(&metric, params, 0, 1, fd_step)[1];
    let (e_u, e_v) = (du[0], dv[0]);
    let (f_u, f_v) = (du[1], dv[1]);
    let (g_u, g_v) = (du[2], dv[2]);
    let det = e * g - ff * ff;
    if det <= MIN_METRIC_EIGENVALUE {
        return Err(GeomError::DegenerateTangents { params: params.to_vec() });
    }
    let m1 = nalgebra::Matrix3::new(
        -0.5 * e_vv + f_uv - 0.5 * g_uu,
        0.5 * e_u,
        f_u - 0.5 * e_v,
        f_v - 0.5 * g_u,
        e,
        ff,
        0.5 * g_v,
        ff,
        g,
    );
    let m2 = nalgebra::Matrix3::new(0.0, 0.5 * e_v, 0.5 * g_u, 0.5 * e_v, e, ff, 0.5 * g_u, ff, g);
    Ok((m1.determinant() - m2.determinant()) / (det * det))
}
