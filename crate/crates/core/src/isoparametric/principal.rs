use nalgebra::DMatrix;

use crate::action::LinearAction;
use crate::error::{GeomError, Result};
use crate::linalg::{orthonormalize, symmetric_eigen, Frame, OrthoMat, VecN};
use crate::sampling::{rng, unit_sphere_point};

use super::second_ff::{commutation_residual, orbit_second_ff, shape_operator, SecondFF};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;
const COMMUTE_TOL: f64 = 1e-6;
const GENERIC_SEED: u64 = 0x1502;

/// Principal normals `η_i` with their curvature distributions `E_{η_i}`:
/// `α(X, Y) = sum_i ⟨X_i, Y_i⟩ η_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalNormalDecomp {
    pub normals: Vec<VecN>,
    pub spaces: Vec<Frame>,
    pub multiplicities: Vec<usize>,
    pub normal_frame: Frame,
    pub basepoint: VecN,
    /// Largest `‖α(X,Y) - ⟨X,Y⟩ η_i‖` over sampled pairs, including
    /// cross terms between distinct distributions.
    pub residual: f64,
}

impl PrincipalNormalDecomp {
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// `A_ξ X = sum_i ⟨ξ, η_i⟩ X_i` for an ambient tangent vector `x`.
    pub fn shape_apply(&self, xi: &VecN, x: &VecN) -> VecN {
        self.normals
            .iter()
            .zip(&self.spaces)
            .fold(VecN::zeros(x.len()), |acc, (eta, space)| acc + space.project(x) * xi.dot(eta))
    }
}

/// Simultaneous diagonalization of the shape operators: the tangent space is
/// split by the eigenvalues of `A_ξ` for one generic unit normal `ξ`, and each
/// block refined with every basis normal. Eigenvalues closer than
/// `cluster_tol` are merged; gaps inside `[cluster_tol, 2 cluster_tol)` are an
/// error.
pub fn principal_normals(ff: &SecondFF, cluster_tol: f64) -> Result<PrincipalNormalDecomp> {
    if ff.dim() == 0 {
        return Err(GeomError::PointOrbit);
    }
    let residual = commutation_residual(ff);
    if residual > COMMUTE_TOL {
        return Err(GeomError::NonCommuting { residual });
    }
    let normal = ff.normal();
    let m = ff.dim();
    let mut ops: Vec<DMatrix<f64>> = Vec::new();
    if normal.rank() > 0 {
        let c = unit_sphere_point(&mut rng(GENERIC_SEED), normal.rank());
        ops.push(shape_operator(ff, &normal.combine(c.as_slice()))?);
    }
    for xi in normal.basis() {
        ops.push(shape_operator(ff, xi)?);
    }

    // blocks hold orthonormal columns in tangent-frame coordinates
    let mut blocks: Vec<DMatrix<f64>> = vec![DMatrix::identity(m, m)];
    for op in &ops {
        let mut refined = Vec::new();
        for q in &blocks {
            let restricted = q.transpose() * op * q;
            let (vals, vecs) = symmetric_eigen(&restricted);
            for group in group_values(&vals, cluster_tol)? {
                let cols: Vec<_> = group.iter().map(|&g| q * &vecs[g]).collect();
                refined.push(DMatrix::from_columns(&cols));
            }
        }
        blocks = refined;
    }

    let tangent = ff.tangent();
    let mut normals = Vec::with_capacity(blocks.len());
    for q in &blocks {
        let mut eta = VecN::zeros(ff.basepoint().len());
        for c in q.column_iter() {
            eta += ff.eval_coords(c.as_slice(), c.as_slice());
        }
        normals.push(eta / q.ncols() as f64);
    }
    for i in 0..normals.len() {
        for j in 0..i {
            let sep = (&normals[i] - &normals[j]).norm();
            if sep < 2.0 * cluster_tol {
                return Err(GeomError::ClusterAmbiguity { separation: sep, tol: cluster_tol });
            }
        }
    }

    let mut residual: f64 = 0.0;
    for (a, qa) in blocks.iter().enumerate() {
        for (b, qb) in blocks.iter().enumerate() {
            for ca in qa.column_iter() {
                for cb in qb.column_iter() {
                    let val = ff.eval_coords(ca.as_slice(), cb.as_slice());
                    let expect = if a == b { &normals[a] * ca.dot(&cb) } else { VecN::zeros(val.len()) };
                    residual = residual.max((val - expect).norm());
                }
            }
        }
    }
    // random unit vectors inside each distribution
    let mut r = rng(GENERIC_SEED + 1);
    for (q, eta) in blocks.iter().zip(&normals) {
        for _ in 0..4 {
            let c = unit_sphere_point(&mut r, q.ncols());
            let x = q * c;
            residual = residual.max((ff.eval_coords(x.as_slice(), x.as_slice()) - eta).norm());
        }
    }

    let spaces = blocks
        .iter()
        .map(|q| {
            let vecs: Vec<VecN> = q.column_iter().map(|c| tangent.combine(c.as_slice())).collect();
            orthonormalize(&vecs, 1e-8).expect("columns share a dimension")
        })
        .collect::<Vec<_>>();
    let multiplicities = spaces.iter().map(Frame::rank).collect();
    Ok(PrincipalNormalDecomp {
        normals,
        spaces,
        multiplicities,
        normal_frame: normal.clone(),
        basepoint: ff.basepoint().clone(),
        residual,
    })
}

/// Groups ascending values whose consecutive gaps are below `tol`.
fn group_values(vals: &[f64], tol: f64) -> Result<Vec<Vec<usize>>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - vals[*g.last().expect("groups are non-empty")] < tol => g.push(i),
            Some(g) => {
                let gap = v - vals[*g.last().expect("groups are non-empty")];
                if gap < 2.0 * tol {
                    return Err(GeomError::ClusterAmbiguity { separation: gap, tol });
                }
                groups.push(vec![i]);
            }
            None => groups.push(vec![i]),
        }
    }
    Ok(groups)
}

/// Principal normals of the orbit through `p`.
pub fn orbit_principal_normals(action: &LinearAction, p: &VecN, cluster_tol: f64) -> Result<PrincipalNormalDecomp> {
    principal_normals(&orbit_second_ff(action, p)?, cluster_tol)
}

/// Spot check of parallel principal normals along an orbit: the principal
/// normals at `g p` should be the images `g η_i`. Returns the largest mismatch.
pub fn transport_residual(action: &LinearAction, p: &VecN, g: &OrthoMat, cluster_tol: f64) -> Result<f64> {
    let here = orbit_principal_normals(action, p, cluster_tol)?;
    let there = orbit_principal_normals(action, &g.apply(p), cluster_tol)?;
    if here.len() != there.len() {
        return Ok(f64::INFINITY);
    }
    Ok(here
        .normals
        .iter()
        .map(|eta| {
            let moved = g.apply(eta);
            there.normals.iter().map(|e| (e - &moved).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// `K[i][j] = ⟨η_i, η_j⟩`: sectional curvature of planes inside `E_{η_i}`
/// (diagonal) and of mixed planes (off-diagonal).
pub fn gauss_curvature_table(d: &PrincipalNormalDecomp) -> DMatrix<f64> {
    let s = d.len();
    DMatrix::from_fn(s, s, |i, j| d.normals[i].dot(&d.normals[j]))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceFormViolation {
    /// `⟨η_i, η_j⟩ ≠ c` for `i ≠ j`.
    OffDiagonal { i: usize, j: usize, value: f64 },
    /// More than one principal normal with `|η|^2 = c`.
    SeveralAtCurvature { indices: Vec<usize> },
    /// `η_i - η_k` and `η_j - η_k` linearly dependent.
    DependentDifferences { i: usize, j: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceFormReport {
    pub curvature: f64,
    pub violations: Vec<SpaceFormViolation>,
}

impl SpaceFormReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Relations forced on the principal normals of a flat-normal-bundle
/// immersion of a space of constant curvature `c`.
pub fn check_space_form_relations(d: &PrincipalNormalDecomp, c: f64, tol: f64) -> SpaceFormReport {
    let k = gauss_curvature_table(d);
    let s = d.len();
    let mut violations = Vec::new();
    for i in 0..s {
        for j in i + 1..s {
            if (k[(i, j)] - c).abs() > tol {
                violations.push(SpaceFormViolation::OffDiagonal { i, j, value: k[(i, j)] });
            }
        }
    }
    let at_c: Vec<usize> = (0..s).filter(|&i| (k[(i, i)] - c).abs() <= tol).collect();
    if at_c.len() > 1 {
        violations.push(SpaceFormViolation::SeveralAtCurvature { indices: at_c });
    }
    for kk in 0..s {
        for i in 0..s {
            for j in i + 1..s {
                if i == kk || j == kk {
                    continue;
                }
                let u = &d.normals[i] - &d.normals[kk];
                let v = &d.normals[j] - &d.normals[kk];
                let scale = u.norm_squared() * v.norm_squared();
                let gram = scale - u.dot(&v).powi(2);
                if scale <= tol * tol || gram <= 1e-8 * scale {
                    violations.push(SpaceFormViolation::DependentDifferences { i, j, k: kk });
                }
            }
        }
    }
    SpaceFormReport { curvature: c, violations }
}
