//! Small dense linear algebra: skew generators, rotations, orthonormal frames.
//!
//! Dimensions here are tiny (ambient spaces of a dozen coordinates at most),
//! so everything is plain `nalgebra` dynamic storage and accuracy is preferred
//! over speed.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// Point or vector of the ambient Euclidean space.
pub type VecN = DVector<f64>;

/// Default absolute rank tolerance for [`orthonormalize`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Per-entry tolerance for `A + A^T = 0`.
pub const SKEW_TOL: f64 = 1e-12;

const ORTHO_TOL: f64 = 1e-10;
const DET_TOL: f64 = 1e-8;

/// Taylor order used after scaling. With the scaled norm at most 1/2 the
/// truncation error is below 1e-22.
const EXP_TAYLOR_ORDER: usize = 18;

/// Skew-symmetric matrix: an element of the rotation Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMat(DMatrix<f64>);

impl SkewMat {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let max_asym = (&m + m.transpose()).amax();
        if max_asym > SKEW_TOL {
            return Err(GeomError::NotSkew { max_asym });
        }
        Ok(Self(m))
    }

    /// Builds `A - A^T` from an arbitrary square matrix.
    pub fn from_antisymmetrized(m: &DMatrix<f64>) -> Self {
        Self(m - m.transpose())
    }

    /// Elementary generator `E_ij - E_ji` rotating `e_i` towards `e_j`.
    pub fn elementary(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(j, i)] = 1.0;
        m[(i, j)] = -1.0;
        Self(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn apply(&self, v: &VecN) -> VecN {
        &self.0 * v
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    /// Commutator `[A, B] = AB - BA`, again skew.
    pub fn bracket(&self, other: &SkewMat) -> SkewMat {
        SkewMat(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Inner product `tr(A^T B) / 2`, normalized so elementary generators are unit.
    pub fn inner(&self, other: &SkewMat) -> f64 {
        0.5 * self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }
}

/// Rotation matrix (orthogonal, determinant +1).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoMat(DMatrix<f64>);

impl OrthoMat {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let n = m.nrows();
        let defect = (m.transpose() * &m - DMatrix::identity(n, n)).amax();
        let det = m.determinant();
        if defect > ORTHO_TOL || (det - 1.0).abs() > DET_TOL {
            return Err(GeomError::NotOrthogonal { defect, det });
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn apply(&self, v: &VecN) -> VecN {
        &self.0 * v
    }

    pub fn compose(&self, other: &OrthoMat) -> OrthoMat {
        OrthoMat(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> OrthoMat {
        OrthoMat(self.0.transpose())
    }

    /// Max-entry distance between two rotations.
    pub fn distance(&self, other: &OrthoMat) -> f64 {
        (&self.0 - &other.0).amax()
    }
}

/// `exp(t A)` by scaling and squaring with a fixed-order Taylor polynomial.
pub fn exp_skew(a: &SkewMat, t: f64) -> OrthoMat {
    let n = a.dim();
    let m = a.matrix() * t;
    let norm1 = (0..n)
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / 2f64.powi(squarings);

    // Horner form of sum_{k <= N} B^k / k!
    let id = DMatrix::<f64>::identity(n, n);
    let mut acc = id.clone();
    for k in (1..=EXP_TAYLOR_ORDER).rev() {
        acc = &id + (&scaled * acc) / k as f64;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    OrthoMat(acc)
}

/// Orthonormal basis of a linear subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    basis: Vec<VecN>,
    ambient_dim: usize,
}

impl Frame {
    pub fn empty(ambient_dim: usize) -> Self {
        Self { basis: Vec::new(), ambient_dim }
    }

    pub fn standard(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect();
        Self { basis, ambient_dim }
    }

    /// Accepts vectors that are already orthonormal within 1e-10.
    pub fn from_orthonormal(basis: Vec<VecN>, ambient_dim: usize) -> Result<Self> {
        for (i, b) in basis.iter().enumerate() {
            if b.len() != ambient_dim {
                return Err(GeomError::DimensionMismatch { expected: ambient_dim, found: b.len() });
            }
            for (j, c) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (b.dot(c) - target).abs() > ORTHO_TOL {
                    return Err(GeomError::InvalidInput(format!(
                        "frame vectors {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self { basis, ambient_dim })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[VecN] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient_dim x rank` matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        if self.basis.is_empty() {
            return DMatrix::zeros(self.ambient_dim, 0);
        }
        DMatrix::from_columns(&self.basis)
    }

    /// Coordinates of `v` with respect to the basis.
    pub fn coordinates(&self, v: &VecN) -> VecN {
        VecN::from_iterator(self.rank(), self.basis.iter().map(|b| b.dot(v)))
    }

    /// Ambient vector with the given coordinates.
    pub fn combine(&self, coords: &[f64]) -> VecN {
        let mut out = VecN::zeros(self.ambient_dim);
        for (b, c) in self.basis.iter().zip(coords) {
            out.axpy(*c, b, 1.0);
        }
        out
    }

    /// Image of the frame under a rotation.
    pub fn rotated(&self, g: &OrthoMat) -> Frame {
        Frame { basis: self.basis.iter().map(|b| g.apply(b)).collect(), ambient_dim: self.ambient_dim }
    }

    pub fn complement(&self) -> Frame {
        complement(self)
    }

    pub fn project(&self, v: &VecN) -> VecN {
        project(v, self)
    }

    /// Largest norm of the component of a basis vector of `other` outside
    /// `span(self)`; zero iff `span(other) ⊆ span(self)`.
    pub fn containment_residual(&self, other: &Frame) -> f64 {
        other
            .basis
            .iter()
            .map(|b| (b - self.project(b)).norm())
            .fold(0.0, f64::max)
    }
}

pub fn unit(dim: usize, i: usize) -> VecN {
    let mut v = VecN::zeros(dim);
    v[i] = 1.0;
    v
}

/// Gram-Schmidt with pivoting: the remaining vector of largest residual norm is
/// accepted next, and vectors whose residual drops below `tol` are discarded.
pub fn orthonormalize(vectors: &[VecN], tol: f64) -> Result<Frame> {
    orthonormalize_with_pivots(vectors, tol).map(|(f, _)| f)
}

/// As [`orthonormalize`], also returning the residual norm of each accepted
/// pivot. The last pivot measures how far the input is from losing rank.
pub fn orthonormalize_with_pivots(vectors: &[VecN], tol: f64) -> Result<(Frame, Vec<f64>)> {
    let Some(first) = vectors.first() else {
        return Ok((Frame::empty(0), Vec::new()));
    };
    let dim = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(GeomError::DimensionMismatch { expected: dim, found: bad.len() });
    }
    let mut work: Vec<VecN> = vectors.to_vec();
    let mut basis: Vec<VecN> = Vec::new();
    let mut pivots = Vec::new();
    while basis.len() < dim && !work.is_empty() {
        let (idx, norm) = work
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if norm < tol {
            break;
        }
        let mut q = work.swap_remove(idx) / norm;
        // second pass restores orthogonality lost to cancellation
        for b in &basis {
            let c = b.dot(&q);
            q.axpy(-c, b, 1.0);
        }
        q.normalize_mut();
        for w in work.iter_mut() {
            let c = q.dot(w);
            w.axpy(-c, &q, 1.0);
        }
        basis.push(q);
        pivots.push(norm);
    }
    Ok((Frame { basis, ambient_dim: dim }, pivots))
}

pub fn complement(frame: &Frame) -> Frame {
    let dim = frame.ambient_dim;
    let mut candidates: Vec<VecN> = (0..dim).map(|i| unit(dim, i) - frame.project(&unit(dim, i))).collect();
    let mut basis: Vec<VecN> = Vec::new();
    let target = dim - frame.rank();
    while basis.len() < target {
        let (idx, norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let mut q = candidates.swap_remove(idx) / norm;
        for b in frame.basis.iter().chain(basis.iter()) {
            let c = b.dot(&q);
            q.axpy(-c, b, 1.0);
        }
        q.normalize_mut();
        for w in candidates.iter_mut() {
            let c = q.dot(w);
            w.axpy(-c, &q, 1.0);
        }
        basis.push(q);
    }
    Frame { basis, ambient_dim: dim }
}

pub fn project(v: &VecN, frame: &Frame) -> VecN {
    let mut out = VecN::zeros(v.len());
    for b in &frame.basis {
        out.axpy(b.dot(v), b, 1.0);
    }
    out
}

/// Span of the column space of `m` (`tol` as in [`orthonormalize`]).
pub fn column_frame(m: &DMatrix<f64>, tol: f64) -> Result<Frame> {
    let cols: Vec<VecN> = m.column_iter().map(|c| c.into_owned()).collect();
    if cols.is_empty() {
        return Ok(Frame::empty(m.nrows()));
    }
    orthonormalize(&cols, tol)
}

/// Eigen-decomposition of a symmetric matrix with ascending eigenvalues.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<VecN>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut pairs: Vec<(f64, VecN)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(l, v)| (*l, v.into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn mat2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    #[test]
    fn quarter_turn() {
        let a = SkewMat::new(mat2(0.0, -1.0, 1.0, 0.0)).unwrap();
        let r = exp_skew(&a, FRAC_PI_2);
        assert!((r.matrix() - mat2(0.0, -1.0, 1.0, 0.0)).amax() < 1e-14);
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let a = SkewMat::elementary(4, 0, 3).scaled(3.0);
        assert_eq!(exp_skew(&a, 0.0), OrthoMat::identity(4));
    }

    #[test]
    fn rejects_non_skew() {
        let err = SkewMat::new(mat2(0.0, 1.0, 1.0, 0.0)).unwrap_err();
        assert!(matches!(err, GeomError::NotSkew { .. }));
        assert!(matches!(
            SkewMat::new(DMatrix::zeros(2, 3)),
            Err(GeomError::NotSquare { .. })
        ));
    }

    #[test]
    fn ortho_validation() {
        assert!(OrthoMat::new(mat2(1.0, 0.0, 0.0, -1.0)).is_err());
        assert!(OrthoMat::new(mat2(0.0, -1.0, 1.0, 0.0)).is_ok());
    }

    #[test]
    fn dependent_pair_gives_rank_one() {
        let f = orthonormalize(
            &[VecN::from_vec(vec![1.0, 0.0]), VecN::from_vec(vec![2.0, 0.0])],
            1e-8,
        )
        .unwrap();
        assert_eq!(f.rank(), 1);
        assert!((f.basis()[0].abs() - VecN::from_vec(vec![1.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn xy_plane() {
        let f = orthonormalize(
            &[VecN::from_vec(vec![1.0, 1.0, 0.0]), VecN::from_vec(vec![0.0, 1.0, 0.0])],
            1e-8,
        )
        .unwrap();
        assert_eq!(f.rank(), 2);
        assert!(f.basis().iter().all(|b| b[2].abs() < 1e-15));
    }

    #[test]
    fn empty_input_is_rank_zero() {
        assert_eq!(orthonormalize(&[], 1e-8).unwrap().rank(), 0);
    }

    #[test]
    fn mismatched_dims_rejected() {
        let r = orthonormalize(&[VecN::zeros(2), VecN::zeros(3)], 1e-8);
        assert!(matches!(r, Err(GeomError::DimensionMismatch { .. })));
    }

    #[test]
    fn complement_of_e1() {
        let f = Frame::from_orthonormal(vec![unit(3, 0)], 3).unwrap();
        let c = f.complement();
        assert_eq!(c.rank(), 2);
        assert!(c.basis().iter().all(|b| b[0].abs() < 1e-15));
        assert_eq!(Frame::standard(3).complement().rank(), 0);
    }

    #[test]
    fn projection_onto_axis() {
        let f = Frame::from_orthonormal(vec![unit(3, 0)], 3).unwrap();
        let p = project(&VecN::from_vec(vec![1.0, 2.0, 3.0]), &f);
        assert_eq!(p, VecN::from_vec(vec![1.0, 0.0, 0.0]));
    }
}
