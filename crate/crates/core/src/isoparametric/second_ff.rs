use nalgebra::DMatrix;

use crate::action::LinearAction;
use crate::error::{GeomError, Result};
use crate::linalg::{exp_skew, Frame, SkewMat, VecN};

/// Second fundamental form at one point, tabulated on an orthonormal tangent
/// frame: `values[i][j] = α(X_i, X_j)` in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFF {
    basepoint: VecN,
    tangent: Frame,
    normal: Frame,
    values: Vec<Vec<VecN>>,
}

impl SecondFF {
    /// Checks symmetry (1e-10) and that values are normal (1e-8), then
    /// symmetrizes exactly.
    pub fn new(basepoint: VecN, tangent: Frame, normal: Frame, values: Vec<Vec<VecN>>) -> Result<Self> {
        let m = tangent.rank();
        if values.len() != m || values.iter().any(|row| row.len() != m) {
            return Err(GeomError::DimensionMismatch { expected: m, found: values.len() });
        }
        let mut sym = values.clone();
        for i in 0..m {
            for j in 0..i {
                let asym = (&values[i][j] - &values[j][i]).amax();
                if asym > 1e-10 {
                    return Err(GeomError::InvalidInput(format!("second form not symmetric at ({i},{j}): {asym:e}")));
                }
                let avg = (&values[i][j] + &values[j][i]) * 0.5;
                sym[i][j] = avg.clone();
                sym[j][i] = avg;
            }
            for v in &sym[i] {
                let tangential = tangent.project(v).norm();
                if tangential > 1e-8 {
                    return Err(GeomError::TangentialComponent { norm: tangential });
                }
            }
        }
        Ok(Self { basepoint, tangent, normal, values: sym })
    }

    pub fn basepoint(&self) -> &VecN {
        &self.basepoint
    }

    pub fn tangent(&self) -> &Frame {
        &self.tangent
    }

    pub fn normal(&self) -> &Frame {
        &self.normal
    }

    pub fn dim(&self) -> usize {
        self.tangent.rank()
    }

    pub fn value(&self, i: usize, j: usize) -> &VecN {
        &self.values[i][j]
    }

    /// `α(u, v)` for tangent vectors given by frame coordinates.
    pub fn eval_coords(&self, u: &[f64], v: &[f64]) -> VecN {
        let mut out = VecN::zeros(self.basepoint.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                out.axpy(ui * vj, &self.values[i][j], 1.0);
            }
        }
        out
    }

    /// `α(x, y)` for ambient tangent vectors.
    pub fn eval(&self, x: &VecN, y: &VecN) -> VecN {
        let u = self.tangent.coordinates(x);
        let v = self.tangent.coordinates(y);
        self.eval_coords(u.as_slice(), v.as_slice())
    }
}

/// Closed form for orbits of linear actions: with `X_i = B_i p`,
/// `α(X_i, X_j)` is the normal part of `(B_i B_j + B_j B_i) p / 2`.
pub fn orbit_second_ff(action: &LinearAction, p: &VecN) -> Result<SecondFF> {
    let (tangent, gens) = action.tangent_generators(p);
    if gens.is_empty() {
        return Err(GeomError::PointOrbit);
    }
    let normal = tangent.complement();
    let m = gens.len();
    let mut values = vec![vec![VecN::zeros(p.len()); m]; m];
    for i in 0..m {
        for j in 0..=i {
            let bi = gens[i].matrix();
            let bj = gens[j].matrix();
            let acc = (bi * bj + bj * bi) * p * 0.5;
            let v = normal.project(&acc);
            values[i][j] = v.clone();
            values[j][i] = v;
        }
    }
    SecondFF::new(p.clone(), tangent, normal, values)
}

/// Finite-difference variant of [`orbit_second_ff`]: accelerations of the orbit
/// curves `exp(t B) p` by central second differences with step `h`, polarized
/// for the off-diagonal entries.
pub fn orbit_second_ff_fd(action: &LinearAction, p: &VecN, h: f64) -> Result<SecondFF> {
    let (tangent, gens) = action.tangent_generators(p);
    if gens.is_empty() {
        return Err(GeomError::PointOrbit);
    }
    let normal = tangent.complement();
    let accel = |b: &SkewMat| -> VecN {
        let fwd = exp_skew(b, h).apply(p);
        let bwd = exp_skew(b, -h).apply(p);
        normal.project(&((fwd - p * 2.0 + bwd) / (h * h)))
    };
    let m = gens.len();
    let diag: Vec<VecN> = gens.iter().map(accel).collect();
    let mut values = vec![vec![VecN::zeros(p.len()); m]; m];
    for i in 0..m {
        values[i][i] = diag[i].clone();
        for j in 0..i {
            let sum = SkewMat::from_antisymmetrized(&((gens[i].matrix() + gens[j].matrix()) * 0.5));
            let v = (accel(&sum) - &diag[i] - &diag[j]) * 0.5;
            values[i][j] = v.clone();
            values[j][i] = v;
        }
    }
    SecondFF::new(p.clone(), tangent, normal, values)
}

/// Matrix `⟨α(X_i, X_j), ξ⟩` of the shape operator `A_ξ`.
pub fn shape_operator(ff: &SecondFF, xi: &VecN) -> Result<DMatrix<f64>> {
    let tangential = ff.tangent.project(xi).norm();
    if tangential > 1e-8 * xi.norm().max(1.0) {
        return Err(GeomError::TangentialComponent { norm: tangential });
    }
    let m = ff.dim();
    Ok(DMatrix::from_fn(m, m, |i, j| ff.values[i][j].dot(xi)))
}

/// Largest entry of `[A_a, A_b]` over an orthonormal normal basis; zero for
/// submanifolds with flat normal bundle.
pub fn commutation_residual(ff: &SecondFF) -> f64 {
    let ops: Vec<DMatrix<f64>> = ff
        .normal
        .basis()
        .iter()
        .map(|xi| shape_operator(ff, xi).expect("normal basis is normal"))
        .collect();
    let mut worst: f64 = 0.0;
    for (a, oa) in ops.iter().enumerate() {
        for ob in &ops[..a] {
            worst = worst.max((oa * ob - ob * oa).amax());
        }
    }
    worst
}
