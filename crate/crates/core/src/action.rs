//! Linear isometric actions of connected rotation groups, given by generators
//! of their Lie algebra.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;

use crate::chart::{Chart, ParamAxis};
use crate::error::{GeomError, Result};
use crate::linalg::{
    exp_skew, orthonormalize, orthonormalize_with_pivots, Frame, OrthoMat, SkewMat, VecN,
    DEFAULT_RANK_TOL,
};
use crate::sampling::{rng, unit_sphere_point};

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_SAMPLES: usize = 256;

const CLOSURE_TOL: f64 = 1e-9;

/// Connected subgroup of `SO(N)` acting linearly on `R^N`.
///
/// The generator list is closed under commutators once at construction; the
/// resulting orthonormal Lie-algebra basis is what orbit computations use.
#[derive(Debug, Clone)]
pub struct LinearAction {
    label: String,
    ambient_dim: usize,
    generators: Vec<SkewMat>,
    algebra: Vec<SkewMat>,
    max_orbit_dim: OnceLock<usize>,
}

/// Result of [`LinearAction::find_regular_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegularPoint {
    pub point: VecN,
    pub orbit_dim: usize,
    /// Set when every sample had a point orbit (trivial action).
    pub all_trivial: bool,
}

impl LinearAction {
    pub fn new(label: impl Into<String>, generators: Vec<SkewMat>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(GeomError::EmptyGenerators);
        };
        let dim = first.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(GeomError::DimensionMismatch { expected: dim, found: g.dim() });
        }
        let algebra = lie_closure(&generators, dim);
        Ok(Self {
            label: label.into(),
            ambient_dim: dim,
            generators,
            algebra,
            max_orbit_dim: OnceLock::new(),
        })
    }

    /// Full rotation group `SO(dim)`.
    pub fn rotation_group(dim: usize) -> Self {
        Self::block_rotations(&[0, dim]).expect("valid block layout")
    }

    /// `I_k ⊕ SO(n-k+1)` on `R^{n+1}`: fixes the axis `R^k` spanned by the
    /// first `k` coordinates and rotates the remaining ones.
    pub fn rotation_model(k: usize, n: usize) -> Result<Self> {
        if k > n || n - k + 1 < 2 {
            return Err(GeomError::InvalidInput(format!("rotation model needs 0 <= k <= n-1 (k={k}, n={n})")));
        }
        let mut a = Self::block_rotations(&[k, n - k + 1])?;
        a.label = format!("I_{k} + SO({})", n - k + 1);
        Ok(a)
    }

    /// Trivial action on the first `dims[0]` coordinates and the full rotation
    /// group on each following block: `(v0, g1 v1, ..., gk vk)`.
    pub fn block_rotations(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(GeomError::InvalidInput("need a flat block and at least one rotation block".into()));
        }
        if let Some(d) = dims[1..].iter().find(|d| **d < 2) {
            return Err(GeomError::InvalidInput(format!("rotation blocks need dimension >= 2, got {d}")));
        }
        let total: usize = dims.iter().sum();
        let mut gens = Vec::new();
        let mut offset = dims[0];
        for d in &dims[1..] {
            for i in offset..offset + d {
                for j in i + 1..offset + d {
                    gens.push(SkewMat::elementary(total, i, j));
                }
            }
            offset += d;
        }
        let label = dims[1..]
            .iter()
            .map(|d| format!("SO({d})"))
            .fold(format!("I_{}", dims[0]), |acc, s| format!("{acc} + {s}"));
        Self::new(label, gens)
    }

    /// Circle acting on `C^m = R^{2m}` by `e^{iθ} · z = (e^{i w_1 θ} z_1, ..., e^{i w_m θ} z_m)`.
    pub fn circle_with_weights(weights: &[f64]) -> Result<Self> {
        let dim = 2 * weights.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (b, w) in weights.iter().enumerate() {
            m[(2 * b + 1, 2 * b)] = *w;
            m[(2 * b, 2 * b + 1)] = -*w;
        }
        Self::new(format!("U(1) weights {weights:?}"), vec![SkewMat::new(m)?])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[SkewMat] {
        &self.generators
    }

    /// Orthonormal basis (for `tr(A^T B)/2`) of the generated Lie algebra.
    pub fn algebra(&self) -> &[SkewMat] {
        &self.algebra
    }

    pub fn killing_field(&self, gen_index: usize, q: &VecN) -> Result<VecN> {
        self.check_dim(q)?;
        let a = self
            .generators
            .get(gen_index)
            .ok_or(GeomError::IndexOutOfRange { index: gen_index, len: self.generators.len() })?;
        Ok(a.apply(q))
    }

    fn check_dim(&self, q: &VecN) -> Result<()> {
        if q.len() != self.ambient_dim {
            return Err(GeomError::DimensionMismatch { expected: self.ambient_dim, found: q.len() });
        }
        Ok(())
    }

    /// Tangent space of the orbit through `p`, spanned by `A p` over the algebra.
    pub fn orbit_tangent(&self, p: &VecN, tol: f64) -> Frame {
        self.orbit_tangent_with_margin(p, tol).0
    }

    /// Orbit tangent plus the smallest accepted pivot, a measure of how far
    /// `p` is from the lower-dimensional orbits.
    pub fn orbit_tangent_with_margin(&self, p: &VecN, tol: f64) -> (Frame, f64) {
        let fields: Vec<VecN> = self.algebra.iter().map(|a| a.apply(p)).collect();
        let (frame, pivots) = orthonormalize_with_pivots(&fields, tol)
            .expect("algebra elements share the ambient dimension");
        let frame = if frame.rank() == 0 { Frame::empty(self.ambient_dim) } else { frame };
        (frame, pivots.last().copied().unwrap_or(0.0))
    }

    pub fn orbit_dimension(&self, p: &VecN) -> usize {
        self.orbit_tangent(p, DEFAULT_RANK_TOL).rank()
    }

    /// Seeded uniform sampling of the unit sphere; among the points of maximal
    /// orbit dimension, the one farthest from rank loss is returned.
    pub fn find_regular_point(&self, seed: u64, samples: usize) -> RegularPoint {
        let mut r = rng(seed);
        let mut best: Option<(usize, f64, VecN)> = None;
        for _ in 0..samples.max(1) {
            let p = unit_sphere_point(&mut r, self.ambient_dim);
            let (frame, margin) = self.orbit_tangent_with_margin(&p, DEFAULT_RANK_TOL);
            let better = match &best {
                None => true,
                Some((d, m, _)) => frame.rank() > *d || (frame.rank() == *d && margin > *m),
            };
            if better {
                best = Some((frame.rank(), margin, p));
            }
        }
        let (orbit_dim, _, point) = best.expect("at least one sample");
        RegularPoint { point, orbit_dim, all_trivial: orbit_dim == 0 }
    }

    /// Maximal orbit dimension with the default seed and sample count (cached).
    pub fn max_orbit_dimension(&self) -> usize {
        *self
            .max_orbit_dim
            .get_or_init(|| self.find_regular_point(DEFAULT_SEED, DEFAULT_SAMPLES).orbit_dim)
    }

    pub fn cohomogeneity(&self) -> usize {
        self.ambient_dim - self.max_orbit_dimension()
    }

    pub fn cohomogeneity_with(&self, seed: u64, samples: usize) -> usize {
        self.ambient_dim - self.find_regular_point(seed, samples).orbit_dim
    }

    /// Common kernel of the algebra: the points fixed by the whole group.
    pub fn fixed_subspace(&self, tol: f64) -> Frame {
        let rows: Vec<VecN> = self
            .algebra
            .iter()
            .flat_map(|a| a.matrix().row_iter().map(|r| r.transpose()).collect::<Vec<_>>())
            .collect();
        let row_space = orthonormalize(&rows, tol).expect("rows share a dimension");
        let row_space = if row_space.rank() == 0 { Frame::empty(self.ambient_dim) } else { row_space };
        row_space.complement()
    }

    pub fn algebra_element(&self, coeffs: &[f64]) -> SkewMat {
        let mut m = DMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for (a, c) in self.algebra.iter().zip(coeffs) {
            m += a.matrix() * *c;
        }
        SkewMat::from_antisymmetrized(&(m * 0.5))
    }

    /// `exp(sum_a c_a B_a)` for algebra coordinates `c`.
    pub fn element(&self, coeffs: &[f64]) -> OrthoMat {
        exp_skew(&self.algebra_element(coeffs), 1.0)
    }

    /// Group element with algebra coordinates uniform in `[-π, π]`.
    pub fn random_element(&self, rng: &mut impl Rng) -> OrthoMat {
        let c: Vec<f64> = (0..self.algebra.len()).map(|_| rng.random_range(-PI..PI)).collect();
        self.element(&c)
    }

    /// Orthonormal orbit tangent frame `X_i` at `p` together with algebra
    /// elements `B_i` such that `B_i p = X_i`.
    pub fn tangent_generators(&self, p: &VecN) -> (Frame, Vec<SkewMat>) {
        let tangent = self.orbit_tangent(p, DEFAULT_RANK_TOL);
        if tangent.rank() == 0 {
            return (tangent, Vec::new());
        }
        let fields = DMatrix::from_columns(&self.algebra.iter().map(|a| a.apply(p)).collect::<Vec<_>>());
        let svd = fields.clone().svd(true, true);
        let gens = tangent
            .basis()
            .iter()
            .map(|x| {
                let c = svd.solve(x, DEFAULT_RANK_TOL).expect("svd computed with both factors");
                self.algebra_element(c.as_slice())
            })
            .collect();
        (tangent, gens)
    }
}

fn lie_closure(generators: &[SkewMat], dim: usize) -> Vec<SkewMat> {
    let cap = dim * dim.saturating_sub(1) / 2;
    let mut basis: Vec<SkewMat> = Vec::new();
    let add = |basis: &mut Vec<SkewMat>, m: &SkewMat| -> bool {
        if basis.len() >= cap {
            return false;
        }
        let mut r = m.matrix().clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = 0.5 * b.matrix().dot(&r);
                r -= b.matrix() * c;
            }
        }
        let r = SkewMat::from_antisymmetrized(&(r * 0.5));
        let n = r.norm();
        if n > CLOSURE_TOL {
            basis.push(r.scaled(1.0 / n));
            true
        } else {
            false
        }
    };
    for g in generators {
        add(&mut basis, g);
    }
    let mut i = 0;
    while i < basis.len() {
        let mut j = 0;
        while j < i {
            let br = basis[i].bracket(&basis[j]);
            add(&mut basis, &br);
            j += 1;
        }
        i += 1;
    }
    basis
}

/// Orbit through `p` parametrized by `θ ↦ exp(sum_i θ_i B_i) p`, where the `B_i`
/// come from [`LinearAction::tangent_generators`].
#[derive(Debug, Clone)]
pub struct OrbitChart {
    point: VecN,
    generators: Vec<SkewMat>,
    domain: Vec<ParamAxis>,
}

impl OrbitChart {
    pub fn new(action: &LinearAction, p: &VecN, half_width: f64) -> Result<Self> {
        let (_, generators) = action.tangent_generators(p);
        if generators.is_empty() {
            return Err(GeomError::PointOrbit);
        }
        let domain = vec![ParamAxis::new(-half_width, half_width); generators.len()];
        Ok(Self { point: p.clone(), generators, domain })
    }
}

impl Chart for OrbitChart {
    fn domain(&self) -> &[ParamAxis] {
        &self.domain
    }

    fn ambient_dim(&self) -> usize {
        self.point.len()
    }

    fn eval(&self, u: &[f64]) -> VecN {
        let dim = self.point.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (g, t) in self.generators.iter().zip(u) {
            m += g.matrix() * *t;
        }
        exp_skew(&SkewMat::from_antisymmetrized(&(m * 0.5)), 1.0).apply(&self.point)
    }
}
