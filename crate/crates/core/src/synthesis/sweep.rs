use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::action::{LinearAction, DEFAULT_SEED};
use crate::chart::Grid;
use crate::error::{GeomError, Result};
use crate::isoparametric::{section_weyl_group, WeylGroupRep, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP};
use crate::linalg::{exp_skew, orthonormalize_with_pivots, symmetric_eigen, Frame, OrthoMat, VecN};
use crate::polar::SectionSubspace;
use crate::sampling::{rng, Halton};
use crate::spatial::KdTree;

use super::profile::ProfileHypersurface;

const PROBE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const PROBE_FACTOR: usize = 4;
const REP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub seed: u64,
    /// Total number of group elements, identity and Weyl representatives included.
    pub group_count: usize,
    /// Points whose orbit tangent has a pivot below this are singular.
    pub singular_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, group_count: 64, singular_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweptSample {
    pub point: VecN,
    /// `None` on singular orbits, where the orbit collapses.
    pub tangent: Option<Frame>,
    /// Zero on singular orbits.
    pub unit_normal: VecN,
    pub group_tag: usize,
    pub profile_tag: usize,
}

impl SweptSample {
    pub fn is_singular(&self) -> bool {
        self.tangent.is_none()
    }
}

/// Sample set of `G(L)`: every sampled group element applied to every
/// profile sample, stored group-major.
#[derive(Debug, Clone)]
pub struct SweptHypersurface {
    action: LinearAction,
    section: SectionSubspace,
    samples: Vec<SweptSample>,
    group_elements: Vec<OrthoMat>,
    weyl_reps: usize,
    profile_grid: Option<Grid>,
    profile_coords: Vec<VecN>,
    weyl: Option<WeylGroupRep>,
    resolution: f64,
    seed: u64,
}

impl SweptHypersurface {
    /// Assembles a sample set directly; used for externally produced or
    /// deliberately degenerate inputs.
    pub fn from_samples(
        action: LinearAction,
        section: SectionSubspace,
        samples: Vec<SweptSample>,
        resolution: f64,
    ) -> Self {
        Self {
            action,
            section,
            samples,
            group_elements: Vec::new(),
            weyl_reps: 0,
            profile_grid: None,
            profile_coords: Vec::new(),
            weyl: None,
            resolution,
            seed: 0,
        }
    }

    pub fn action(&self) -> &LinearAction {
        &self.action
    }

    pub fn section(&self) -> &SectionSubspace {
        &self.section
    }

    pub fn samples(&self) -> &[SweptSample] {
        &self.samples
    }

    pub fn points(&self) -> Vec<VecN> {
        self.samples.iter().map(|s| s.point.clone()).collect()
    }

    pub fn group_elements(&self) -> &[OrthoMat] {
        &self.group_elements
    }

    /// Number of group elements after the identity that realize Weyl elements.
    pub fn weyl_representatives(&self) -> usize {
        self.weyl_reps
    }

    pub fn profile_grid(&self) -> Option<&Grid> {
        self.profile_grid.as_ref()
    }

    pub fn profile_len(&self) -> usize {
        self.profile_coords.len()
    }

    pub fn profile_coords(&self) -> &[VecN] {
        &self.profile_coords
    }

    pub fn weyl(&self) -> Option<&WeylGroupRep> {
        self.weyl.as_ref()
    }

    /// Covering bound of the sample set: the larger of the profile node
    /// spacing and the largest distance from a probe orbit point to the set.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn singular_count(&self) -> usize {
        self.samples.iter().filter(|s| s.is_singular()).count()
    }
}

/// Group elements of `G` acting on the section as the Weyl elements, found
/// as half-turns `exp(π Y / |Y a|)` with `Y` in the isotropy algebra of a
/// wall point and `a` the reflection normal. Products are closed up to the
/// order of `W`; the identity is not included.
pub fn weyl_representatives(action: &LinearAction, section: &SectionSubspace, w: &WeylGroupRep) -> Vec<OrthoMat> {
    let frame = section.frame();
    let acts_as = |g: &OrthoMat, target: &DMatrix<f64>| -> bool {
        frame.basis().iter().enumerate().all(|(j, e)| {
            let expect = frame.combine(target.column(j).as_slice());
            (g.apply(e) - expect).amax() < REP_TOL
        })
    };
    let section_matrix = |g: &OrthoMat| -> DMatrix<f64> {
        let cols: Vec<VecN> = frame.basis().iter().map(|e| frame.coordinates(&g.apply(e))).collect();
        DMatrix::from_columns(&cols)
    };

    let mut gens: Vec<OrthoMat> = Vec::new();
    for r in &w.generators {
        let defect = DMatrix::identity(r.linear.nrows(), r.linear.ncols()) - &r.linear;
        let Some(col) = (0..defect.ncols()).max_by(|&i, &j| defect.column(i).norm().total_cmp(&defect.column(j).norm()))
        else {
            continue;
        };
        let a_coords = defect.column(col).normalize();
        let a = frame.combine(a_coords.as_slice());
        let b = section.basepoint();
        let q = b - &a * a.dot(b);
        if let Some(g) = half_turn(action, &q, &a, |g| acts_as(g, &r.linear)) {
            gens.push(g);
        }
    }

    let dim = frame.rank();
    let mut found: Vec<(DMatrix<f64>, OrthoMat)> = vec![(DMatrix::identity(dim, dim), OrthoMat::identity(action.ambient_dim()))];
    let mut i = 0;
    while i < found.len() && found.len() < w.order() {
        let current = found[i].1.clone();
        for g in &gens {
            let cand = g.compose(&current);
            let m = section_matrix(&cand);
            if !found.iter().any(|(f, _)| (f - &m).amax() < REP_TOL) {
                found.push((m, cand));
            }
        }
        i += 1;
    }
    found.into_iter().skip(1).map(|(_, g)| g).collect()
}

fn half_turn(action: &LinearAction, q: &VecN, a: &VecN, accept: impl Fn(&OrthoMat) -> bool) -> Option<OrthoMat> {
    let alg = action.algebra();
    let m = alg.len();
    let fields_q = DMatrix::from_columns(&alg.iter().map(|b| b.apply(q)).collect::<Vec<_>>());
    let (vals, vecs) = symmetric_eigen(&(fields_q.transpose() * &fields_q));
    let cut = 1e-14 * q.norm_squared().max(1.0);
    let iso: Vec<VecN> = vals.iter().zip(&vecs).filter(|(v, _)| **v < cut).map(|(_, v)| v.clone()).collect();
    if iso.is_empty() {
        return None;
    }
    let z = DMatrix::from_columns(&iso);
    let fields_a = DMatrix::from_columns(&alg.iter().map(|b| b.apply(a)).collect::<Vec<_>>());
    let k = &fields_a * &z;
    let (kv, kvecs) = symmetric_eigen(&(k.transpose() * &k));
    let mut candidates: Vec<VecN> = Vec::new();
    if let (Some(_), Some(top)) = (kv.last(), kvecs.last()) {
        candidates.push(&z * top);
    }
    candidates.extend(iso.iter().cloned());
    for c in candidates {
        debug_assert_eq!(c.len(), m);
        let y = action.algebra_element(c.as_slice());
        let omega = y.apply(a).norm();
        if omega < 1e-9 {
            continue;
        }
        let g = exp_skew(&y, PI / omega);
        if accept(&g) {
            return Some(g);
        }
    }
    None
}

/// Identity, then Weyl representatives, then `exp` of Halton points of
/// `[-π, π]^dim g`, `count` elements in total.
pub fn sample_group(action: &LinearAction, reps: &[OrthoMat], count: usize, seed: u64) -> Vec<OrthoMat> {
    let mut out = vec![OrthoMat::identity(action.ambient_dim())];
    out.extend(reps.iter().take(count.saturating_sub(1)).cloned());
    out.extend(halton_elements(action, seed).take(count.saturating_sub(out.len())));
    out
}

fn halton_elements(action: &LinearAction, seed: u64) -> impl Iterator<Item = OrthoMat> + '_ {
    Halton::new(action.algebra().len(), seed).map(move |u| {
        let c: Vec<f64> = u.iter().map(|x| (2.0 * x - 1.0) * PI).collect();
        action.element(&c)
    })
}

/// `G(L)` sampled at `options.group_count` group elements. Frames at `g x`
/// are `g (T_x L ⊕ T_x(G x))`; the normal is oriented away from the centroid
/// of the Weyl orbit of the profile.
pub fn sweep(action: &LinearAction, profile: &ProfileHypersurface, options: &SweepOptions) -> Result<SweptHypersurface> {
    let section = profile.section().clone();
    let n_amb = action.ambient_dim();
    if section.frame().ambient_dim() != n_amb {
        return Err(GeomError::DimensionMismatch { expected: n_amb, found: section.frame().ambient_dim() });
    }
    let weyl = match section_weyl_group(action, &section, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP) {
        Ok(w) => Some(w),
        Err(GeomError::EmptyHyperplanes | GeomError::PointOrbit) => None,
        Err(e) => return Err(e),
    };
    let reps = weyl.as_ref().map(|w| weyl_representatives(action, &section, w)).unwrap_or_default();
    let group = sample_group(action, &reps, options.group_count.max(1), options.seed);
    let weyl_reps = reps.len().min(group.len() - 1);

    let mut centroid = VecN::zeros(n_amb);
    let mut weight = 0.0_f64;
    for s in profile.samples() {
        match &weyl {
            Some(w) => {
                for idx in 0..w.order() {
                    centroid += w.apply_ambient(idx, &s.point);
                    weight += 1.0;
                }
            }
            None => {
                centroid += &s.point;
                weight += 1.0;
            }
        }
    }
    centroid /= weight.max(1.0);

    let max_orbit = action.max_orbit_dimension();
    let expected = n_amb - 1;
    let mut frames: Vec<Option<(Frame, VecN)>> = Vec::with_capacity(profile.len());
    for (k, s) in profile.samples().iter().enumerate() {
        let orbit = action.orbit_tangent(&s.point, options.singular_tol);
        if orbit.rank() < max_orbit {
            frames.push(None);
            continue;
        }
        let mut vecs = s.tangents.clone();
        vecs.extend(orbit.basis().iter().cloned());
        let (frame, _) = orthonormalize_with_pivots(&vecs, 1e-9)?;
        if frame.rank() != expected {
            return Err(GeomError::TangentRankDeficient { sample: k, rank: frame.rank(), expected });
        }
        let mut normal = frame.complement().basis()[0].clone();
        if normal.dot(&(&s.point - &centroid)) < 0.0 {
            normal = -normal;
        }
        frames.push(Some((frame, normal)));
    }

    let mut samples = Vec::with_capacity(group.len() * profile.len());
    for (gi, g) in group.iter().enumerate() {
        for (k, s) in profile.samples().iter().enumerate() {
            let (tangent, unit_normal) = match &frames[k] {
                Some((f, nu)) => (Some(f.rotated(g)), g.apply(nu)),
                None => (None, VecN::zeros(n_amb)),
            };
            samples.push(SweptSample { point: g.apply(&s.point), tangent, unit_normal, group_tag: gi, profile_tag: k });
        }
    }

    let mut swept = SweptHypersurface {
        action: action.clone(),
        section,
        samples,
        group_elements: group,
        weyl_reps,
        profile_grid: Some(profile.grid().clone()),
        profile_coords: profile.samples().iter().map(|s| s.coords.clone()).collect(),
        weyl,
        resolution: 0.0,
        seed: options.seed,
    };
    swept.resolution = estimate_resolution(&swept, profile, options);
    Ok(swept)
}

fn estimate_resolution(swept: &SweptHypersurface, profile: &ProfileHypersurface, options: &SweepOptions) -> f64 {
    let grid = profile.grid();
    let mut spacing: f64 = 0.0;
    for node in 0..grid.len() {
        for axis in 0..grid.dim() {
            if let Some(nb) = grid.neighbor(node, axis, true) {
                spacing = spacing.max((&profile.samples()[node].point - &profile.samples()[nb].point).norm());
            }
        }
    }
    let tree = KdTree::new(swept.points());
    let probes = options.group_count.max(1) * PROBE_FACTOR;
    let mut covering: f64 = 0.0;
    for g in halton_elements(&swept.action, options.seed ^ PROBE_SALT).take(probes) {
        for s in profile.samples() {
            let (_, d) = tree.nearest(&g.apply(&s.point)).expect("sample set is non-empty");
            covering = covering.max(d);
        }
    }
    spacing.max(covering)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivarianceReport {
    pub max_residual: f64,
    pub resolution: f64,
    /// Residuals below `2 × resolution` pass.
    pub bound: f64,
    pub trials: usize,
    pub passed: bool,
}

/// Largest distance from `g x` to the point set over seeded random `g` and
/// all points `x`.
pub fn point_set_equivariance(points: &[VecN], action: &LinearAction, trials: usize, seed: u64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let tree = KdTree::new(points.to_vec());
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let g = action.random_element(&mut r);
        for x in points {
            let (_, d) = tree.nearest(&g.apply(x)).expect("non-empty tree");
            worst = worst.max(d);
        }
    }
    worst
}

pub fn equivariance_check(m: &SweptHypersurface, action: &LinearAction, trials: usize, seed: u64) -> EquivarianceReport {
    let max_residual = point_set_equivariance(&m.points(), action, trials, seed);
    let bound = 2.0 * m.resolution();
    EquivarianceReport { max_residual, resolution: m.resolution(), bound, trials, passed: max_residual < bound }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalityReport {
    /// Regular samples lying in the section.
    pub checked: usize,
    pub failures: Vec<usize>,
    /// Smallest normal component of the section basis over checked samples.
    pub min_margin: f64,
    pub passed: bool,
}

/// At samples in the section, some section direction must leave `T_p M`.
pub fn transversality_check(section: &SectionSubspace, m: &SweptHypersurface, tol: f64) -> TransversalityReport {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (i, s) in m.samples().iter().enumerate() {
        let Some(tangent) = &s.tangent else { continue };
        if section.distance(&s.point) > tol {
            continue;
        }
        checked += 1;
        let margin = section
            .frame()
            .basis()
            .iter()
            .map(|e| (e - tangent.project(e)).norm())
            .fold(0.0, f64::max);
        min_margin = min_margin.min(margin);
        if margin <= tol {
            failures.push(i);
        }
    }
    TransversalityReport { checked, passed: failures.is_empty(), failures, min_margin }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport {
    pub slice_count: usize,
    /// Largest distance from a slice sample to `W·(profile samples)`.
    pub max_off_profile: f64,
    /// Largest distance from a point of `W·(profile samples)` to the slice.
    pub max_uncovered: f64,
    pub passed: bool,
}

/// `Σ ∩ M` against the Weyl orbit of the profile, in section coordinates.
/// Slice samples are measured against the profile chart itself, so samples
/// from arbitrary group elements that happen to land in the section count.
pub fn section_slice_check(m: &SweptHypersurface, profile: &ProfileHypersurface, tol: f64) -> SliceReport {
    let section = m.section();
    let slice_points: Vec<&VecN> =
        m.samples().iter().filter(|s| section.distance(&s.point) <= tol).map(|s| &s.point).collect();
    let identity = WeylGroupRep {
        section_frame: section.frame().clone(),
        origin: VecN::zeros(section.frame().ambient_dim()),
        elements: vec![crate::isoparametric::AffineMap::identity(section.rank())],
        generators: Vec::new(),
    };
    let w = m.weyl().unwrap_or(&identity);
    let mut orbit: Vec<VecN> = Vec::new();
    for s in profile.samples() {
        for idx in 0..w.order() {
            orbit.push(section.coordinates(&w.apply_ambient(idx, &s.point)));
        }
    }
    if slice_points.is_empty() || orbit.is_empty() {
        return SliceReport { slice_count: slice_points.len(), max_off_profile: f64::INFINITY, max_uncovered: f64::INFINITY, passed: false };
    }
    let max_off_profile = slice_points
        .iter()
        .map(|p| {
            (0..w.order())
                .map(|idx| profile.distance_to(&section.coordinates(&w.apply_ambient(idx, p))))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let slice_tree = KdTree::new(slice_points.iter().map(|p| section.coordinates(p)).collect());
    let max_uncovered = orbit.iter().map(|c| slice_tree.nearest(c).expect("non-empty").1).fold(0.0, f64::max);
    SliceReport {
        slice_count: slice_points.len(),
        max_off_profile,
        max_uncovered,
        passed: max_off_profile <= tol && max_uncovered <= tol,
    }
}
