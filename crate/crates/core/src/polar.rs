//! Sections of polar actions, numerical polarity certificates and orbit types.

use rand::Rng;

use crate::action::LinearAction;
use crate::error::{GeomError, Result};
use crate::linalg::{exp_skew, Frame, OrthoMat, SkewMat, VecN, DEFAULT_RANK_TOL};
use crate::sampling::{rng, unit_sphere_point};

/// Linear subspace through a regular point, candidate section of the action.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSubspace {
    frame: Frame,
    basepoint: VecN,
}

impl SectionSubspace {
    /// Validates that `basepoint` lies in `span(frame)` within 1e-8.
    pub fn new(frame: Frame, basepoint: VecN) -> Result<Self> {
        if basepoint.len() != frame.ambient_dim() {
            return Err(GeomError::DimensionMismatch { expected: frame.ambient_dim(), found: basepoint.len() });
        }
        let off = (&basepoint - frame.project(&basepoint)).norm();
        if off > 1e-8 {
            return Err(GeomError::InvalidInput(format!("basepoint lies {off:e} off the section")));
        }
        Ok(Self { frame, basepoint })
    }

    /// A user-supplied section checked against the action: the basepoint must be
    /// regular and the frame must be the normal space of its orbit.
    pub fn for_action(action: &LinearAction, frame: Frame, basepoint: VecN) -> Result<Self> {
        let s = Self::new(frame, basepoint)?;
        let expected = section_at(action, &s.basepoint)?;
        let mismatch = s.frame.containment_residual(&expected.frame).max(expected.frame.containment_residual(&s.frame));
        if s.frame.rank() != expected.frame.rank() || mismatch > 1e-8 {
            return Err(GeomError::InvalidInput(format!(
                "frame is not the normal space of the orbit through the basepoint (mismatch {mismatch:e})"
            )));
        }
        Ok(s)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn basepoint(&self) -> &VecN {
        &self.basepoint
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    /// Ambient point with the given section coordinates.
    pub fn point(&self, coords: &[f64]) -> VecN {
        self.frame.combine(coords)
    }

    pub fn coordinates(&self, p: &VecN) -> VecN {
        self.frame.coordinates(p)
    }

    /// Distance from `p` to the section.
    pub fn distance(&self, p: &VecN) -> f64 {
        (p - self.frame.project(p)).norm()
    }
}

/// The normal space of the orbit through a regular point.
pub fn section_at(action: &LinearAction, p: &VecN) -> Result<SectionSubspace> {
    if p.len() != action.ambient_dim() {
        return Err(GeomError::DimensionMismatch { expected: action.ambient_dim(), found: p.len() });
    }
    let tangent = action.orbit_tangent(p, DEFAULT_RANK_TOL);
    let max_dim = action.max_orbit_dimension();
    if tangent.rank() < max_dim {
        return Err(GeomError::NotRegular { orbit_dim: tangent.rank(), max_dim });
    }
    Ok(SectionSubspace { frame: tangent.complement(), basepoint: p.clone() })
}

/// Sampling of the section used by [`certify_polar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self { samples: 64, seed: 1, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarCertificate {
    pub max_residual: f64,
    pub polar: bool,
    pub grid: PolarGrid,
}

/// Largest component inside the section of a Killing field `A q`, over unit
/// `q` in the section and the orthonormal algebra basis. A linear subspace
/// meeting all orbits orthogonally has residual zero.
pub fn certify_polar(action: &LinearAction, section: &SectionSubspace, grid: PolarGrid) -> PolarCertificate {
    let frame = section.frame();
    let mut points: Vec<VecN> = Vec::new();
    if section.basepoint().norm() > 0.0 {
        points.push(section.basepoint().normalize());
    }
    points.extend(frame.basis().iter().cloned());
    let mut r = rng(grid.seed);
    for _ in 0..grid.samples {
        if frame.rank() == 0 {
            break;
        }
        let c = unit_sphere_point(&mut r, frame.rank());
        points.push(frame.combine(c.as_slice()));
    }
    let max_residual = points
        .iter()
        .flat_map(|q| action.algebra().iter().map(move |a| frame.project(&a.apply(q)).norm()))
        .fold(0.0, f64::max);
    PolarCertificate { max_residual, polar: max_residual < grid.tol, grid }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    Principal,
    ExceptionalSuspect,
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitClass {
    pub kind: OrbitKind,
    pub orbit_dim: usize,
    /// Group element fixing the point but moving a normal vector, when found.
    pub witness: Option<OrthoMat>,
}

const FIX_TOL: f64 = 1e-7;
const MOVE_TOL: f64 = 1e-5;

/// Orbit type of `p`. Exceptional orbits are detected heuristically: the
/// one-parameter subgroups through the generators and through
/// `isotropy_samples` random algebra elements are scanned for elements fixing
/// `p`; one that moves a normal vector marks the orbit exceptional-suspect.
pub fn classify_orbit(action: &LinearAction, p: &VecN, isotropy_samples: usize, seed: u64) -> OrbitClass {
    let orbit_dim = action.orbit_dimension(p);
    let max_dim = action.max_orbit_dimension();
    if orbit_dim < max_dim {
        return OrbitClass { kind: OrbitKind::Singular, orbit_dim, witness: None };
    }
    let normal = action.orbit_tangent(p, DEFAULT_RANK_TOL).complement();
    let scale = p.norm().max(1.0);

    let mut directions: Vec<SkewMat> = action
        .generators()
        .iter()
        .filter(|g| g.norm() > 0.0)
        .map(|g| g.scaled(1.0 / g.norm()))
        .collect();
    let mut r = rng(seed);
    for _ in 0..isotropy_samples {
        let c: Vec<f64> = (0..action.algebra().len()).map(|_| r.random_range(-1.0..1.0)).collect();
        let x = action.algebra_element(&c);
        if x.norm() > 1e-12 {
            directions.push(x.scaled(1.0 / x.norm()));
        }
    }

    for x in &directions {
        for t in fixing_times(x, p, scale) {
            let g = exp_skew(x, t);
            let moved = normal.basis().iter().map(|n| (g.apply(n) - n).norm()).fold(0.0, f64::max);
            if moved > MOVE_TOL {
                return OrbitClass { kind: OrbitKind::ExceptionalSuspect, orbit_dim, witness: Some(g) };
            }
        }
    }
    OrbitClass { kind: OrbitKind::Principal, orbit_dim, witness: None }
}

/// Times `t > 0` (up to two periods of the slowest rotation in `x`) at which
/// `exp(t x)` fixes `p` without being the identity.
fn fixing_times(x: &SkewMat, p: &VecN, scale: f64) -> Vec<f64> {
    let freqs: Vec<f64> = (x.matrix().transpose() * x.matrix())
        .symmetric_eigenvalues()
        .iter()
        .filter(|l| **l > 1e-12)
        .map(|l| l.sqrt())
        .collect();
    let Some(slow) = freqs.iter().copied().reduce(f64::min) else {
        return Vec::new();
    };
    let fast = freqs.iter().copied().fold(0.0, f64::max);
    let horizon = 2.0 * std::f64::consts::TAU / slow;
    let dt = 0.05 / fast;
    let steps = (horizon / dt).ceil() as usize;
    let step = exp_skew(x, dt);
    let dist = |t: f64| (exp_skew(x, t).apply(p) - p).norm();

    let mut values = Vec::with_capacity(steps + 1);
    let mut q = p.clone();
    for _ in 0..=steps {
        values.push((&q - p).norm());
        q = step.apply(&q);
    }
    let dim = p.len();
    let mut out = Vec::new();
    for i in 1..steps {
        if values[i] <= values[i - 1] && values[i] <= values[i + 1] && values[i] < 0.5 * scale {
            let t = golden_min(&dist, (i - 1) as f64 * dt, (i + 1) as f64 * dt);
            if dist(t) < FIX_TOL * scale {
                let g = exp_skew(x, t);
                let off_identity = (g.matrix() - nalgebra::DMatrix::<f64>::identity(dim, dim)).amax();
                if off_identity > 1e-6 {
                    out.push(t);
                }
            }
        }
    }
    out
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit;

    fn v(xs: &[f64]) -> VecN {
        VecN::from_vec(xs.to_vec())
    }

    fn torus() -> LinearAction {
        LinearAction::block_rotations(&[0, 2, 2]).unwrap()
    }

    #[test]
    fn sphere_section_is_radial_line() {
        let a = LinearAction::rotation_group(3);
        let s = section_at(&a, &v(&[0.0, 0.0, 2.0])).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.frame().basis()[0][2].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn torus_section() {
        let s = section_at(&torus(), &v(&[1.0, 0.0, 1.0, 0.0])).unwrap();
        let expect = Frame::from_orthonormal(vec![unit(4, 0), unit(4, 2)], 4).unwrap();
        assert!(expect.containment_residual(s.frame()) < 1e-12);
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn rotation_model_section_contains_axis_and_point() {
        let a = LinearAction::rotation_model(1, 3).unwrap();
        let p = v(&[0.7, 1.0, 2.0, -1.0]);
        let s = section_at(&a, &p).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(s.distance(&unit(4, 0)) < 1e-12);
        assert!(s.distance(&v(&[0.0, 1.0, 2.0, -1.0])) < 1e-12);
    }

    #[test]
    fn singular_point_has_no_section() {
        let r = section_at(&torus(), &v(&[1.0, 0.0, 0.0, 0.0]));
        assert!(matches!(r, Err(GeomError::NotRegular { orbit_dim: 1, max_dim: 2 })));
    }

    #[test]
    fn polar_certificates() {
        let so3 = LinearAction::rotation_group(3);
        let s = section_at(&so3, &v(&[0.0, 0.0, 2.0])).unwrap();
        let c = certify_polar(&so3, &s, PolarGrid::default());
        assert!(c.polar && c.max_residual < 1e-12);

        let t = torus();
        let s = section_at(&t, &v(&[1.0, 0.0, 1.0, 0.0])).unwrap();
        let c = certify_polar(&t, &s, PolarGrid::default());
        assert!(c.polar && c.max_residual < 1e-12);
    }

    #[test]
    fn diagonal_circle_is_not_polar() {
        let a = LinearAction::circle_with_weights(&[1.0, 1.0]).unwrap();
        let s = section_at(&a, &v(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.rank(), 3);
        let c = certify_polar(&a, &s, PolarGrid::default());
        assert!(!c.polar);
        assert!(c.max_residual > 0.1, "residual {}", c.max_residual);
    }

    #[test]
    fn orbit_classes() {
        let so3 = LinearAction::rotation_group(3);
        assert_eq!(classify_orbit(&so3, &v(&[0.3, -1.0, 0.2]), 16, 2).kind, OrbitKind::Principal);
        assert_eq!(classify_orbit(&torus(), &v(&[1.0, 0.0, 0.0, 0.0]), 16, 2).kind, OrbitKind::Singular);
        let rm = LinearAction::rotation_model(1, 3).unwrap();
        let c = classify_orbit(&rm, &v(&[1.0, 0.0, 0.0, 0.0]), 16, 2);
        assert_eq!((c.kind, c.orbit_dim), (OrbitKind::Singular, 0));
    }

    #[test]
    fn weighted_circle_has_exceptional_orbit() {
        // e^{iθ}(z1, z2) = (e^{iθ} z1, e^{2iθ} z2); θ = π fixes (0, z2) and flips z1
        let a = LinearAction::circle_with_weights(&[1.0, 2.0]).unwrap();
        let c = classify_orbit(&a, &v(&[0.0, 0.0, 1.0, 0.0]), 4, 5);
        assert_eq!(c.kind, OrbitKind::ExceptionalSuspect);
        assert!(c.witness.is_some());
        assert_eq!(classify_orbit(&a, &v(&[0.6, 0.2, 1.0, 0.0]), 4, 5).kind, OrbitKind::Principal);
    }
}
