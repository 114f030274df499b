use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::linalg::{orthonormalize, Frame, VecN};

use super::principal::PrincipalNormalDecomp;

pub const DEFAULT_WEYL_CAP: usize = 1024;
const ELEMENT_TOL: f64 = 1e-8;

/// Affine hyperplane `⟨normal_covector, x⟩ = offset` in the coordinates of a
/// frame centred at `FocalSet::origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalHyperplane {
    pub normal_covector: VecN,
    pub offset: f64,
    pub principal_index: usize,
}

/// Focal hyperplanes of the affine normal space `origin + span(frame)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalSet {
    pub frame: Frame,
    pub origin: VecN,
    pub hyperplanes: Vec<FocalHyperplane>,
    pub warnings: Vec<String>,
}

/// One hyperplane `⟨η_j, ξ⟩ = 1` per nonzero principal normal, written in the
/// coordinates of `normal` (which should span the normal space). Vanishing
/// principal normals have no focal points and are skipped with a warning.
pub fn focal_hyperplanes(d: &PrincipalNormalDecomp, normal: &Frame) -> FocalSet {
    let mut hyperplanes = Vec::new();
    let mut warnings = Vec::new();
    for (j, eta) in d.normals.iter().enumerate() {
        let cov = normal.coordinates(eta);
        if cov.norm() < 1e-12 {
            warnings.push(format!("principal normal {j} vanishes; no focal hyperplane"));
            continue;
        }
        hyperplanes.push(FocalHyperplane { normal_covector: cov, offset: 1.0, principal_index: j });
    }
    FocalSet { frame: normal.clone(), origin: d.basepoint.clone(), hyperplanes, warnings }
}

/// `x ↦ linear x + translation` on frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        Self { linear: DMatrix::identity(dim, dim), translation: DVector::zeros(dim) }
    }

    /// Reflection across `⟨a, x⟩ = c`.
    pub fn reflection(a: &VecN, c: f64) -> Self {
        let n2 = a.norm_squared();
        let dim = a.len();
        Self {
            linear: DMatrix::identity(dim, dim) - a * a.transpose() * (2.0 / n2),
            translation: a * (2.0 * c / n2),
        }
    }

    pub fn apply(&self, x: &VecN) -> VecN {
        &self.linear * x + &self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }

    /// Max-norm distance over linear and translation parts.
    pub fn distance(&self, other: &AffineMap) -> f64 {
        (&self.linear - &other.linear).amax().max((&self.translation - &other.translation).amax())
    }

    pub fn is_isometry(&self, tol: f64) -> bool {
        let n = self.linear.nrows();
        (self.linear.transpose() * &self.linear - DMatrix::identity(n, n)).amax() < tol
    }
}

/// Finite reflection group generated by the focal reflections, acting on the
/// affine normal space (equivalently, the section) through `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylGroupRep {
    pub section_frame: Frame,
    pub origin: VecN,
    pub elements: Vec<AffineMap>,
    pub generators: Vec<AffineMap>,
}

impl WeylGroupRep {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Action of element `idx` on an ambient point of `origin + span(frame)`.
    pub fn apply_ambient(&self, idx: usize, y: &VecN) -> VecN {
        let x = self.section_frame.coordinates(&(y - &self.origin));
        &self.origin + self.section_frame.combine(self.elements[idx].apply(&x).as_slice())
    }

    /// Same group recentred on another point of the affine section, with
    /// coordinates in `frame` (spanning the same space).
    pub fn recentered(&self, frame: &Frame, origin: &VecN) -> WeylGroupRep {
        // change of coordinates x_old = P x_new + s
        let p = DMatrix::from_fn(self.section_frame.rank(), frame.rank(), |i, j| {
            self.section_frame.basis()[i].dot(&frame.basis()[j])
        });
        let s = self.section_frame.coordinates(&(origin - &self.origin));
        let conv = |m: &AffineMap| {
            // x_new' = P^T (L (P x_new + s) + t - s)
            AffineMap {
                linear: p.transpose() * &m.linear * &p,
                translation: p.transpose() * (&m.linear * &s + &m.translation - &s),
            }
        };
        WeylGroupRep {
            section_frame: frame.clone(),
            origin: origin.clone(),
            elements: self.elements.iter().map(conv).collect(),
            generators: self.generators.iter().map(conv).collect(),
        }
    }

    /// Largest distance between the image of a focal hyperplane under a group
    /// element and the closest hyperplane of the set.
    pub fn permutation_residual(&self, focal: &FocalSet) -> f64 {
        let planes: Vec<(VecN, f64)> = focal
            .hyperplanes
            .iter()
            .map(|h| normalized_plane(&h.normal_covector, h.offset))
            .collect();
        let mut worst: f64 = 0.0;
        for g in &self.elements {
            for (a, c) in &planes {
                // image of ⟨a,x⟩ = c under x ↦ Lx + t is ⟨La, y⟩ = c + ⟨La, t⟩
                let la = &g.linear * a;
                let (na, nc) = normalized_plane(&la, c + la.dot(&g.translation));
                let best = planes
                    .iter()
                    .map(|(b, d)| ((&na - b).amax().max((nc - d).abs())).min((&na + b).amax().max((nc + d).abs())))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(best);
            }
        }
        worst
    }
}

fn normalized_plane(a: &VecN, c: f64) -> (VecN, f64) {
    let n = a.norm();
    (a / n, c / n)
}

/// Closure of the focal reflections under composition, identifying elements
/// within 1e-8. Errors when more than `cap` elements appear.
pub fn weyl_group(focal: &FocalSet, cap: usize) -> Result<WeylGroupRep> {
    if focal.hyperplanes.is_empty() {
        return Err(GeomError::EmptyHyperplanes);
    }
    let dim = focal.frame.rank();
    let generators: Vec<AffineMap> = focal
        .hyperplanes
        .iter()
        .map(|h| AffineMap::reflection(&h.normal_covector, h.offset))
        .collect();
    let mut elements = vec![AffineMap::identity(dim)];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        for g in &generators {
            let candidate = g.compose(&current);
            if !elements.iter().any(|e| e.distance(&candidate) < ELEMENT_TOL) {
                if elements.len() >= cap {
                    return Err(GeomError::GroupCapExceeded { cap });
                }
                elements.push(candidate);
            }
        }
        frontier += 1;
    }
    Ok(WeylGroupRep { section_frame: focal.frame.clone(), origin: focal.origin.clone(), elements, generators })
}

/// A normal direction `ξ` with `⟨η_j, ξ⟩ = 0` for all principal normals and
/// fixed by the Weyl group. The submanifold then lies in the affine
/// hyperplane through the basepoint orthogonal to `ξ`.
pub fn invariant_hyperplane_reduction(d: &PrincipalNormalDecomp, w: &WeylGroupRep) -> Option<VecN> {
    let span_eta = orthonormalize(&d.normals, 1e-8).ok()?;
    let candidates: Vec<VecN> = d
        .normal_frame
        .basis()
        .iter()
        .map(|b| if span_eta.rank() > 0 { b - span_eta.project(b) } else { b.clone() })
        .collect();
    let free = orthonormalize(&candidates, 1e-6).ok()?;
    let xi = free.basis().first()?.clone();
    let coords = w.section_frame.coordinates(&xi);
    let fixed = w.elements.iter().all(|g| (&g.linear * &coords - &coords).amax() < 1e-8);
    fixed.then_some(xi)
}
