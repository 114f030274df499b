use std::fmt;

use nalgebra::DMatrix;

use crate::action::LinearAction;
use crate::error::{GeomError, Result};
use crate::isoparametric::{
    gauss_curvature_table, orbit_principal_normals, orbit_second_ff, shape_operator, PrincipalNormalDecomp,
    DEFAULT_CLUSTER_TOL,
};
use crate::linalg::{orthonormalize, Frame, VecN};
use crate::synthesis::SweptHypersurface;

pub const DEFAULT_UMBILIC_TOL: f64 = 1e-4;
const NORMAL_RANK_TOL: f64 = 1e-6;
const FIXED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitUmbilicity {
    pub umbilic_in_m: bool,
    /// Max over normal directions `ξ` in `M` of
    /// `‖A_ξ - (tr A_ξ / m) I‖_∞ / ‖A_ξ‖_∞`.
    pub deviation: f64,
    /// Max entry of `A_ξ` over the same directions; zero for an orbit that is
    /// totally geodesic in `M`.
    pub shape_norm: f64,
    pub orbit_dim: usize,
    pub threshold: f64,
}

/// Normal space of the orbit inside `M` at a point: the part of `T_pM`
/// orthogonal to the orbit.
fn normal_in_m(tangent_m: &Frame, orbit_normal: &Frame) -> Result<Frame> {
    let projected: Vec<VecN> = tangent_m.basis().iter().map(|b| orbit_normal.project(b)).collect();
    if projected.is_empty() {
        return Ok(Frame::empty(tangent_m.ambient_dim()));
    }
    orthonormalize(&projected, NORMAL_RANK_TOL)
}

/// Shape operators of the orbit through a sample, as a submanifold of the
/// swept hypersurface. The orbit's ambient second form is projected onto
/// `T_pM`; covariant derivatives of `M` itself are not used.
pub fn orbit_umbilicity(
    action: &LinearAction,
    m: &SweptHypersurface,
    sample: usize,
    threshold: f64,
) -> Result<OrbitUmbilicity> {
    let s = m.samples().get(sample).ok_or(GeomError::IndexOutOfRange { index: sample, len: m.samples().len() })?;
    let tangent = s.tangent.as_ref().ok_or_else(|| GeomError::InvalidInput(format!("sample {sample} is singular")))?;
    let ff = orbit_second_ff(action, &s.point)?;
    let orbit_dim = ff.dim();
    if orbit_dim <= 1 {
        return Ok(OrbitUmbilicity { umbilic_in_m: true, deviation: 0.0, shape_norm: 0.0, orbit_dim, threshold });
    }
    let normals = normal_in_m(tangent, ff.normal())?;
    let mut deviation: f64 = 0.0;
    let mut shape_norm: f64 = 0.0;
    for xi in normals.basis() {
        let a = shape_operator(&ff, &ff.normal().project(xi))?;
        let scale = a.amax();
        shape_norm = shape_norm.max(scale);
        if scale > 0.0 {
            let mean = a.trace() / orbit_dim as f64;
            let off = &a - DMatrix::identity(orbit_dim, orbit_dim) * mean;
            deviation = deviation.max(off.amax() / scale);
        }
    }
    Ok(OrbitUmbilicity { umbilic_in_m: deviation < threshold, deviation, shape_norm, orbit_dim, threshold })
}

/// Sectional curvatures determined by the principal normals: `|η_i|^2` for
/// distributions of dimension at least two and `⟨η_i, η_j⟩` for mixed planes.
pub fn orbit_sectional_curvatures(d: &PrincipalNormalDecomp) -> Vec<f64> {
    let k = gauss_curvature_table(d);
    let mut out = Vec::new();
    for i in 0..d.len() {
        if d.multiplicities[i] >= 2 {
            out.push(k[(i, i)]);
        }
        for j in i + 1..d.len() {
            out.push(k[(i, j)]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationCondition {
    TotallyGeodesicOrbit,
    OneDimensionalOrbits,
    UmbilicOrbits,
    ConstantCurvatureOrbit,
    PositiveCurvatureOrbit,
}

impl RotationCondition {
    pub const ALL: [RotationCondition; 5] = [
        RotationCondition::TotallyGeodesicOrbit,
        RotationCondition::OneDimensionalOrbits,
        RotationCondition::UmbilicOrbits,
        RotationCondition::ConstantCurvatureOrbit,
        RotationCondition::PositiveCurvatureOrbit,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RotationCondition::TotallyGeodesicOrbit => "i",
            RotationCondition::OneDimensionalOrbits => "ii",
            RotationCondition::UmbilicOrbits => "iii",
            RotationCondition::ConstantCurvatureOrbit => "iv",
            RotationCondition::PositiveCurvatureOrbit => "v",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            RotationCondition::TotallyGeodesicOrbit => "totally geodesic principal orbit in M",
            RotationCondition::OneDimensionalOrbits => "one-dimensional principal orbits (k = n - 1)",
            RotationCondition::UmbilicOrbits => "principal orbits umbilical in M",
            RotationCondition::ConstantCurvatureOrbit => "principal orbit of nonzero constant curvature",
            RotationCondition::PositiveCurvatureOrbit => "principal orbit of positive curvature",
        }
    }
}

impl fmt::Display for RotationCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub condition: RotationCondition,
    pub holds: bool,
    /// Quantity compared against the tolerance; see [`rotation_structure_report`].
    pub value: f64,
    /// Set when the check only approximates the condition.
    pub approximate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationOptions {
    pub umbilic_tol: f64,
    /// Bound on the orbit's shape operators in `M` for (i).
    pub geodesic_tol: f64,
    /// Bound for zero and equal sectional curvatures in (iv), (v) and the
    /// flat-product check.
    pub curvature_tol: f64,
    pub cluster_tol: f64,
}

impl Default for RotationOptions {
    fn default() -> Self {
        Self { umbilic_tol: DEFAULT_UMBILIC_TOL, geodesic_tol: 1e-6, curvature_tol: 1e-8, cluster_tol: DEFAULT_CLUSTER_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationStructureReport {
    pub conditions: Vec<ConditionResult>,
    /// Fixed subspace of the action, reported when some condition holds.
    pub axis: Option<Frame>,
    /// Some sampled orbit is flat with one-dimensional curvature
    /// distributions, i.e. an extrinsic product of circles.
    pub product_of_circles: bool,
    pub samples: usize,
    pub options: RotationOptions,
}

impl RotationStructureReport {
    pub fn holds(&self, c: RotationCondition) -> bool {
        self.conditions.iter().any(|r| r.condition == c && r.holds)
    }

    pub fn any(&self) -> bool {
        self.conditions.iter().any(|r| r.holds)
    }
}

/// Sufficient conditions for a rotation hypersurface, evaluated on the
/// principal-orbit samples of the identity patch. Values reported:
/// (i) smallest orbit shape norm in `M`; (ii) cohomogeneity of `M`;
/// (iii) largest umbilicity deviation; (iv) smallest spread of the sectional
/// curvatures among orbits with nonzero curvature; (v) largest minimum
/// sectional curvature.
pub fn rotation_structure_report(
    action: &LinearAction,
    m: &SweptHypersurface,
    opts: RotationOptions,
) -> Result<RotationStructureReport> {
    let max_dim = action.max_orbit_dimension();
    let hyper_dim = action.ambient_dim() - 1;
    let picked: Vec<usize> = m
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.group_tag == 0 && !s.is_singular() && action.orbit_dimension(&s.point) == max_dim)
        .map(|(i, _)| i)
        .collect();

    let mut min_shape = f64::INFINITY;
    let mut max_dev: f64 = 0.0;
    let mut best_spread = f64::INFINITY;
    let mut best_min_curv = f64::NEG_INFINITY;
    let mut product_of_circles = false;
    for &i in &picked {
        let u = orbit_umbilicity(action, m, i, opts.umbilic_tol)?;
        min_shape = min_shape.min(u.shape_norm);
        max_dev = max_dev.max(u.deviation);
        let d = orbit_principal_normals(action, &m.samples()[i].point, opts.cluster_tol)?;
        let curv = orbit_sectional_curvatures(&d);
        if let (Some(lo), Some(hi)) = (
            curv.iter().copied().reduce(f64::min),
            curv.iter().copied().reduce(f64::max),
        ) {
            if lo.abs().min(hi.abs()) > opts.curvature_tol && lo * hi > 0.0 {
                best_spread = best_spread.min(hi - lo);
            }
            best_min_curv = best_min_curv.max(lo);
            if hi.abs().max(lo.abs()) < opts.curvature_tol && d.multiplicities.iter().all(|&k| k == 1) {
                product_of_circles = true;
            }
        }
    }
    let k = hyper_dim.saturating_sub(max_dim);
    let have = !picked.is_empty();
    let conditions = vec![
        ConditionResult {
            condition: RotationCondition::TotallyGeodesicOrbit,
            holds: have && min_shape < opts.geodesic_tol,
            value: min_shape,
            approximate: true,
        },
        ConditionResult {
            condition: RotationCondition::OneDimensionalOrbits,
            holds: k + 1 == hyper_dim,
            value: k as f64,
            approximate: false,
        },
        ConditionResult {
            condition: RotationCondition::UmbilicOrbits,
            holds: have && max_dev < opts.umbilic_tol,
            value: max_dev,
            approximate: false,
        },
        ConditionResult {
            condition: RotationCondition::ConstantCurvatureOrbit,
            holds: best_spread < opts.curvature_tol,
            value: best_spread,
            approximate: false,
        },
        ConditionResult {
            condition: RotationCondition::PositiveCurvatureOrbit,
            holds: best_min_curv > opts.curvature_tol,
            value: best_min_curv,
            approximate: false,
        },
    ];
    let axis = conditions.iter().any(|c| c.holds).then(|| action.fixed_subspace(FIXED_TOL));
    Ok(RotationStructureReport { conditions, axis, product_of_circles, samples: picked.len(), options: opts })
}
