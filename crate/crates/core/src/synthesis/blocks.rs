use std::sync::Arc;

use nalgebra::DMatrix;

use crate::action::LinearAction;
use crate::chart::{hyperspherical, hyperspherical_domain, FnChart, SharedChart};
use crate::error::{GeomError, Result};
use crate::isoparametric::{section_weyl_group, WeylGroupRep, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP};
use crate::linalg::{unit, Frame, VecN};
use crate::polar::SectionSubspace;

use super::profile::{
    boundary_smoothness_check, check_weyl_invariance, jacobian, EvennessOptions, EvennessReport, ProfileHypersurface,
    WeylInvarianceReport,
};
use super::sweep::{sweep, SweepOptions, SweptHypersurface};

/// How the profile becomes a Weyl-invariant `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    /// Profile inside the closed Weyl chamber; `L = W·profile`.
    Chamber,
    /// Profile leaves the chamber and is itself Weyl-invariant; `L = profile`.
    Invariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallContact {
    pub node: usize,
    pub wall: usize,
    pub report: EvennessReport,
}

#[derive(Debug, Clone)]
pub struct PreparedProfile {
    pub profile: ProfileHypersurface,
    pub completion: Completion,
    pub invariance: Option<WeylInvarianceReport>,
    pub contacts: Vec<WallContact>,
}

/// Unit normals, in section coordinates, of the reflection walls of `w`,
/// signed so that the section basepoint lies on the positive side.
pub fn chamber_walls(w: &WeylGroupRep, basepoint_coords: &VecN) -> Vec<VecN> {
    w.generators
        .iter()
        .filter_map(|r| {
            let defect = DMatrix::identity(r.linear.nrows(), r.linear.ncols()) - &r.linear;
            let col = (0..defect.ncols()).max_by(|&i, &j| defect.column(i).norm().total_cmp(&defect.column(j).norm()))?;
            let a = defect.column(col).normalize();
            Some(if a.dot(basepoint_coords) < 0.0 { -a } else { a })
        })
        .collect()
}

/// Decides the completion of a profile. A profile inside the chamber is
/// completed by reflection, which is smooth only if the profile meets each
/// wall orthogonally with an even graph; every node within `tol` of a wall
/// passes through the evenness gate. A profile leaving the chamber must be
/// Weyl-invariant within `tol`.
pub fn prepare_profile(
    profile: ProfileHypersurface,
    w: &WeylGroupRep,
    tol: f64,
    evenness: EvennessOptions,
) -> Result<PreparedProfile> {
    let section = profile.section();
    let walls = chamber_walls(w, &section.coordinates(section.basepoint()));
    let crossing = profile.samples().iter().any(|s| walls.iter().any(|a| a.dot(&s.coords) < -tol));
    if crossing {
        let report = check_weyl_invariance(&profile, w, tol);
        if !report.invariant {
            return Err(GeomError::NotWeylInvariant { deviation: report.max_deviation });
        }
        return Ok(PreparedProfile { profile, completion: Completion::Invariant, invariance: Some(report), contacts: vec![] });
    }
    let mut contacts = Vec::new();
    for (node, s) in profile.samples().iter().enumerate() {
        for (wall, a) in walls.iter().enumerate() {
            if a.dot(&s.coords).abs() > tol {
                continue;
            }
            let jac = jacobian(profile.chart().as_ref(), &s.params);
            let axis = (0..jac.ncols())
                .max_by(|&i, &j| {
                    let ci = jac.column(i).dot(a).abs() / jac.column(i).norm();
                    let cj = jac.column(j).dot(a).abs() / jac.column(j).norm();
                    ci.total_cmp(&cj)
                })
                .ok_or_else(|| GeomError::GraphExtraction("profile has no parameters".into()))?;
            let report = boundary_smoothness_check(profile.chart().as_ref(), &s.params, axis, a, evenness)?;
            if let Some(order) = report.failed_order {
                let value = report.odd_derivatives.iter().find(|(o, _)| *o == order).map_or(0.0, |(_, v)| *v);
                return Err(GeomError::NotEven { order, value });
            }
            contacts.push(WallContact { node, wall, report });
        }
    }
    Ok(PreparedProfile { profile, completion: Completion::Chamber, invariance: None, contacts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockOptions {
    /// Profile grid nodes per parameter axis.
    pub profile_counts: Vec<usize>,
    pub sweep: SweepOptions,
    /// Chamber, wall-contact and invariance tolerance.
    pub tol: f64,
    pub evenness: EvennessOptions,
}

impl BlockOptions {
    pub fn new(profile_counts: Vec<usize>, tol: f64) -> Self {
        Self { profile_counts, sweep: SweepOptions::default(), tol, evenness: EvennessOptions::default() }
    }
}

/// Hypersurface invariant under `I_{n_0} ⊕ SO(n_1) ⊕ … ⊕ SO(n_k)`.
#[derive(Debug, Clone)]
pub struct BlockHypersurface {
    pub action: LinearAction,
    pub block_dims: Vec<usize>,
    pub radii: Vec<f64>,
    pub weyl: WeylGroupRep,
    pub prepared: PreparedProfile,
    pub swept: SweptHypersurface,
}

fn block_starts(block_dims: &[usize]) -> Vec<usize> {
    block_dims
        .iter()
        .scan(0, |acc, d| {
            let s = *acc;
            *acc += d;
            Some(s)
        })
        .collect()
}

/// Section `R^{n_0} ⊕ R e_{(1)} ⊕ … ⊕ R e_{(k)}` of the block action, where
/// `e_{(i)}` is the first basis vector of block `i`. Section coordinates are
/// `(v_0, d_1, …, d_k)`.
pub fn block_section(action: &LinearAction, block_dims: &[usize]) -> Result<SectionSubspace> {
    let n = action.ambient_dim();
    let starts = block_starts(block_dims);
    let mut basis: Vec<VecN> = (0..block_dims[0]).map(|i| unit(n, i)).collect();
    let mut base = VecN::zeros(n);
    for s in &starts[1..] {
        basis.push(unit(n, *s));
        base[*s] = 1.0;
    }
    SectionSubspace::for_action(action, Frame::from_orthonormal(basis, n)?, base)
}

/// Profile in `(v_0, t_1, …, t_k)` mapped to section coordinates `(v_0, r_1 t_1, …, r_k t_k)`.
fn scaled_profile(profile: SharedChart, n0: usize, radii: &[f64]) -> SharedChart {
    let radii = radii.to_vec();
    let domain = profile.domain().to_vec();
    let dim = profile.ambient_dim();
    Arc::new(FnChart::new(domain, dim, move |u| {
        let mut c = profile.eval(u);
        for (i, r) in radii.iter().enumerate() {
            c[n0 + i] *= r;
        }
        c
    }))
}

/// Multi-rotational hypersurface for `block_dims = [n_0, n_1, …, n_k]`
/// (`n_i ≥ 2` for `i ≥ 1`). The profile chart takes values in
/// `(v_0, t_1, …, t_k)`; block `i` is scaled by `radii[i-1]`.
pub fn multi_rotational(
    block_dims: &[usize],
    radii: &[f64],
    profile: SharedChart,
    opts: &BlockOptions,
) -> Result<BlockHypersurface> {
    if block_dims.len() < 2 {
        return Err(GeomError::InvalidInput("need the flat block and at least one rotating block".into()));
    }
    let k = block_dims.len() - 1;
    if radii.len() != k {
        return Err(GeomError::DimensionMismatch { expected: k, found: radii.len() });
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(GeomError::InvalidInput("block radii must be positive".into()));
    }
    let n0 = block_dims[0];
    if profile.ambient_dim() != n0 + k {
        return Err(GeomError::DimensionMismatch { expected: n0 + k, found: profile.ambient_dim() });
    }
    let action = LinearAction::block_rotations(block_dims)?;
    let section = block_section(&action, block_dims)?;
    let weyl = section_weyl_group(&action, &section, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP)?;
    let chart = scaled_profile(profile, n0, radii);
    let profile = ProfileHypersurface::new(section, chart, &opts.profile_counts)?;
    let prepared = prepare_profile(profile, &weyl, opts.tol, opts.evenness)?;
    let swept = sweep(&action, &prepared.profile, &opts.sweep)?;
    Ok(BlockHypersurface { action, block_dims: block_dims.to_vec(), radii: radii.to_vec(), weyl, prepared, swept })
}

/// Rotation hypersurface in `R^{n+1}` with axis `R^k`: the profile chart lies
/// in the half-space `(x_1, …, x_k, d)` and is swept by `I_k ⊕ SO(n-k+1)`.
pub fn rotation_hypersurface(k: usize, n: usize, profile: SharedChart, opts: &BlockOptions) -> Result<BlockHypersurface> {
    if n < k + 1 {
        return Err(GeomError::InvalidInput(format!("rotation needs n > k, got k={k} n={n}")));
    }
    multi_rotational(&[k, n - k + 1], &[1.0], profile, opts)
}

/// Chart of the swept block hypersurface: profile parameters followed by
/// hyperspherical angles of each rotating block,
/// `(u, s_1, …, s_k) ↦ (v_0(u), r_1 t_1(u) h(s_1), …, r_k t_k(u) h(s_k))`.
pub fn block_chart(block_dims: &[usize], radii: &[f64], profile: SharedChart, margin: f64) -> FnChart {
    let n0 = block_dims[0];
    let mut domain = profile.domain().to_vec();
    for d in &block_dims[1..] {
        domain.extend(hyperspherical_domain(d - 1, margin));
    }
    let dims = block_dims.to_vec();
    let radii = radii.to_vec();
    let ambient: usize = dims.iter().sum();
    let pdim = profile.param_dim();
    FnChart::new(domain, ambient, move |u| {
        let c = profile.eval(&u[..pdim]);
        let mut out = VecN::zeros(ambient);
        for i in 0..n0 {
            out[i] = c[i];
        }
        let mut pos = n0;
        let mut par = pdim;
        for (b, d) in dims[1..].iter().enumerate() {
            let h = hyperspherical(&u[par..par + d - 1]);
            let scale = radii[b] * c[n0 + b];
            for j in 0..*d {
                out[pos + j] = scale * h[j];
            }
            pos += d;
            par += d - 1;
        }
        out
    })
}

/// [`block_chart`] for a rotation hypersurface with axis `R^k` in `R^{n+1}`.
pub fn rotation_chart(k: usize, n: usize, profile: SharedChart, margin: f64) -> FnChart {
    block_chart(&[k, n - k + 1], &[1.0], profile, margin)
}
