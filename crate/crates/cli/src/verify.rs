use std::path::Path;
use std::sync::Arc;

use polargeo::analysis::{
    fundamental_forms, relative_nullity, rotation_structure_report, stencil_nodes, RotationOptions,
};
use polargeo::chart::{Chart, Grid, SharedChart};
use polargeo::mesh::{parse_mesh, Mesh};
use polargeo::synthesis::{block_chart, equivariance_check, transversality_check};

use crate::config::RunConfig;
use crate::exit::{CliError, Code};
use crate::inputs::{parse_profile_points, profile_chart, read_to_string};
use crate::meta::{load_meta, MeshMeta};
use crate::output::{fmt_f, fmt_vec, Outcome};
use crate::synth::DEFAULT_TRIALS;

/// Parameter nodes examined by the curvature check, summed over the grid.
const CURVATURE_NODES: usize = 4096;
const CHART_MARGIN: f64 = 0.1;

pub fn load_mesh(path: &Path) -> Result<Mesh, CliError> {
    let text = read_to_string(path, "mesh")?;
    parse_mesh(&text).map_err(|e| CliError::new(Code::Parse, format!("{}:{}: {}", path.display(), e.line, e.message)))
}

fn meta_profile(cfg: &RunConfig, meta: &MeshMeta) -> Result<SharedChart, CliError> {
    match &meta.profile_text {
        Some(text) => Ok(Arc::new(parse_profile_points(text, "metadata profile")?)),
        None => profile_chart(cfg, &meta.synth.profile),
    }
}

fn curvature(cfg: &RunConfig, meta: &MeshMeta, dims: &[usize], radii: &[f64], o: &mut Outcome) -> Result<(), CliError> {
    let fd_step = cfg.fd_step()?;
    let tol = cfg.tol()?;
    let chart = block_chart(dims, radii, meta_profile(cfg, meta)?, CHART_MARGIN);
    let d = chart.param_dim();
    let per_axis = ((CURVATURE_NODES as f64).powf(1.0 / d as f64).floor() as usize).max(4);
    let grid = Grid::uniform(chart.domain(), per_axis)?;
    let nodes = stencil_nodes(&grid, fd_step);
    let mut k_min = f64::INFINITY;
    let mut k_max = f64::NEG_INFINITY;
    let mut nullity_min = usize::MAX;
    let mut nullity_max = 0;
    let mut convex = 0;
    let mut degenerate = 0;
    for &i in &nodes {
        match fundamental_forms(&chart, &grid.params(i), fd_step) {
            Ok(s) => {
                for k in &s.principal_curvatures {
                    k_min = k_min.min(*k);
                    k_max = k_max.max(*k);
                }
                let n = relative_nullity(&s, tol);
                nullity_min = nullity_min.min(n);
                nullity_max = nullity_max.max(n);
                if s.principal_curvatures.iter().all(|k| *k > tol) {
                    convex += 1;
                }
            }
            Err(polargeo::GeomError::DegenerateTangents { .. }) => degenerate += 1,
            Err(e) => return Err(e.into()),
        }
    }
    o.section("curvature");
    o.kv("chart_params", d);
    o.kv("nodes", nodes.len());
    o.kv("degenerate_nodes", degenerate);
    o.kv("fd_step", fmt_f(fd_step));
    o.value("kappa_min", k_min);
    o.value("kappa_max", k_max);
    if nullity_min != usize::MAX {
        o.kv("relative_nullity_range", format!("{nullity_min}..{nullity_max}"));
    }
    o.kv("strictly_convex_nodes", convex);
    o.kv("compact", meta.compact);
    let finite = k_min.is_finite() && k_max.is_finite();
    let passed = finite && (!meta.compact || convex > 0);
    o.check("curvature", passed, Code::Curvature);
    Ok(())
}

pub fn verify(cfg: &RunConfig, mesh_path: &Path, trials: Option<usize>, o: &mut Outcome) -> Result<(), CliError> {
    let tol = cfg.tol()?;
    let mesh = load_mesh(mesh_path)?;
    let meta = load_meta(mesh_path)?;
    let action = meta.action.to_action()?;
    let section = meta.section.to_section(&action)?;
    if mesh.ambient_dim != action.ambient_dim() {
        return Err(CliError::new(Code::Parse, "mesh and metadata disagree on the ambient dimension"));
    }
    let trials = trials.or(cfg.verify.as_ref().and_then(|v| v.equivariance_trials)).unwrap_or(DEFAULT_TRIALS);
    o.section("mesh");
    o.kv("mode", &meta.mode);
    o.kv("vertices", mesh.vertices.len());
    o.kv("group_blocks", mesh.group_count());
    o.value("resolution", meta.resolution);
    let swept = mesh.to_swept(action.clone(), section.clone(), meta.resolution);

    o.section("checks");
    let eq = equivariance_check(&swept, &action, trials, meta.seed);
    o.kv("equivariance_trials", eq.trials);
    o.value("equivariance_residual", eq.max_residual);
    o.value("equivariance_bound", eq.bound);
    o.check("equivariance", eq.passed, Code::Equivariance);
    let tr = transversality_check(&section, &swept, tol);
    o.kv("transversality_checked", tr.checked);
    o.value("transversality_margin", tr.min_margin);
    o.check("transversality", tr.passed, Code::Transversality);

    match (&meta.block_dims, &meta.radii) {
        (Some(dims), Some(radii)) => curvature(cfg, &meta, dims, radii, o)?,
        _ => {
            o.section("curvature");
            o.line("sweep-mode mesh carries no chart; curvature check skipped");
        }
    }

    let rs = rotation_structure_report(&action, &swept, RotationOptions::default())?;
    o.section("rotation structure");
    o.kv("orbit_samples", rs.samples);
    for c in &rs.conditions {
        let note = if c.approximate { " (approximate)" } else { "" };
        o.kv(&format!("{} {}", c.condition, c.condition.description()), format!("{} {}{note}", c.holds, fmt_f(c.value)));
    }
    o.kv("product_of_circles", rs.product_of_circles);
    if let Some(axis) = &rs.axis {
        o.kv("axis_dim", axis.rank());
        for (i, b) in axis.basis().iter().enumerate() {
            o.kv(&format!("axis[{i}]"), fmt_vec(b.as_slice()));
        }
    }
    Ok(())
}
