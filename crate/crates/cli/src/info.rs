use polargeo::action::DEFAULT_SAMPLES;
use polargeo::isoparametric::{gauss_curvature_table, orbit_geometry, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP};
use polargeo::polar::{certify_polar, classify_orbit, section_at, OrbitKind, PolarGrid};
use polargeo::{LinearAction, VecN};

use crate::config::RunConfig;
use crate::exit::{CliError, Code};
use crate::output::{fmt_f, fmt_vec, Outcome};

const ISOTROPY_SAMPLES: usize = 32;
pub const POLAR_SAMPLES: usize = 64;

fn describe_action(o: &mut Outcome, action: &LinearAction) {
    o.section("action");
    o.kv("label", action.label());
    o.kv("ambient_dim", action.ambient_dim());
    o.kv("generators", action.generators().len());
    o.kv("algebra_dim", action.algebra().len());
}

pub fn action_info(cfg: &RunConfig, action: &LinearAction, o: &mut Outcome) -> Result<(), CliError> {
    let tol = cfg.tol()?;
    let seed = cfg.seed.unwrap_or(polargeo::action::DEFAULT_SEED);
    describe_action(o, action);
    let regular = action.find_regular_point(seed, DEFAULT_SAMPLES);
    o.section("orbits");
    o.kv("max_orbit_dim", regular.orbit_dim);
    o.kv("cohomogeneity", action.ambient_dim() - regular.orbit_dim);
    o.value("cohomogeneity", (action.ambient_dim() - regular.orbit_dim) as f64);
    let fixed = action.fixed_subspace(1e-9);
    o.kv("fixed_subspace_dim", fixed.rank());
    for (i, b) in fixed.basis().iter().enumerate() {
        o.kv(&format!("fixed_basis[{i}]"), fmt_vec(b.as_slice()));
    }
    o.kv("regular_point", fmt_vec(regular.point.as_slice()));
    if regular.all_trivial {
        o.line("every sampled orbit is a point; the action is trivial");
        o.check("polarity", true, Code::Polarity);
        return Ok(());
    }
    let section = section_at(action, &regular.point)?;
    o.section("section");
    o.kv("rank", section.rank());
    for (i, b) in section.frame().basis().iter().enumerate() {
        o.kv(&format!("basis[{i}]"), fmt_vec(b.as_slice()));
    }
    let cert = certify_polar(action, &section, PolarGrid { samples: POLAR_SAMPLES, seed, tol });
    o.section("polar certificate");
    o.value("polar_residual", cert.max_residual);
    o.kv("tolerance", fmt_f(tol));
    o.kv("grid_samples", cert.grid.samples);
    o.kv("polar", cert.polar);
    o.check("polarity", cert.polar, Code::Polarity);
    Ok(())
}

pub fn orbit(cfg: &RunConfig, action: &LinearAction, point: &[f64], o: &mut Outcome) -> Result<(), CliError> {
    if point.len() != action.ambient_dim() {
        return Err(CliError::new(
            Code::Usage,
            format!("point has {} coordinates, action acts on R^{}", point.len(), action.ambient_dim()),
        ));
    }
    let seed = cfg.seed.unwrap_or(polargeo::action::DEFAULT_SEED);
    let p = VecN::from_column_slice(point);
    describe_action(o, action);
    let class = classify_orbit(action, &p, ISOTROPY_SAMPLES, seed);
    o.section("orbit");
    o.kv("point", fmt_vec(point));
    o.kv("orbit_dim", class.orbit_dim);
    let kind = match class.kind {
        OrbitKind::Principal => "principal",
        OrbitKind::ExceptionalSuspect => "exceptional-suspect",
        OrbitKind::Singular => "singular",
    };
    o.kv("classification", kind);
    if class.orbit_dim == 0 {
        return Err(polargeo::GeomError::PointOrbit.into());
    }
    if class.kind == OrbitKind::Singular {
        o.line("singular orbit: no principal normal decomposition");
        return Ok(());
    }
    let g = orbit_geometry(action, &p, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP)?;
    o.section("principal normals");
    o.kv("count", g.decomp.len());
    o.value("principal_normal_count", g.decomp.len() as f64);
    o.value("decomposition_residual", g.decomp.residual);
    for (i, eta) in g.decomp.normals.iter().enumerate() {
        o.kv(&format!("eta[{i}]"), fmt_vec(eta.as_slice()));
        o.value(&format!("eta_norm_{i}"), eta.norm());
        o.kv(&format!("multiplicity[{i}]"), g.decomp.multiplicities[i]);
    }
    let table = gauss_curvature_table(&g.decomp);
    o.section("curvature table");
    for r in 0..table.nrows() {
        let row: Vec<f64> = table.row(r).iter().copied().collect();
        o.line(fmt_vec(&row));
    }
    o.section("weyl group");
    for w in &g.focal.warnings {
        o.kv("warning", w);
    }
    o.kv("order", g.weyl.order());
    o.value("weyl_order", g.weyl.order() as f64);
    for (i, e) in g.weyl.elements.iter().enumerate() {
        let rows: Vec<String> =
            (0..e.linear.nrows()).map(|r| fmt_vec(&e.linear.row(r).iter().copied().collect::<Vec<_>>())).collect();
        o.kv(&format!("element[{i}]"), format!("{} + {}", rows.join(" "), fmt_vec(e.translation.as_slice())));
    }
    Ok(())
}
