//! One line per acceptance criterion. Run with
//! `cargo test -p polargeo-cli --test acceptance -- --nocapture`.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use polargeo::analysis::{
    fundamental_forms, position_tangency, relative_nullity, rotation_structure_report, stencil_nodes,
    RotationCondition, RotationOptions,
};
use polargeo::chart::{circle_chart, hyperspherical, hyperspherical_domain, sphere_chart, Chart, FnChart, Grid, ParamAxis, SharedChart};
use polargeo::isoparametric::{
    orbit_geometry, orbit_principal_normals, orbit_second_ff_fd, principal_normals, section_weyl_group,
    DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP,
};
use polargeo::polar::{certify_polar, section_at, PolarGrid};
use polargeo::sampling::{gaussian_vector, rng};
use polargeo::synthesis::{
    block_section, check_weyl_invariance, equivariance_check, multi_rotational, rotation_hypersurface,
    scalar_graph_evenness, section_slice_check, transversality_check, warped_to_rotation, BlockOptions,
    EvennessOptions, MetricOptions, ProfileHypersurface, WarpedProductSpec,
};
use polargeo::{exp_skew, GeomError, LinearAction, SkewMat, VecN};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn v(xs: &[f64]) -> VecN {
    VecN::from_column_slice(xs)
}

fn block_opts(nodes: usize, groups: usize, tol: f64) -> BlockOptions {
    let mut o = BlockOptions::new(vec![nodes], tol);
    o.sweep.group_count = groups;
    o
}

fn circle(center: [f64; 2], r: f64) -> SharedChart {
    Arc::new(circle_chart(center, r, 0.0, TAU))
}

fn c1_exponential() -> Outcome {
    let mut r = rng(2024);
    let (mut ortho, mut law) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let n = 2 + i % 7;
        let g = gaussian_vector(&mut r, n * n);
        let a = SkewMat::from_antisymmetrized(&DMatrix::from_column_slice(n, n, g.as_slice()));
        let e = exp_skew(&a, 1.0);
        let m = e.matrix();
        ortho = ortho.max((m.transpose() * m - DMatrix::identity(n, n)).amax());
        let (s, t) = (0.37, -1.21);
        let lhs = exp_skew(&a, s + t);
        let rhs = exp_skew(&a, s).compose(&exp_skew(&a, t));
        law = law.max((lhs.matrix() - rhs.matrix()).amax());
    }
    outcome(ortho < 1e-10 && law < 1e-9, format!("orthogonality {ortho:.2e} (< 1e-10), one-parameter law {law:.2e} (< 1e-9)"))
}

fn c2_cohomogeneity() -> Outcome {
    let mut cases: Vec<(LinearAction, usize)> = vec![
        (LinearAction::rotation_group(3), 1),
        (LinearAction::block_rotations(&[0, 2, 2]).unwrap(), 2),
    ];
    for (n, k) in [(3, 1), (4, 1), (4, 2), (5, 3)] {
        cases.push((LinearAction::rotation_model(k, n).unwrap(), k + 1));
    }
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut found = Vec::new();
    for (a, expected) in &cases {
        let c = a.cohomogeneity();
        found.push(c);
        ok &= c == *expected;
        let p = a.find_regular_point(7, 256).point;
        let s = section_at(a, &p).unwrap();
        let cert = certify_polar(a, &s, PolarGrid { samples: 64, seed: 3, tol: 1e-10 });
        worst = worst.max(cert.max_residual);
        ok &= cert.polar;
    }
    outcome(ok, format!("cohomogeneities {found:?} (expected [1, 2, 2, 2, 3, 4]), polar residual {worst:.2e} (< 1e-10)"))
}

fn c3_decomposition() -> Outcome {
    let torus = LinearAction::block_rotations(&[0, 2, 2]).unwrap();
    let mut ok = true;
    let (mut closed, mut fd, mut cross) = (0.0f64, 0.0f64, 0.0f64);
    for (r1, r2) in [(1.0, 1.0), (1.0, 2.0), (0.5, 3.0)] {
        let p = v(&[r1, 0.0, r2, 0.0]);
        let d = orbit_principal_normals(&torus, &p, DEFAULT_CLUSTER_TOL).unwrap();
        ok &= d.len() == 2;
        let mut norms: Vec<f64> = d.normals.iter().map(|e| e.norm()).collect();
        norms.sort_by(f64::total_cmp);
        let mut expect = [1.0 / r1, 1.0 / r2];
        expect.sort_by(f64::total_cmp);
        for (n, e) in norms.iter().zip(expect) {
            closed = closed.max((n - e).abs());
        }
        cross = cross.max(d.normals[0].dot(&d.normals[1]).abs());
        let dfd = principal_normals(&orbit_second_ff_fd(&torus, &p, 1e-4).unwrap(), DEFAULT_CLUSTER_TOL).unwrap();
        ok &= dfd.len() == 2;
        let mut norms: Vec<f64> = dfd.normals.iter().map(|e| e.norm()).collect();
        norms.sort_by(f64::total_cmp);
        for (n, e) in norms.iter().zip(expect) {
            fd = fd.max((n - e).abs());
        }
    }
    let so3 = LinearAction::rotation_group(3);
    let mut sphere = 0.0f64;
    for r in [1.0, 2.5] {
        let d = orbit_principal_normals(&so3, &v(&[0.0, 0.0, r]), DEFAULT_CLUSTER_TOL).unwrap();
        ok &= d.len() == 1;
        sphere = sphere.max((d.normals[0].norm() - 1.0 / r).abs());
    }
    ok &= closed < 1e-8 && fd < 1e-5 && cross < 1e-8 && sphere < 1e-8;
    outcome(
        ok,
        format!(
            "torus |eta| error {closed:.2e} closed form (< 1e-8), {fd:.2e} finite differences (< 1e-5), \
             <eta1,eta2> {cross:.2e} (< 1e-8), sphere {sphere:.2e} (< 1e-8)"
        ),
    )
}

fn c4_weyl() -> Outcome {
    let g = |a: &LinearAction, p: VecN| orbit_geometry(a, &p, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap().weyl;
    let sphere = g(&LinearAction::rotation_group(3), v(&[0.0, 0.0, 1.5]));
    let torus = g(&LinearAction::block_rotations(&[0, 2, 2]).unwrap(), v(&[1.0, 0.0, 2.0, 0.0]));
    let model = g(&LinearAction::rotation_model(1, 3).unwrap(), v(&[0.4, 0.0, 0.0, 1.3]));
    // each torus generator reverses exactly one section axis
    let axis_reflections = torus.generators.len() == 2
        && torus.generators.iter().all(|r| {
            let l = &r.linear;
            let diag = l.diagonal();
            (l - DMatrix::from_diagonal(&diag)).amax() < 1e-10
                && diag.iter().filter(|x| (**x + 1.0).abs() < 1e-10).count() == 1
                && diag.iter().filter(|x| (**x - 1.0).abs() < 1e-10).count() == 1
        });
    let orders = [sphere.order(), torus.order(), model.order()];
    outcome(
        orders == [2, 4, 2] && axis_reflections,
        format!("orders {orders:?} (expected [2, 4, 2]), torus generators are axis reflections: {axis_reflections}"),
    )
}

fn c5_round_trip() -> Outcome {
    let rot = rotation_hypersurface(1, 3, circle([0.0, 3.0], 1.0), &block_opts(64, 64, 1e-8)).unwrap();
    let eq = equivariance_check(&rot.swept, &rot.action, 50, 11);
    let tr = transversality_check(rot.swept.section(), &rot.swept, 1e-8);
    let sl = section_slice_check(&rot.swept, &rot.prepared.profile, 1e-8);
    outcome(
        eq.passed && tr.passed && tr.checked > 0 && sl.passed,
        format!(
            "equivariance {:.3} < 2x resolution {:.3}; transversal at {} of {} section samples; \
             slice off-profile {:.1e}, uncovered {:.1e}",
            eq.max_residual,
            eq.bound,
            tr.checked - tr.failures.len(),
            tr.checked,
            sl.max_off_profile,
            sl.max_uncovered
        ),
    )
}

fn c6_rotation_conditions() -> Outcome {
    let rot = rotation_hypersurface(1, 3, circle([0.0, 3.0], 1.0), &block_opts(32, 16, 1e-8)).unwrap();
    let r = rotation_structure_report(&rot.action, &rot.swept, RotationOptions::default()).unwrap();
    let umb = r.conditions.iter().find(|c| c.condition == RotationCondition::UmbilicOrbits).unwrap().value;
    let rot_ok = r.holds(RotationCondition::UmbilicOrbits) && r.holds(RotationCondition::PositiveCurvatureOrbit) && umb < 1e-4;

    let multi = multi_rotational(&[0, 2, 2], &[1.0, 1.0], circle([2.0, 2.0], 1.0), &block_opts(32, 16, 1e-8)).unwrap();
    let m = rotation_structure_report(&multi.action, &multi.swept, RotationOptions::default()).unwrap();
    let fails = [
        RotationCondition::UmbilicOrbits,
        RotationCondition::ConstantCurvatureOrbit,
        RotationCondition::PositiveCurvatureOrbit,
    ]
    .iter()
    .all(|c| !m.holds(*c));
    let mut flat = true;
    let mut cross = 0.0f64;
    for s in multi.swept.samples().iter().filter(|s| s.group_tag == 0 && !s.is_singular()) {
        let d = orbit_principal_normals(&multi.action, &s.point, DEFAULT_CLUSTER_TOL).unwrap();
        flat &= d.multiplicities == vec![1, 1];
        cross = cross.max(d.normals[0].dot(&d.normals[1]).abs());
    }
    outcome(
        rot_ok && fails && flat && cross < 1e-8 && m.product_of_circles,
        format!(
            "rotation torus: umbilicity {umb:.1e} (< 1e-4), (iii) {} (v) {}; torus action: (iii)-(v) fail {fails}, \
             multiplicities 1 {flat}, <eta1,eta2> {cross:.1e}, product of circles {}",
            r.holds(RotationCondition::UmbilicOrbits),
            r.holds(RotationCondition::PositiveCurvatureOrbit),
            m.product_of_circles
        ),
    )
}

fn torus_warped(scale: f64) -> WarpedProductSpec {
    let base = circle([0.0, 3.0], 1.0);
    let b = Arc::clone(&base);
    WarpedProductSpec::from_fn(base, &[64], move |u| scale * b.eval(u)[1], 2).unwrap()
}

fn c7_metric() -> Outcome {
    let opts = block_opts(64, 16, 1e-8);
    let mo = MetricOptions { fd_step: 1e-4, ..MetricOptions::default() };
    let w = warped_to_rotation(&torus_warped(1.0), &opts, mo).unwrap();
    let rejected = matches!(warped_to_rotation(&torus_warped(1.1), &opts, mo), Err(GeomError::Unrealizable { .. }));
    outcome(
        w.metric.max_relative_error < 1e-3 && rejected,
        format!(
            "relative metric error {:.2e} over {} samples (< 1e-3), rho +10% rejected: {rejected}",
            w.metric.max_relative_error, w.metric.samples
        ),
    )
}

fn graph_profile(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SharedChart {
    Arc::new(FnChart::new(vec![ParamAxis::new(0.0, 1.0)], 2, move |u| VecN::from_vec(vec![f(u[0]), u[0]])))
}

fn c8_evenness() -> Outcome {
    let o = EvennessOptions::default();
    let quad = scalar_graph_evenness(&|x| 1.0 + x * x, o);
    let cos = scalar_graph_evenness(&|x: f64| x.cos(), o);
    let cubic = scalar_graph_evenness(&|x| 1.0 + x * x * x, o);
    let mut bo = block_opts(16, 8, 1e-8);
    bo.evenness = o;
    let blocked = matches!(
        rotation_hypersurface(1, 3, graph_profile(|d| 1.0 + d * d * d), &bo),
        Err(GeomError::NotEven { order: 3, .. })
    );
    let allowed = rotation_hypersurface(1, 3, graph_profile(|d| 1.0 + d * d), &bo).is_ok();
    outcome(
        quad.passed && cos.passed && cubic.failed_order == Some(3) && blocked && allowed,
        format!(
            "1+x^2 {}, cos x {} through order {}; 1+x^3 fails at order {:?}; rotation blocked {blocked}, even profile accepted {allowed}",
            quad.passed, cos.passed, o.order, cubic.failed_order
        ),
    )
}

fn c9_tangency() -> Outcome {
    let (sa, ca) = (0.6f64.sin(), 0.6f64.cos());
    let mut domain = vec![ParamAxis::new(0.5, 2.0)];
    domain.extend(hyperspherical_domain(2, 0.3));
    let cone = FnChart::new(domain, 4, move |u| {
        let h = hyperspherical(&u[1..]);
        VecN::from_vec(vec![u[0] * sa * h[0], u[0] * sa * h[1], u[0] * sa * h[2], u[0] * ca])
    });
    let h = 1e-3;
    let scan = |c: &FnChart| {
        let g = Grid::uniform(c.domain(), 6).unwrap();
        stencil_nodes(&g, h)
            .into_iter()
            .map(|i| {
                let p = g.params(i);
                let t = position_tangency(c, &p, h, 1e-6).unwrap();
                let s = fundamental_forms(c, &p, h).unwrap();
                (t.tangent, relative_nullity(&s, 1e-4))
            })
            .collect::<Vec<_>>()
    };
    let cone_nodes = scan(&cone);
    let cone_ok = !cone_nodes.is_empty() && cone_nodes.iter().all(|(t, n)| *t && *n >= 1);
    let sphere = sphere_chart(VecN::zeros(4), 2.0, 0.2);
    let sphere_nodes = scan(&sphere);
    let sphere_ok = !sphere_nodes.is_empty() && sphere_nodes.iter().all(|(t, n)| !*t && *n == 0);
    outcome(
        cone_ok && sphere_ok,
        format!(
            "cone: tangent with nullity >= 1 at {} nodes: {cone_ok}; S^3(2): transverse with nullity 0 at {} nodes: {sphere_ok}",
            cone_nodes.len(),
            sphere_nodes.len()
        ),
    )
}

const CONTROL_TORUS: &str = r#"
seed = 42
tol = 1e-6
fd_step = 1e-4
resolution = [64, 64]
out = "out"
[synth]
mode = "rotation"
n = 2
[synth.profile]
kind = "circle"
center = [0.0, 3.0]
radius = 1.0
"#;

/// Pushes the vertex farthest from the axis radially outward by `by`.
fn displace_outermost(mesh: &str, by: f64) -> String {
    let mut lines: Vec<String> = mesh.lines().map(str::to_string).collect();
    let coords = |l: &str| -> Vec<f64> { l.split_whitespace().skip(1).map(|t| t.parse().unwrap()).collect() };
    let radius = |p: &[f64]| p[1].hypot(p[2]);
    let idx = (0..lines.len())
        .filter(|&i| lines[i].starts_with("v "))
        .max_by(|&a, &b| radius(&coords(&lines[a])).total_cmp(&radius(&coords(&lines[b]))))
        .unwrap();
    let mut p = coords(&lines[idx]);
    let r = radius(&p);
    p[1] += by * p[1] / r;
    p[2] += by * p[2] / r;
    lines[idx] = format!("v {} {} {}", p[0], p[1], p[2]);
    lines.join("\n") + "\n"
}

fn run_bin(args: &[&str], cfg: &Path, mesh: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_polargeo"))
        .env_remove("POLARGEO_OUT")
        .arg("--config")
        .arg(cfg)
        .args(args)
        .arg(mesh)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn c10_negative_controls() -> Outcome {
    let a = LinearAction::rotation_model(1, 3).unwrap();
    let s = block_section(&a, &[1, 3]).unwrap();
    let w = section_weyl_group(&a, &s, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
    let mut rel = 0.0f64;
    for offset in [0.1, 0.25, 0.4] {
        let p = ProfileHypersurface::new(s.clone(), circle([0.0, offset], 1.0), &[64]).unwrap();
        let r = check_weyl_invariance(&p, &w, 1e-8);
        rel = rel.max(if r.invariant { f64::INFINITY } else { (r.max_deviation / (2.0 * offset) - 1.0).abs() });
    }

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.toml");
    fs::write(&cfg, CONTROL_TORUS).unwrap();
    let mesh = dir.path().join("out/mesh.obj");
    let synth = Command::new(env!("CARGO_BIN_EXE_polargeo")).arg("--config").arg(&cfg).arg("synth").output().unwrap();
    let clean = run_bin(&["verify", "--mesh"], &cfg, &mesh);
    let text = fs::read_to_string(&mesh).unwrap();
    fs::write(&mesh, displace_outermost(&text, 2.0)).unwrap();
    let corrupted = run_bin(&["verify", "--mesh"], &cfg, &mesh);
    outcome(
        rel < 0.1 && synth.status.code() == Some(0) && clean == 0 && corrupted == 7,
        format!(
            "asymmetric profile deviation within {:.1}% of 2*offset (< 10%); verify exit {clean} on clean mesh, {corrupted} on corrupted (expected 7)",
            rel * 100.0
        ),
    )
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 10] = [
        (1, "exponential and orthogonality", c1_exponential, Some(Duration::from_secs(1))),
        (2, "cohomogeneity table and polarity", c2_cohomogeneity, Some(Duration::from_secs(5))),
        (3, "isoparametric decomposition", c3_decomposition, Some(Duration::from_secs(2))),
        (4, "Weyl groups", c4_weyl, Some(Duration::from_secs(1))),
        (5, "rotation torus round trip at 64x64", c5_round_trip, Some(Duration::from_secs(10))),
        (6, "rotation structure diagnostics", c6_rotation_conditions, Some(Duration::from_secs(10))),
        (7, "warped metric identity", c7_metric, Some(Duration::from_secs(5))),
        (8, "evenness gate", c8_evenness, Some(Duration::from_secs(1))),
        (9, "position tangency and nullity", c9_tangency, Some(Duration::from_secs(2))),
        (10, "negative controls", c10_negative_controls, None),
    ];
    let mut failed = Vec::new();
    println!();
    for (id, name, f, limit) in criteria {
        let start = Instant::now();
        let o = f();
        let t = start.elapsed();
        let in_time = limit.is_none_or(|l| t < l);
        let pass = o.passed && in_time;
        let limit_note = limit.map_or(String::new(), |l| format!(", limit {:.0} s", l.as_secs_f64()));
        println!(
            "[{}] {id:>2} {name}: {} ({:.3} s{limit_note})",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            t.as_secs_f64()
        );
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
