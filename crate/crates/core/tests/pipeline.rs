use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use polargeo::analysis::{rotation_structure_report, RotationCondition, RotationOptions};
use polargeo::chart::{circle_chart, SharedChart};
use polargeo::isoparametric::{section_weyl_group, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP};
use polargeo::mesh::{parse_mesh, Mesh};
use polargeo::polar::{certify_polar, section_at, PolarGrid};
use polargeo::synthesis::{
    equivariance_check, multi_rotational, prepare_profile, rotation_hypersurface, section_slice_check, sweep,
    transversality_check, BlockOptions, EvennessOptions, ProfileHypersurface, SweepOptions,
};
use polargeo::{LinearAction, VecN};

fn circle(center: [f64; 2], r: f64) -> SharedChart {
    Arc::new(circle_chart(center, r, 0.0, TAU))
}

fn opts(nodes: usize, groups: usize) -> BlockOptions {
    let mut o = BlockOptions::new(vec![nodes], 1e-8);
    o.sweep.group_count = groups;
    o
}

#[test]
fn general_sweep_through_torus_section() {
    let a = LinearAction::block_rotations(&[0, 2, 2]).unwrap();
    let section = section_at(&a, &VecN::from_vec(vec![1.0, 0.0, 2.0, 0.0])).unwrap();
    assert!(certify_polar(&a, &section, PolarGrid::default()).polar);
    let w = section_weyl_group(&a, &section, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
    assert_eq!(w.order(), 4);
    let profile = ProfileHypersurface::new(section.clone(), circle([2.0, 2.0], 1.0), &[40]).unwrap();
    let prepared = prepare_profile(profile, &w, 1e-8, EvennessOptions::default()).unwrap();
    let m = sweep(&a, &prepared.profile, &SweepOptions { seed: 5, group_count: 40, singular_tol: 1e-9 }).unwrap();
    assert!(equivariance_check(&m, &a, 50, 1).passed);
    assert!(transversality_check(&section, &m, 1e-8).passed);
    assert!(section_slice_check(&m, &prepared.profile, 1e-8).passed);
}

#[test]
fn mesh_round_trip_preserves_checks() {
    let rot = rotation_hypersurface(1, 3, circle([0.0, 3.0], 1.0), &opts(24, 16)).unwrap();
    let text = Mesh::from_swept(&rot.swept).write_string();
    let mesh = parse_mesh(&text).unwrap();
    assert_eq!(mesh.write_string(), text);
    let back = mesh.to_swept(rot.action.clone(), rot.swept.section().clone(), rot.swept.resolution());
    assert_eq!(back.points(), rot.swept.points());
    let a = equivariance_check(&rot.swept, &rot.action, 20, 9);
    let b = equivariance_check(&back, &rot.action, 20, 9);
    assert_eq!(a.max_residual, b.max_residual);
    assert!(transversality_check(back.section(), &back, 1e-8).passed);
}

#[test]
fn clifford_hypersurfaces_are_products_of_circles() {
    let quarter: SharedChart = Arc::new(circle_chart([0.0, 0.0], 1.0, 0.0, FRAC_PI_2));
    let m = multi_rotational(&[0, 2, 2], &[1.0, 1.0], quarter, &opts(17, 16)).unwrap();
    let r = rotation_structure_report(&m.action, &m.swept, RotationOptions::default()).unwrap();
    assert!(r.product_of_circles);
    assert!(!r.holds(RotationCondition::UmbilicOrbits));
    assert!(r.axis.is_none());
}

#[test]
fn rotation_models_have_cohomogeneity_k_plus_one() {
    for (n, k) in [(2, 1), (3, 1), (4, 2), (5, 3), (6, 2)] {
        let a = LinearAction::rotation_model(k, n).unwrap();
        assert_eq!(a.cohomogeneity(), k + 1, "k={k} n={n}");
        assert_eq!(a.fixed_subspace(1e-9).rank(), k);
    }
}
