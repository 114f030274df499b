//! Principal orbits as isoparametric submanifolds: second fundamental form,
//! shape operators, principal normals, focal hyperplanes and Weyl groups.

mod principal;
mod second_ff;
mod weyl;

pub use principal::{
    check_space_form_relations, gauss_curvature_table, orbit_principal_normals, principal_normals,
    transport_residual, PrincipalNormalDecomp, SpaceFormReport, SpaceFormViolation, DEFAULT_CLUSTER_TOL,
};
pub use second_ff::{commutation_residual, orbit_second_ff, orbit_second_ff_fd, shape_operator, SecondFF};
pub use weyl::{
    focal_hyperplanes, invariant_hyperplane_reduction, weyl_group, AffineMap, FocalHyperplane, FocalSet,
    WeylGroupRep, DEFAULT_WEYL_CAP,
};

use crate::action::LinearAction;
use crate::error::Result;
use crate::linalg::VecN;
use crate::polar::SectionSubspace;

/// Everything computed at one orbit point.
#[derive(Debug, Clone)]
pub struct OrbitGeometry {
    pub ff: SecondFF,
    pub decomp: PrincipalNormalDecomp,
    pub focal: FocalSet,
    pub weyl: WeylGroupRep,
}

pub fn orbit_geometry(action: &LinearAction, p: &VecN, cluster_tol: f64, cap: usize) -> Result<OrbitGeometry> {
    let ff = orbit_second_ff(action, p)?;
    let decomp = principal_normals(&ff, cluster_tol)?;
    let focal = focal_hyperplanes(&decomp, ff.normal());
    let weyl = weyl_group(&focal, cap)?;
    Ok(OrbitGeometry { ff, decomp, focal, weyl })
}

/// Weyl group of the action acting linearly on section coordinates, computed
/// from the focal hyperplanes of the orbit through the section basepoint.
pub fn section_weyl_group(
    action: &LinearAction,
    section: &SectionSubspace,
    cluster_tol: f64,
    cap: usize,
) -> Result<WeylGroupRep> {
    let g = orbit_geometry(action, section.basepoint(), cluster_tol, cap)?;
    Ok(g.weyl.recentered(section.frame(), &VecN::zeros(action.ambient_dim())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GeomError;
    use crate::linalg::{unit, Frame};
    use crate::sampling::{rng, unit_sphere_point};
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> VecN {
        DVector::from_column_slice(xs)
    }

    fn torus() -> LinearAction {
        LinearAction::block_rotations(&[0, 2, 2]).unwrap()
    }

    #[test]
    fn sphere_second_form_is_umbilic() {
        let a = LinearAction::rotation_group(3);
        let p = v(&[0.3, -1.2, 0.9]);
        let r = p.norm();
        let ff = orbit_second_ff(&a, &p).unwrap();
        assert_eq!(ff.dim(), 2);
        let mut g = rng(3);
        for _ in 0..10 {
            let c = unit_sphere_point(&mut g, 2);
            let val = ff.eval_coords(c.as_slice(), c.as_slice());
            assert_abs_diff_eq!(val, -&p / (r * r), epsilon = 1e-10);
        }
        let s = shape_operator(&ff, &(-&p / r)).unwrap();
        assert_abs_diff_eq!(s, DMatrix::identity(2, 2) / r, epsilon = 1e-10);
        let zero = shape_operator(&ff, &VecN::zeros(3)).unwrap();
        assert_eq!(zero.amax(), 0.0);
    }

    #[test]
    fn torus_second_form_blocks() {
        let (r1, r2) = (1.5, 0.7);
        let p = v(&[r1, 0.0, r2, 0.0]);
        let ff = orbit_second_ff(&torus(), &p).unwrap();
        let x1 = unit(4, 1);
        let x2 = unit(4, 3);
        assert_abs_diff_eq!(ff.eval(&x1, &x1), v(&[-1.0 / r1, 0.0, 0.0, 0.0]), epsilon = 1e-10);
        assert_abs_diff_eq!(ff.eval(&x2, &x2), v(&[0.0, 0.0, -1.0 / r2, 0.0]), epsilon = 1e-10);
        assert!(ff.eval(&x1, &x2).norm() < 1e-12);
        assert!(commutation_residual(&ff) < 1e-12);

        // inner unit normal of the first circle
        let s = shape_operator(&ff, &v(&[-1.0, 0.0, 0.0, 0.0])).unwrap();
        let t = ff.tangent();
        let a = t.coordinates(&x1);
        let b = t.coordinates(&x2);
        assert_abs_diff_eq!((a.transpose() * &s * &a)[0], 1.0 / r1, epsilon = 1e-10);
        assert_abs_diff_eq!((b.transpose() * &s * &b)[0], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn tangential_vector_rejected() {
        let p = v(&[1.0, 0.0, 1.0, 0.0]);
        let ff = orbit_second_ff(&torus(), &p).unwrap();
        assert!(matches!(shape_operator(&ff, &unit(4, 1)), Err(GeomError::TangentialComponent { .. })));
    }

    #[test]
    fn point_orbit_has_no_form() {
        let a = LinearAction::rotation_group(3);
        let err = orbit_second_ff(&a, &VecN::zeros(3)).unwrap_err();
        assert_eq!(err.to_string(), "point orbit has no second fundamental form");
    }

    #[test]
    fn finite_differences_match_closed_form() {
        let cases = [
            (LinearAction::rotation_group(3), v(&[0.3, -1.2, 0.9])),
            (torus(), v(&[1.1, 0.4, -0.3, 0.8])),
            (LinearAction::rotation_model(1, 3).unwrap(), v(&[0.5, 0.2, -0.7, 1.0])),
            (LinearAction::block_rotations(&[0, 3, 2]).unwrap(), v(&[0.2, 0.9, -0.4, 0.6, 0.5])),
        ];
        for (a, p) in cases {
            let exact = orbit_second_ff(&a, &p).unwrap();
            let fd = orbit_second_ff_fd(&a, &p, 1e-4).unwrap();
            for i in 0..exact.dim() {
                for j in 0..exact.dim() {
                    assert!((exact.value(i, j) - fd.value(i, j)).amax() < 1e-6, "{} ({i},{j})", a.label());
                }
            }
        }
    }

    #[test]
    fn sphere_principal_normal() {
        let a = LinearAction::rotation_group(4);
        let p = v(&[0.4, 0.1, -0.8, 1.3]);
        let r = p.norm();
        let d = orbit_principal_normals(&a, &p, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.multiplicities, vec![3]);
        assert_abs_diff_eq!(d.normals[0], -&p / (r * r), epsilon = 1e-10);
        let k = gauss_curvature_table(&d);
        assert_abs_diff_eq!(k[(0, 0)], 1.0 / (r * r), epsilon = 1e-10);
        assert!(check_space_form_relations(&d, 1.0 / (r * r), 1e-8).passed());
    }

    #[test]
    fn torus_principal_normals() {
        let (r1, r2) = (1.5, 0.7);
        let p = v(&[r1, 0.0, r2, 0.0]);
        let d = orbit_principal_normals(&torus(), &p, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(d.len(), 2);
        let mut lens: Vec<f64> = d.normals.iter().map(|n| n.norm()).collect();
        lens.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(lens[0], 1.0 / r1, epsilon = 1e-10);
        assert_abs_diff_eq!(lens[1], 1.0 / r2, epsilon = 1e-10);
        assert!(d.normals[0].dot(&d.normals[1]).abs() < 1e-12);
        assert!(d.residual < 1e-10);

        let k = gauss_curvature_table(&d);
        assert!(k[(0, 1)].abs() < 1e-12);
        assert!(check_space_form_relations(&d, 0.0, 1e-8).passed());
        let bad = check_space_form_relations(&d, 1.0, 1e-8);
        assert!(!bad.passed());
        assert!(bad.violations.iter().any(|x| matches!(x, SpaceFormViolation::OffDiagonal { .. })));
    }

    #[test]
    fn sphere_in_hyperplane_principal_normal() {
        let a = LinearAction::rotation_model(1, 3).unwrap();
        let p = v(&[0.8, 0.3, -1.1, 0.4]);
        let r = (p.norm_squared() - 0.64).sqrt();
        let d = orbit_principal_normals(&a, &p, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(d.len(), 1);
        assert_abs_diff_eq!(d.normals[0].norm(), 1.0 / r, epsilon = 1e-10);
    }

    #[test]
    fn shape_operator_formula_on_random_normals() {
        let p = v(&[0.9, 0.2, -0.5, 0.6, 0.3]);
        let a = LinearAction::block_rotations(&[1, 2, 2]).unwrap();
        let ff = orbit_second_ff(&a, &p).unwrap();
        let d = principal_normals(&ff, DEFAULT_CLUSTER_TOL).unwrap();
        let mut g = rng(20);
        for _ in 0..20 {
            let c = unit_sphere_point(&mut g, ff.normal().rank());
            let xi = ff.normal().combine(c.as_slice());
            let s = shape_operator(&ff, &xi).unwrap();
            for (i, x) in ff.tangent().basis().iter().enumerate() {
                let lhs = ff.tangent().combine(s.column(i).as_slice());
                assert!((lhs - d.shape_apply(&xi, x)).amax() < 1e-8);
            }
        }
    }

    #[test]
    fn flat_torus_is_product_of_circles() {
        let p = v(&[1.5, 0.0, 0.7, 0.0]);
        let t = torus();
        let d = orbit_principal_normals(&t, &p, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(d.multiplicities.iter().all(|&m| m == 1));
        let mut g = rng(9);
        for _ in 0..32 {
            let q = t.random_element(&mut g).apply(&p);
            assert_abs_diff_eq!(q[0].hypot(q[1]), 1.5, epsilon = 1e-8);
            assert_abs_diff_eq!(q[2].hypot(q[3]), 0.7, epsilon = 1e-8);
        }
    }

    #[test]
    fn ambiguous_clusters_are_reported() {
        let normal = Frame::from_orthonormal(vec![unit(3, 2)], 3).unwrap();
        let tangent = normal.complement();
        let e3 = unit(3, 2);
        let a = tangent.coordinates(&unit(3, 0));
        let b = tangent.coordinates(&unit(3, 1));
        // curvatures 1 and 1 + 1.5e-6 along two tangent directions
        let vals = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| &e3 * (a[i] * a[j] + (1.0 + 1.5e-6) * b[i] * b[j]))
                    .collect()
            })
            .collect();
        let ff = SecondFF::new(VecN::zeros(3), tangent, normal, vals).unwrap();
        let err = principal_normals(&ff, 1e-6).unwrap_err();
        assert!(matches!(err, GeomError::ClusterAmbiguity { .. }));
        assert_eq!(principal_normals(&ff, 1e-4).unwrap().len(), 1);
    }

    #[test]
    fn focal_points_and_hyperplanes() {
        let s = LinearAction::rotation_group(3);
        let p = v(&[0.0, 0.0, 2.0]);
        let g = orbit_geometry(&s, &p, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
        assert_eq!(g.focal.hyperplanes.len(), 1);
        // the focal point p + ξ with ⟨η, ξ⟩ = 1 is the origin
        let h = &g.focal.hyperplanes[0];
        let xi = g.focal.frame.combine((&h.normal_covector * (h.offset / h.normal_covector.norm_squared())).as_slice());
        assert!((&p + xi).norm() < 1e-12);
        assert_eq!(g.weyl.order(), 2);

        let (r1, r2) = (1.5, 0.7);
        let p = v(&[r1, 0.0, r2, 0.0]);
        let g = orbit_geometry(&torus(), &p, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
        assert_eq!(g.focal.hyperplanes.len(), 2);
        // lines x1 = 0 and x3 = 0 of the affine normal space
        for h in &g.focal.hyperplanes {
            let xi = g.focal.frame.combine((&h.normal_covector * (h.offset / h.normal_covector.norm_squared())).as_slice());
            let q = &p + xi;
            assert!(q[0].abs() < 1e-12 || q[2].abs() < 1e-12);
        }
        assert_eq!(g.weyl.order(), 4);
        assert!(g.weyl.permutation_residual(&g.focal) < 1e-8);
        assert!(invariant_hyperplane_reduction(&g.decomp, &g.weyl).is_none());
    }

    #[test]
    fn rotation_model_weyl_group_has_order_two() {
        for (k, n) in [(1, 2), (1, 3), (2, 4)] {
            let a = LinearAction::rotation_model(k, n).unwrap();
            let mut p = VecN::from_element(n + 1, 0.3);
            p[n] = 1.1;
            let g = orbit_geometry(&a, &p, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
            assert_eq!(g.weyl.order(), 2, "k={k} n={n}");
            assert!(g.weyl.elements.iter().all(|e| e.is_isometry(1e-10)));
        }
    }

    #[test]
    fn weyl_group_on_section_is_linear() {
        let a = LinearAction::rotation_model(1, 3).unwrap();
        let section = crate::polar::section_at(&a, &v(&[0.4, 0.0, 0.0, 1.3])).unwrap();
        let w = section_weyl_group(&a, &section, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
        assert_eq!(w.order(), 2);
        for e in &w.elements {
            assert!(e.translation.amax() < 1e-10);
        }
        // the reflection fixes the axis and flips the axis distance
        let axis_pt = v(&[0.7, 0.0, 0.0, 0.0]);
        let off = v(&[0.7, 0.0, 0.0, 0.5]);
        let flip = (0..2).find(|&i| w.elements[i].distance(&AffineMap::identity(2)) > 0.5).unwrap();
        assert_abs_diff_eq!(w.apply_ambient(flip, &axis_pt), axis_pt, epsilon = 1e-12);
        assert_abs_diff_eq!(w.apply_ambient(flip, &off), v(&[0.7, 0.0, 0.0, -0.5]), epsilon = 1e-12);
    }

    #[test]
    fn hyperplane_reduction() {
        let a = LinearAction::rotation_model(1, 3).unwrap();
        let p = v(&[0.8, 0.3, -1.1, 0.4]);
        let g = orbit_geometry(&a, &p, DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
        let xi = invariant_hyperplane_reduction(&g.decomp, &g.weyl).unwrap();
        assert_abs_diff_eq!(xi[0].abs(), 1.0, epsilon = 1e-10);

        let s = LinearAction::rotation_group(3);
        let g = orbit_geometry(&s, &v(&[1.0, 0.5, 0.2]), DEFAULT_CLUSTER_TOL, DEFAULT_WEYL_CAP).unwrap();
        assert!(invariant_hyperplane_reduction(&g.decomp, &g.weyl).is_none());
    }

    #[test]
    fn weyl_closure_examples() {
        let frame = Frame::standard(2);
        let plane = |a: &[f64], c: f64, j| FocalHyperplane { normal_covector: v(a), offset: c, principal_index: j };
        let single = FocalSet { frame: frame.clone(), origin: VecN::zeros(2), hyperplanes: vec![plane(&[1.0, 0.0], 1.0, 0)], warnings: vec![] };
        assert_eq!(weyl_group(&single, 16).unwrap().order(), 2);

        // three lines through a point at 60 degrees: dihedral of order 6
        let s3 = 3f64.sqrt() / 2.0;
        let tri = FocalSet {
            frame: frame.clone(),
            origin: VecN::zeros(2),
            hyperplanes: vec![plane(&[1.0, 0.0], 1.0, 0), plane(&[0.5, s3], 1.0, 1), plane(&[-0.5, s3], 0.0, 2)],
            warnings: vec![],
        };
        let w = weyl_group(&tri, 64).unwrap();
        assert_eq!(w.order(), 6);
        assert!(w.permutation_residual(&tri) < 1e-8);

        // two parallel lines generate an infinite group
        let par = FocalSet {
            frame,
            origin: VecN::zeros(2),
            hyperplanes: vec![plane(&[1.0, 0.0], 1.0, 0), plane(&[1.0, 0.0], 2.0, 1)],
            warnings: vec![],
        };
        let err = weyl_group(&par, 50).unwrap_err();
        assert!(err.to_string().starts_with("group enumeration exceeded cap"));
    }

    #[test]
    fn empty_hyperplanes_rejected() {
        let f = FocalSet { frame: Frame::standard(2), origin: VecN::zeros(2), hyperplanes: vec![], warnings: vec![] };
        assert!(matches!(weyl_group(&f, 8), Err(GeomError::EmptyHyperplanes)));
    }

    #[test]
    fn principal_normals_are_parallel_along_orbit() {
        let a = LinearAction::block_rotations(&[1, 2, 3]).unwrap();
        let p = v(&[0.4, 1.0, 0.2, 0.3, -0.6, 0.9]);
        let mut g = rng(5);
        for _ in 0..5 {
            let h = a.random_element(&mut g);
            assert!(transport_residual(&a, &p, &h, DEFAULT_CLUSTER_TOL).unwrap() < 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn block_orbits_decompose(
            r in prop::collection::vec(0.3f64..2.0, 3),
            c in -1.0f64..1.0,
            seed in 0u64..1000,
        ) {
            let a = LinearAction::block_rotations(&[1, 2, 3, 2]).unwrap();
            let mut g = rng(seed);
            let b1 = unit_sphere_point(&mut g, 2) * r[0];
            let b2 = unit_sphere_point(&mut g, 3) * r[1];
            let b3 = unit_sphere_point(&mut g, 2) * r[2];
            let mut p = vec![c];
            p.extend(b1.iter().chain(b2.iter()).chain(b3.iter()));
            let p = v(&p);
            let ff = orbit_second_ff(&a, &p).unwrap();
            prop_assert!(commutation_residual(&ff) < 1e-8);
            let Ok(d) = principal_normals(&ff, DEFAULT_CLUSTER_TOL) else {
                // radii too close to separate reliably
                return Ok(());
            };
            prop_assert!(d.residual < 1e-6);
            prop_assert_eq!(d.dim(), ff.dim());
            for i in 0..d.len() {
                for j in 0..i {
                    prop_assert!(d.spaces[j].complement().containment_residual(&d.spaces[i]) < 1e-8);
                }
            }
            // nonnegative mixed curvature forces it to vanish
            let k = gauss_curvature_table(&d);
            for i in 0..d.len() {
                for j in 0..d.len() {
                    if i != j {
                        prop_assert!(k[(i, j)].abs() < 1e-8);
                    }
                }
            }
            let focal = focal_hyperplanes(&d, ff.normal());
            let w = weyl_group(&focal, DEFAULT_WEYL_CAP).unwrap();
            prop_assert!(w.permutation_residual(&focal) < 1e-8);
            prop_assert!(w.elements.iter().any(|e| e.distance(&AffineMap::identity(focal.frame.rank())) < 1e-12));
            let xi = invariant_hyperplane_reduction(&d, &w);
            prop_assert!(xi.is_some());
        }
    }
}
