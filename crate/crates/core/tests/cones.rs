mod common;

use common::*;
use mintime::cones::{
    contingent_cone, dini_normal_cone, frechet_normal_cone, limiting_normal_cone, normal_cone_convex,
};
use mintime::geometry::euclid_project;
use mintime::oracle::sampled_normal_cone;
use mintime::{CatalogId, GeneratedCone, Point, SetExpr};
use proptest::prelude::*;

/// Catalog entries at their junction points and at a few smooth or edge
/// points, plus junctions of planar polyhedral unions.
fn catalog_points() -> Vec<(SetExpr, Point)> {
    let mut out = Vec::new();
    for id in CatalogId::ALL {
        out.push((catalog(id), p(&[0.0, 0.0])));
    }
    let extra: [(CatalogId, [f64; 2]); 8] = [
        (CatalogId::AbsCone, [1.0, -1.0]),
        (CatalogId::AbsCone, [-2.0, -2.0]),
        (CatalogId::SqrtCusp, [1.0, -1.0]),
        (CatalogId::SqrtCusp, [-4.0, -2.0]),
        (CatalogId::AxisCross, [0.0, 1.5]),
        (CatalogId::AxisCross, [-2.0, 0.0]),
        (CatalogId::Cone, [1.0, 1.0]),
        (CatalogId::XAxis, [3.0, 0.0]),
    ];
    for (id, x) in extra {
        out.push((catalog(id), p(&x)));
    }
    let corner_boxes = SetExpr::union(vec![
        SetExpr::boxed(vec![-1.0, -1.0], vec![0.0, 0.0]).unwrap(),
        SetExpr::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
    ])
    .unwrap();
    out.push((corner_boxes.clone(), p(&[0.0, 0.0])));
    out.push((corner_boxes, p(&[-0.5, 0.0])));
    let l_shape = SetExpr::union(vec![
        SetExpr::boxed(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap(),
        SetExpr::boxed(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap(),
    ])
    .unwrap();
    out.push((l_shape.clone(), p(&[1.0, 1.0])));
    out.push((l_shape, p(&[2.0, 1.0])));
    out
}

/// A boundary point of a random convex set (the projection of an outside point).
fn convex_boundary_instance(seed: u64) -> Option<(SetExpr, Point)> {
    let mut rng = rng(seed);
    let d = dimension(&mut rng);
    let s = random_convex(&mut rng, d);
    let x = cube_point(&mut rng, d, 5.0);
    if mintime::geometry::contains(&s, &x, 1e-9).unwrap() {
        return None;
    }
    Some((s.clone(), euclid_project(&s, &x).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn convex_cones_coincide(seed in any::<u64>()) {
        let Some((s, x)) = convex_boundary_instance(seed) else { return Ok(()) };
        let n = normal_cone_convex(&s, &x).unwrap();
        prop_assert!(n.approx_eq(&dini_normal_cone(&s, &x).unwrap(), 1e-9));
        prop_assert!(n.approx_eq(&frechet_normal_cone(&s, &x).unwrap(), 1e-9));
        let lim = limiting_normal_cone(&s, &x).unwrap();
        prop_assert_eq!(lim.parts().len(), 1);
        prop_assert!(n.approx_eq(&lim.parts()[0], 1e-9));
    }

    #[test]
    fn dini_normals_are_polar_to_contingent_directions_on_convex_sets(seed in any::<u64>()) {
        let Some((s, x)) = convex_boundary_instance(seed) else { return Ok(()) };
        let mut r = rng(seed ^ 0x5a5a);
        assert_polar(&s, &x, &mut r);
    }
}

fn assert_polar(s: &SetExpr, x: &Point, rng: &mut rand_chacha::ChaCha8Rng) {
    use rand::Rng;
    let k = contingent_cone(s, x).unwrap();
    let n = dini_normal_cone(s, x).unwrap();
    for _ in 0..500 {
        let xs = n.sample(rng, 1.0);
        let part = &k.parts()[rng.gen_range(0..k.parts().len())];
        let d = part.sample(rng, 1.0);
        assert!(xs.dot(&d) <= 1e-9, "{s:?} at {x:?}: <{xs:?}, {d:?}> > 0");
    }
}

#[test]
fn dini_normals_are_polar_to_contingent_directions_at_catalog_points() {
    let mut r = rng(11);
    for (s, x) in catalog_points() {
        assert_polar(&s, &x, &mut r);
    }
}

#[test]
fn frechet_normals_are_limiting_normals() {
    for (s, x) in catalog_points() {
        let f = frechet_normal_cone(&s, &x).unwrap();
        let lim = limiting_normal_cone(&s, &x).unwrap();
        for g in f.spanning_directions() {
            assert!(lim.contains(&g, 1e-9), "{s:?} at {x:?}: {g:?} not limiting");
        }
    }
}

fn unit_distance_to_cone(w: &Point, c: &GeneratedCone) -> f64 {
    // Rows of the H-representation are unit normals; the largest violation
    // bounds the distance from below and equals it in the plane.
    c.hrep().iter().map(|a| p(a).dot(w)).fold(0.0, f64::max)
}

#[test]
fn sampled_normals_match_exact_frechet_cones() {
    for (k, (s, x)) in catalog_points().into_iter().enumerate() {
        let exact = frechet_normal_cone(&s, &x).unwrap();
        let cloud = sampled_normal_cone(&s, &x, 400, k as u64).unwrap();
        let tol = 2f64.to_radians();
        for w in &cloud {
            let dist = unit_distance_to_cone(w, &exact);
            assert!(dist <= 1e-2 + 1e-9, "{s:?} at {x:?}: sampled {w:?} is {dist} away");
            assert!(dist <= tol);
        }
        for g in exact.spanning_directions() {
            let g = g.normalized().unwrap();
            let near = cloud.iter().map(|w| w.distance(&g)).fold(f64::INFINITY, f64::min);
            assert!(near <= 1e-2, "{s:?} at {x:?}: generator {g:?} unsampled ({near})");
        }
        if exact.is_zero() {
            assert!(cloud.is_empty(), "{s:?} at {x:?}: {} sampled normals", cloud.len());
        }
    }
}
