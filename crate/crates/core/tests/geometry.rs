mod common;

use common::*;
use mintime::geometry::{contains, euclid_project, recession_cone, support};
use mintime::{ExtReal, Point, SetExpr};
use proptest::prelude::*;
use rand::Rng;

/// A point of `s`: a random point, projected when it falls outside.
fn member(s: &SetExpr, rng: &mut impl Rng) -> Point {
    let x = cube_point(rng, s.dim(), 4.0);
    if contains(s, &x, 1e-9).unwrap() {
        x
    } else {
        euclid_project(s, &x).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_is_a_member_and_satisfies_the_variational_inequality(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = dimension(&mut rng);
        let s = random_convex(&mut rng, d);
        let x = cube_point(&mut rng, d, 5.0);
        let px = euclid_project(&s, &x).unwrap();
        prop_assert!(contains(&s, &px, 1e-8).unwrap());
        for _ in 0..100 {
            let w = member(&s, &mut rng);
            let vi = (&x - &px).dot(&(&w - &px));
            prop_assert!(vi <= 1e-8, "vi = {vi}");
        }
    }

    #[test]
    fn support_is_sublinear(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = dimension(&mut rng);
        let s = random_convex(&mut rng, d);
        let a = cube_point(&mut rng, d, 2.0);
        let b = cube_point(&mut rng, d, 2.0);
        let lam = rng.gen_range(0.0..5.0);
        let (sa, sb) = (support(&s, &a).unwrap(), support(&s, &b).unwrap());
        if let (Some(sa), Some(sb)) = (sa.finite(), sb.finite()) {
            let sab = support(&s, &(&a + &b)).unwrap().to_f64();
            prop_assert!(sab <= sa + sb + 1e-9 * (1.0 + sa.abs() + sb.abs()));
            let sl = support(&s, &a.scaled(lam)).unwrap().to_f64();
            prop_assert!((sl - lam * sa).abs() <= 1e-9 * (1.0 + lam * sa.abs()));
        }
    }

    #[test]
    fn exact_recession_directions_keep_points_inside(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = dimension(&mut rng);
        let s = random_convex(&mut rng, d);
        let cone = recession_cone(&s);
        if !(cone.exactness().is_exact()) {
            return Ok(());
        }
        for _ in 0..100 {
            let w = member(&s, &mut rng);
            let u = cone.sample(&mut rng, 1.0);
            let lam = rng.gen_range(0.0..=10.0);
            prop_assert!(contains(&s, &w.along(lam, &u), 1e-8).unwrap());
        }
    }

    #[test]
    fn boxes_as_polytopes_are_nonempty_and_equal(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = dimension(&mut rng);
        let lo: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..0.0)).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(1e-3..3.0)).collect();
        let b = SetExpr::boxed(lo.clone(), hi.clone()).unwrap();
        let rows = b.rows().unwrap();
        let poly = SetExpr::polytope(rows).unwrap();
        prop_assert!(poly.bounding_box().is_some());
        for _ in 0..50 {
            let x = cube_point(&mut rng, d, 4.0);
            prop_assert_eq!(contains(&b, &x, 1e-9).unwrap(), contains(&poly, &x, 1e-9).unwrap());
        }
    }
}

#[test]
fn support_of_the_example_ball() {
    let s = example_ball();
    let v = support(&s, &p(&[3.0, 4.0])).unwrap();
    assert!((v.to_f64() - 5.0 * 8f64.sqrt()).abs() < 1e-12);
    let h = SetExpr::halfspace([0.0, 1.0], 0.0).unwrap();
    assert_eq!(support(&h, &p(&[1.0, 1.0])).unwrap(), ExtReal::PosInf);
    assert_eq!(support(&h, &p(&[0.0, 2.0])).unwrap(), ExtReal::ZERO);
}
