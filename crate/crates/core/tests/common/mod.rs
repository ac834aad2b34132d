//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use mintime::solver::{Objective, ProblemSpec, Target};
use mintime::{CatalogId, Point, SetExpr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p(v: &[f64]) -> Point {
    Point::from(v)
}

pub fn unit(rng: &mut impl Rng, d: usize) -> Point {
    loop {
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-2 && n <= 1.0 {
            return Point::new(w.into_iter().map(|x| x / n).collect());
        }
    }
}

pub fn cube_point(rng: &mut impl Rng, d: usize, r: f64) -> Point {
    Point::new((0..d).map(|_| rng.gen_range(-r..=r)).collect())
}

/// A direction with random length in `[0.5, 2]`.
pub fn direction(rng: &mut impl Rng, d: usize) -> Point {
    unit(rng, d).scaled(rng.gen_range(0.5..=2.0))
}

pub fn dimension(rng: &mut impl Rng) -> usize {
    rng.gen_range(2..=4)
}

/// Polytope `{<a_i, x> <= b_i}` with unit rows and the origin inside.
pub fn random_polytope(rng: &mut impl Rng, d: usize, rows: usize) -> SetExpr {
    let rows = (0..rows)
        .map(|_| (unit(rng, d).into_vec(), rng.gen_range(0.3..=2.5)))
        .collect();
    SetExpr::polytope(rows).unwrap()
}

/// One of the convex variants, with some unbounded boxes and polytopes.
pub fn random_convex(rng: &mut impl Rng, d: usize) -> SetExpr {
    let c = cube_point(rng, d, 1.5);
    match rng.gen_range(0..5) {
        0 => SetExpr::halfspace(unit(rng, d), rng.gen_range(-1.0..=1.0)).unwrap(),
        1 => SetExpr::ball(c, rng.gen_range(0.3..=2.0)).unwrap(),
        2 => {
            let mut lo = Vec::with_capacity(d);
            let mut hi = Vec::with_capacity(d);
            for ci in c.coords() {
                let w = rng.gen_range(0.2..=1.5);
                lo.push(if rng.gen_bool(0.15) { f64::NEG_INFINITY } else { ci - w });
                hi.push(if rng.gen_bool(0.15) { f64::INFINITY } else { ci + w });
            }
            SetExpr::boxed(lo, hi).unwrap()
        }
        3 => {
            let m = d + 1 + rng.gen_range(0..4);
            random_polytope(rng, d, m)
        }
        _ => {
            let m = rng.gen_range(1..=d);
            random_polytope(rng, d, m)
        }
    }
}

/// A polyhedron whose recession cone contains `v`: every row satisfies
/// `<a_i, v> <= 0`.
pub fn random_receding_polyhedron(rng: &mut impl Rng, v: &Point) -> SetExpr {
    let d = v.dim();
    let m = rng.gen_range(1..=d + 3);
    let vv = v.norm_sq();
    let rows = (0..m)
        .map(|_| {
            let a = unit(rng, d);
            let s = a.dot(v);
            let a = if s > 0.0 { a.along(-2.0 * s / vv, v) } else { a };
            (a.into_vec(), rng.gen_range(-1.0..=2.0))
        })
        .collect();
    SetExpr::polytope(rows).unwrap()
}

pub fn catalog(id: CatalogId) -> SetExpr {
    SetExpr::implicit(id)
}

/// Ball centred at the origin with radius sqrt(8).
pub fn example_ball() -> SetExpr {
    SetExpr::ball([0.0, 0.0], 8f64.sqrt()).unwrap()
}

/// Two unit balls at (4,0) and (0,4), directions e1 and e2, inside [-5,5]^2.
pub fn two_ball(objective: Objective) -> ProblemSpec {
    ProblemSpec::new(
        SetExpr::boxed(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap(),
        vec![
            Target {
                set: SetExpr::ball([4.0, 0.0], 1.0).unwrap(),
                direction: p(&[1.0, 0.0]),
            },
            Target {
                set: SetExpr::ball([0.0, 4.0], 1.0).unwrap(),
                direction: p(&[0.0, 1.0]),
            },
        ],
        objective,
    )
    .unwrap()
}
