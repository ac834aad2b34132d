//! Brute-force ground truth: minimal time by ray scanning, grid
//! minimization, finite-difference directional derivatives and sampled
//! normal directions. Nothing here uses the cone calculus, and minimal
//! times are found by membership tests alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::ext::{inf_f64, ExtReal};
use crate::geometry::{line_set, local_coords, CatalogId, SetExpr, EPS};
use crate::point::Point;
use crate::sampling::{random_in_ball, random_unit};
use crate::solver::ProblemSpec;

/// Membership of the `delta`-neighbourhood (a superset test: every point
/// within distance `delta` of the set passes).
fn near(s: &SetExpr, y: &[f64], delta: f64) -> bool {
    match s {
        SetExpr::Union { members } => members.iter().any(|m| near(m, y, delta)),
        SetExpr::Implicit2D {
            catalog_id: CatalogId::SqrtCusp,
            params,
        } => {
            let p = local_coords(y, params);
            p[1] + (p[0].abs() + delta).sqrt() >= -delta
        }
        _ => s.contains_unchecked(y, delta),
    }
}

/// Membership at the default tolerance, which also gives lines and other
/// thin sets a band a fine scan cannot step over.
fn inside(s: &SetExpr, y: &[f64]) -> bool {
    s.contains_unchecked(y, EPS)
}

/// First `t` in `[a, b]` (up to `tol`) with `x + t v` in the set, scanning at
/// step `h`. Grid points are screened with the `h |v|`-neighbourhood, which
/// cannot miss an entry; each flagged cell is rescanned ten times finer until
/// consecutive scan points are at most `EPS` apart.
fn scan(s: &SetExpr, x: &[f64], v: &[f64], a: f64, b: f64, h: f64, tol: f64) -> Option<f64> {
    let vn = crate::point::norm(v);
    let at = |t: f64| -> Vec<f64> { x.iter().zip(v).map(|(xi, vi)| xi + t * vi).collect() };
    let finest = h <= 10.0 * tol && h * vn <= EPS;
    let n = ((b - a) / h).ceil() as usize;
    let mut prev = a;
    for k in 1..=n {
        let t = (a + k as f64 * h).min(b);
        let y = at(t);
        if finest {
            if inside(s, &y) {
                // Bisect between prev (outside) and t (inside).
                let (mut lo, mut hi) = (prev, t);
                while hi - lo > tol {
                    let mid = 0.5 * (lo + hi);
                    if inside(s, &at(mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Some(hi);
            }
        } else if near(s, &y, h * vn) {
            if let Some(t0) = scan(s, x, v, prev, t, h / 10.0, tol) {
                return Some(t0);
            }
        }
        prev = t;
    }
    None
}

/// `inf{t >= 0 : x + t v in S}` by scanning `[0, t_max]` and bisecting to `tol`.
pub fn oracle_min_time(s: &SetExpr, v: &Point, x: &Point, t_max: f64, tol: f64) -> Result<ExtReal> {
    check_dim(s.dim(), v.dim())?;
    check_dim(s.dim(), x.dim())?;
    if !(t_max > 0.0 && tol > 0.0) {
        return Err(Error::Precondition("t_max and tol must be positive".into()));
    }
    if inside(s, x.coords()) {
        return Ok(ExtReal::ZERO);
    }
    let h0 = (t_max / 1000.0).max(10.0 * tol);
    Ok(scan(s, x.coords(), v.coords(), 0.0, t_max, h0, tol)
        .map_or(ExtReal::PosInf, ExtReal::Finite))
}

fn oracle_t(s: &SetExpr, v: &Point, x: &Point) -> f64 {
    oracle_min_time(s, v, x, 1e3, 1e-9)
        .expect("validated inputs")
        .to_f64()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells_per_axis: usize,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells_per_axis: usize) -> Result<Self> {
        let g = GridSpec {
            lo,
            hi,
            cells_per_axis,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidProblem(m.into()));
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return bad("grid bounds must have the same positive length");
        }
        if !self.lo.iter().zip(&self.hi).all(|(a, b)| a.is_finite() && b.is_finite() && a < b) {
            return bad("grid needs finite lo < hi componentwise");
        }
        if self.cells_per_axis < 2 {
            return bad("cells_per_axis must be at least 2");
        }
        let cells = (self.cells_per_axis as f64).powi(self.lo.len() as i32);
        if cells > 1e7 {
            return bad("grid exceeds 10^7 cells");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridResult {
    pub grid: GridSpec,
    /// Best node in index order; absent when no node is feasible.
    pub best: Option<Point>,
    #[serde(serialize_with = "inf_f64::serialize")]
    pub value: f64,
    pub feasible_nodes: usize,
}

/// Exhaustive minimization of the objective over the grid nodes inside the
/// constraint set. The first minimal node in index order wins.
pub fn oracle_grid_min(p: &ProblemSpec, g: &GridSpec) -> Result<GridResult> {
    g.validate()?;
    let d = p.dimension;
    check_dim(d, g.lo.len())?;
    let n = g.cells_per_axis;
    let mut idx = vec![0usize; d];
    let mut best: Option<Point> = None;
    let mut value = f64::INFINITY;
    let mut feasible = 0;
    loop {
        let q: Vec<f64> = (0..d)
            .map(|i| g.lo[i] + (g.hi[i] - g.lo[i]) * idx[i] as f64 / n as f64)
            .collect();
        if p.constraint.contains_unchecked(&q, 1e-12) {
            feasible += 1;
            let x = Point::new(q);
            let f = p
                .targets
                .iter()
                .map(|t| crate::mintime::min_time_unchecked(&t.set, &t.direction, &x).to_f64());
            let f = match p.objective {
                crate::solver::Objective::Sum => f.sum(),
                crate::solver::Objective::Max => f.fold(f64::NEG_INFINITY, f64::max),
            };
            if f < value {
                value = f;
                best = Some(x);
            }
        }
        let mut i = 0;
        while i < d {
            idx[i] += 1;
            if idx[i] <= n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    Ok(GridResult {
        grid: g.clone(),
        best,
        value,
        feasible_nodes: feasible,
    })
}

/// Finite-difference estimate of the Dini-Hadamard derivative: the minimum
/// of `[T(x + t u') - T(x)] / t` over `t in {1e-3, ..., 1e-6}` and `u'`
/// equal to `u` or one of 8 seeded perturbations with `|u' - u| = t^2`.
/// `+inf` when any probe is infinite.
pub fn fd_directional(s: &SetExpr, v: &Point, x: &Point, u: &Point) -> Result<ExtReal> {
    check_dim(s.dim(), v.dim())?;
    check_dim(s.dim(), x.dim())?;
    check_dim(s.dim(), u.dim())?;
    let tx = crate::mintime::min_time(s, v, x)?;
    let ExtReal::Finite(tx) = tx else {
        return Err(Error::NotInDomain);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xfd);
    let dirs: Vec<Point> = (0..8).map(|_| Point::new(random_unit(&mut rng, s.dim()))).collect();
    let mut best = f64::INFINITY;
    for t in [1e-3, 1e-4, 1e-5, 1e-6] {
        let probes = std::iter::once(u.clone()).chain(dirs.iter().map(|w| u.along(t * t, w)));
        for up in probes {
            let ty = crate::mintime::min_time(s, v, &x.along(t, &up))?;
            let ExtReal::Finite(ty) = ty else {
                return Ok(ExtReal::PosInf);
            };
            best = best.min((ty - tx) / t);
        }
    }
    Ok(ExtReal::Finite(best))
}

/// Unit vectors `(y - x) / |y - x|` for set points `y` within `rho` of `x`:
/// the ends and a random interior point of each piece of the set along
/// random chords of the ball. Chords meet lines and other thin sets, which
/// rejection sampling in the ball would never hit.
fn chord_samples(s: &SetExpr, x: &Point, rho: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let d = s.dim();
    let mut out = Vec::new();
    for _ in 0..400 {
        let z: Vec<f64> = x
            .coords()
            .iter()
            .zip(random_in_ball(rng, d))
            .map(|(a, w)| a + rho * w)
            .collect();
        let u = random_unit(rng, d);
        let zx: Vec<f64> = z.iter().zip(x.coords()).map(|(a, b)| a - b).collect();
        let b = crate::point::dot(&zx, &u);
        let disc = b * b - (crate::point::dot(&zx, &zx) - rho * rho);
        let (lo, hi) = (-b - disc.max(0.0).sqrt(), -b + disc.max(0.0).sqrt());
        for iv in line_set(s, &z, &u) {
            let (a, c) = (iv.lo.max(lo), iv.hi.min(hi));
            if a > c {
                continue;
            }
            let mid = a + rng.gen::<f64>() * (c - a);
            for t in [a, mid, c] {
                let diff: Vec<f64> = zx.iter().zip(&u).map(|(p, q)| p + t * q).collect();
                let n = crate::point::norm(&diff);
                if n > 1e-9 * rho {
                    out.push(diff.into_iter().map(|c| c / n).collect());
                }
            }
        }
    }
    out
}

/// Unit directions `w` accepted as approximate Frechet normals at `x`:
/// over set points `y` near `x` at radii `1e-2` and `1e-3`, the largest
/// `<w, y - x> / |y - x|` is at most `1e-2` and its positive part does not
/// grow as the radius shrinks (up to sampling noise).
pub fn sampled_normal_cone(s: &SetExpr, x: &Point, n: usize, seed: u64) -> Result<Vec<Point>> {
    check_dim(s.dim(), x.dim())?;
    if !near(s, x.coords(), 1e-6) || s.interior_contains(x) {
        return Err(Error::Precondition("point must lie within 1e-6 of the boundary".into()));
    }
    let d = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clouds: Vec<Vec<Vec<f64>>> = [1e-2, 1e-3]
        .iter()
        .map(|&rho| chord_samples(s, x, rho, &mut rng))
        .collect();
    // Largest ratio over a cloud, or `None` as soon as one exceeds 1e-2.
    let score = |w: &[f64], ys: &[Vec<f64>]| -> Option<f64> {
        let mut m = f64::NEG_INFINITY;
        for y in ys {
            m = m.max(crate::point::dot(w, y));
            if m > 1e-2 {
                return None;
            }
        }
        Some(m)
    };
    let mut out = Vec::new();
    for _ in 0..200_000 {
        if out.len() >= n {
            break;
        }
        let w = random_unit(&mut rng, d);
        let Some(big) = score(&w, &clouds[0]) else { continue };
        let Some(small) = score(&w, &clouds[1]) else { continue };
        if small <= big.max(0.0) + 5e-3 {
            out.push(Point::new(w));
        }
    }
    Ok(out)
}

/// Largest `|exact - oracle|` minimal-time gap over the given points.
pub fn max_min_time_gap(s: &SetExpr, v: &Point, xs: &[Point]) -> Result<f64> {
    let mut gap: f64 = 0.0;
    for x in xs {
        let exact = crate::mintime::min_time(s, v, x)?.to_f64();
        let brute = oracle_t(s, v, x);
        let g = if exact.is_infinite() && brute.is_infinite() {
            0.0
        } else {
            (exact - brute).abs()
        };
        gap = gap.max(g);
    }
    Ok(gap)
}
