//! Lipschitz certificates for `T`: the global constant from the recession
//! cone, the local normal-cone test, epi-Lipschitz and property-P checks.
//! Every verdict is three-valued; sampled evidence is reported separately.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cones::{limiting_normal_cone, ConeFamily};
use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{
    first_nonnegative, line_set, recession_cone, recession_contains_exact, SetExpr, EPS,
};
use crate::mintime::{check_direction, min_time_unchecked};
use crate::point::Point;
use crate::subdiff::{Constraint, DualSlice, SliceExactness};
use crate::sampling::{random_in_ball, random_unit};

/// `<g, v>` must be below this for a normal direction to count as strictly
/// opposed to `v`.
const STRICT: f64 = 1e-12;
const RADII: [f64; 3] = [1e-1, 1e-2, 1e-3];
const PAIRS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Lipschitz,
    NotLipschitz,
    Inconclusive,
}

/// Outcome of a yes/no geometric check that may lack a proof either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub verdict: Verdict,
    /// Global constant; absent for local reports.
    pub constant: Option<ExtReal>,
    /// Local modulus bound `1 / min(-<g, v>)` over unit normal generators,
    /// present when the local test certifies.
    pub local_modulus: Option<f64>,
    pub evidence: String,
    /// Largest sampled `|T(x) - T(y)| / |x - y|` over pairs with finite values.
    pub empirical_ratio: f64,
    /// Sampled pairs skipped because one value was infinite.
    pub infinite_pairs: usize,
    /// `{v}^perp n N` at `x` or its projection; local reports only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perp_normals: Option<DualSlice>,
    pub seed: u64,
}

/// Global Lipschitz continuity: `T` is finite and Lipschitz iff `v` lies in
/// the interior of the recession cone, with constant `1 / dist(v, bd S_inf)`.
pub fn global_lipschitz(s: &SetExpr, v: &Point, seed: u64) -> Result<LipschitzReport> {
    check_direction(s, v)?;
    let k = recession_cone(s);
    let (verdict, constant, evidence) = if k.is_whole() {
        (
            Verdict::Lipschitz,
            Some(ExtReal::ZERO),
            "recession cone is the whole space; T is identically zero",
        )
    } else if k.interior_contains(v, STRICT) {
        let dist = k.boundary_distance(v);
        (
            Verdict::Lipschitz,
            Some(ExtReal::Finite(1.0 / dist)),
            "v interior to the recession cone; constant 1/dist(v, boundary)",
        )
    } else if k.exactness().is_exact() {
        (
            Verdict::NotLipschitz,
            Some(ExtReal::PosInf),
            "v not interior to the exact recession cone",
        )
    } else {
        (
            Verdict::Inconclusive,
            None,
            "interior test failed on an inner approximation of the recession cone",
        )
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = s.dim();
    let mut ratio: f64 = 0.0;
    let mut infinite = 0;
    let per = PAIRS / RADII.len();
    for r in RADII {
        for _ in 0..per {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..=10.0)).collect();
            let w = random_in_ball(&mut rng, d);
            let y: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a + r * b).collect();
            match pair_ratio(s, v, &x, &y) {
                Some(q) => ratio = ratio.max(q),
                None => infinite += 1,
            }
        }
    }
    Ok(LipschitzReport {
        verdict,
        constant,
        local_modulus: None,
        evidence: evidence.into(),
        empirical_ratio: ratio,
        infinite_pairs: infinite,
        perp_normals: None,
        seed,
    })
}

fn pair_ratio(s: &SetExpr, v: &Point, x: &[f64], y: &[f64]) -> Option<f64> {
    let tx = first_nonnegative(&line_set(s, x, v.coords()));
    let ty = first_nonnegative(&line_set(s, y, v.coords()));
    if !tx.is_finite() || !ty.is_finite() {
        return None;
    }
    let dist = crate::point::norm(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>());
    (dist > 0.0).then(|| (tx - ty).abs() / dist)
}

/// Largest sampled difference quotient of `T` over `pairs` pairs drawn from
/// the ball of radius `r` around `x`, with the count of skipped pairs.
pub fn empirical_ratio(
    s: &SetExpr,
    v: &Point,
    x: &Point,
    r: f64,
    pairs: usize,
    seed: u64,
) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = x.dim();
    let mut ratio: f64 = 0.0;
    let mut infinite = 0;
    for _ in 0..pairs {
        let a: Vec<f64> = x.coords().iter().zip(random_in_ball(&mut rng, d)).map(|(c, w)| c + r * w).collect();
        let b: Vec<f64> = x.coords().iter().zip(random_in_ball(&mut rng, d)).map(|(c, w)| c + r * w).collect();
        match pair_ratio(s, v, &a, &b) {
            Some(q) => ratio = ratio.max(q),
            None => infinite += 1,
        }
    }
    (ratio, infinite)
}

struct ConeTest {
    holds: bool,
    modulus: f64,
    exact: bool,
}

/// `{v}^+ n C = {0}`, checked on the canonical generators of every part.
fn strict_opposition(c: &ConeFamily, v: &Point) -> ConeTest {
    let mut holds = true;
    let mut min_slope = f64::INFINITY;
    for part in c.parts() {
        if !part.lineality().is_empty() {
            holds = false;
        }
        for g in part.generators() {
            let slope = -g.dot(v) / g.norm();
            if slope <= STRICT {
                holds = false;
            }
            min_slope = min_slope.min(slope);
        }
    }
    ConeTest {
        holds,
        modulus: if min_slope.is_finite() { 1.0 / min_slope } else { 0.0 },
        exact: c.exactness().is_exact(),
    }
}

/// The normal-cone part of the local test, without sampling.
pub(crate) fn local_condition(s: &SetExpr, v: &Point, x: &Point) -> Result<Verdict> {
    Ok(local_verdict(s, v, x)?.0)
}

type LocalVerdict = (Verdict, Option<f64>, &'static str, ConeFamily);

fn local_verdict(s: &SetExpr, v: &Point, x: &Point) -> Result<LocalVerdict> {
    check_direction(s, v)?;
    check_dim(s.dim(), x.dim())?;
    let in_set = s.contains_unchecked(x.coords(), EPS);
    let base = if in_set {
        x.clone()
    } else {
        let t = min_time_unchecked(s, v, x);
        match t {
            ExtReal::Finite(t) => x.along(t, v),
            _ => return Err(Error::NotInDomain),
        }
    };
    let c = limiting_normal_cone(s, &base)?;
    let test = strict_opposition(&c, v);
    let (verdict, modulus, tag) = if test.holds && test.exact {
        let tag = if in_set {
            "{v}^+ n N(x) = {0} at a set point"
        } else {
            "{v}^+ n N(projection) = {0}"
        };
        (Verdict::Lipschitz, Some(test.modulus), tag)
    } else if test.holds {
        (Verdict::Inconclusive, None, "opposition test passed on an inner approximation of N")
    } else if test.exact && in_set {
        (Verdict::NotLipschitz, None, "nonzero normal with <x*, v> >= 0 at a set point")
    } else if test.exact && recession_contains_exact(s, v) {
        (
            Verdict::NotLipschitz,
            None,
            "nonzero normal with <x*, v> >= 0 at the projection and v in the recession cone",
        )
    } else {
        (Verdict::Inconclusive, None, "normal-cone test failed without a converse")
    };
    Ok((verdict, modulus, tag, c))
}

/// Local Lipschitz continuity of `T` around `x` from the limiting normal cone
/// at `x` (or at its projection), plus sampled difference quotients.
pub fn local_lipschitz(s: &SetExpr, v: &Point, x: &Point, seed: u64) -> Result<LipschitzReport> {
    let (verdict, local_modulus, evidence, normals) = local_verdict(s, v, x)?;
    let perp = DualSlice::new(normals, v.clone(), Constraint::VPerp, SliceExactness::Exact);
    let mut ratio: f64 = 0.0;
    let mut infinite = 0;
    for (i, r) in RADII.iter().enumerate() {
        let (q, n) = empirical_ratio(s, v, x, *r, PAIRS / RADII.len(), seed.wrapping_add(i as u64));
        ratio = ratio.max(q);
        infinite += n;
    }
    Ok(LipschitzReport {
        verdict,
        constant: None,
        local_modulus,
        evidence: evidence.into(),
        empirical_ratio: ratio,
        infinite_pairs: infinite,
        perp_normals: Some(perp),
        seed,
    })
}

/// Whether the set is epi-Lipschitz at `x` in direction `v`: some
/// neighbourhood satisfies `w + l u in S` for `w` in `S`, `u` near `v` and
/// small `l > 0`.
///
/// Polyhedral variants and balls use the active-constraint test. Other sets
/// use the equivalent strict opposition of the limiting normal cone when it
/// is exact; otherwise a sampled check can only confirm.
pub fn epi_lipschitz(s: &SetExpr, x: &Point, v: &Point) -> Result<Check> {
    check_direction(s, v)?;
    check_dim(s.dim(), x.dim())?;
    if !s.contains_unchecked(x.coords(), EPS) {
        return Err(Error::PointNotInSet);
    }
    if let Some(rows) = s.rows() {
        let ok = rows
            .iter()
            .filter(|(a, b)| (crate::point::dot(a, x.coords()) - b).abs() <= EPS)
            .all(|(a, _)| crate::point::dot(a, v.coords()) < -STRICT);
        return Ok(if ok { Check::Holds } else { Check::Fails });
    }
    if let SetExpr::Ball { c, .. } = s {
        let ok = s.interior_contains(x) || (x - c).dot(v) < 0.0;
        return Ok(if ok { Check::Holds } else { Check::Fails });
    }
    let cone = limiting_normal_cone(s, x)?;
    let test = strict_opposition(&cone, v);
    if test.exact {
        return Ok(if test.holds { Check::Holds } else { Check::Fails });
    }
    if !test.holds {
        return Ok(Check::Fails);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xe915);
    let d = s.dim();
    for delta in [1e-2, 1e-3] {
        let mut ok = true;
        'outer: for _ in 0..400 {
            let z: Vec<f64> = x.coords().iter().zip(random_in_ball(&mut rng, d)).map(|(a, w)| a + delta * w).collect();
            if !s.contains_unchecked(&z, 0.0) {
                continue;
            }
            let u: Vec<f64> = v.coords().iter().zip(random_in_ball(&mut rng, d)).map(|(a, w)| a + delta * w).collect();
            for k in 1..=8 {
                let lambda = delta * k as f64 / 8.0;
                let y: Vec<f64> = z.iter().zip(&u).map(|(a, b)| a + lambda * b).collect();
                if !s.contains_unchecked(&y, 1e-12) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            return Ok(Check::Holds);
        }
    }
    Ok(Check::Inconclusive)
}

/// Property P near `xt`: for boundary points `x` within `1e-2` of `xt`,
/// `x - t v` leaves the set for every `t` in `(0, r]`.
///
/// Boundary points are the interval ends of the set along random lines
/// through nearby points; `t` runs over a logarithmic grid.
pub fn property_p_check(s: &SetExpr, v: &Point, xt: &Point, r: f64) -> Result<Check> {
    check_direction(s, v)?;
    check_dim(s.dim(), xt.dim())?;
    if !(r > 0.0) {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    let d = s.dim();
    let radius = 1e-2;
    let grid: Vec<f64> = (0..=24).map(|k| r * 10f64.powf(-(k as f64) / 4.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0b);
    let mut tested = 0;
    for i in 0..400 {
        let z: Vec<f64> = xt.coords().iter().zip(random_in_ball(&mut rng, d)).map(|(a, w)| a + radius * w).collect();
        // Alternate random lines with lines along v, which reach faces
        // transversal to v.
        let dir = if i % 2 == 0 {
            random_unit(&mut rng, d)
        } else {
            v.coords().to_vec()
        };
        for iv in line_set(s, &z, &dir) {
            for t in [iv.lo, iv.hi] {
                if !t.is_finite() {
                    continue;
                }
                let b: Vec<f64> = z.iter().zip(&dir).map(|(a, w)| a + t * w).collect();
                let off: f64 = b.iter().zip(xt.coords()).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
                if off > radius || s.interior_contains(&Point::from(b.as_slice())) {
                    continue;
                }
                tested += 1;
                for &tau in &grid {
                    let y: Vec<f64> = b.iter().zip(v.coords()).map(|(a, w)| a - tau * w).collect();
                    if s.contains_unchecked(&y, 1e-12) {
                        return Ok(Check::Fails);
                    }
                }
            }
        }
    }
    Ok(if tested > 0 { Check::Holds } else { Check::Inconclusive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CatalogId;
    use approx::assert_abs_diff_eq;

    fn p(v: &[f64]) -> Point {
        Point::from(v)
    }

    #[test]
    fn global_examples() {
        let cone = SetExpr::implicit(CatalogId::Cone);
        let rep = global_lipschitz(&cone, &p(&[0.0, 1.0]), 7).unwrap();
        assert_eq!(rep.verdict, Verdict::Lipschitz);
        assert_abs_diff_eq!(rep.constant.unwrap().finite().unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        assert!(rep.empirical_ratio <= 2f64.sqrt() + 1e-6);
        assert!(rep.empirical_ratio > 1.0);

        let ball = SetExpr::ball([0.0, 0.0], 1.0).unwrap();
        let rep = global_lipschitz(&ball, &p(&[1.0, 0.0]), 7).unwrap();
        assert_eq!(rep.verdict, Verdict::NotLipschitz);

        let h = SetExpr::halfspace([0.0, 2.0], 1.0).unwrap();
        let rep = global_lipschitz(&h, &p(&[1.0, -0.5]), 7).unwrap();
        assert_eq!(rep.verdict, Verdict::Lipschitz);
        assert_abs_diff_eq!(rep.constant.unwrap().finite().unwrap(), 2.0, epsilon = 1e-12);
        assert!(rep.empirical_ratio <= 2.0 + 1e-6);
    }

    #[test]
    fn local_examples() {
        let v = p(&[0.0, 1.0]);
        let abs = SetExpr::implicit(CatalogId::AbsCone);
        let rep = local_lipschitz(&abs, &v, &p(&[0.0, 0.0]), 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Lipschitz);

        let cusp = SetExpr::implicit(CatalogId::SqrtCusp);
        let rep = local_lipschitz(&cusp, &v, &p(&[0.0, 0.0]), 1).unwrap();
        assert_eq!(rep.verdict, Verdict::NotLipschitz);

        let cross = SetExpr::implicit(CatalogId::AxisCross);
        let rep = local_lipschitz(&cross, &v, &p(&[0.0, -2.0]), 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert_abs_diff_eq!(rep.empirical_ratio, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn epi_lipschitz_examples() {
        let sq = SetExpr::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let corner = p(&[1.0, 1.0]);
        assert_eq!(epi_lipschitz(&sq, &corner, &p(&[-1.0, -1.0])).unwrap(), Check::Holds);
        assert_eq!(epi_lipschitz(&sq, &corner, &p(&[0.0, -1.0])).unwrap(), Check::Fails);
        assert_eq!(epi_lipschitz(&sq, &p(&[0.0, 0.0]), &p(&[5.0, 1.0])).unwrap(), Check::Holds);
        assert_eq!(
            epi_lipschitz(&sq, &p(&[3.0, 0.0]), &p(&[1.0, 0.0])),
            Err(Error::PointNotInSet)
        );
    }

    #[test]
    fn property_p_examples() {
        let upper = SetExpr::halfspace([0.0, -1.0], 0.0).unwrap();
        let v = p(&[0.0, 1.0]);
        assert_eq!(property_p_check(&upper, &v, &p(&[0.0, 0.0]), 1.0).unwrap(), Check::Holds);
        let cone = SetExpr::implicit(CatalogId::Cone);
        assert_eq!(property_p_check(&cone, &v, &p(&[0.0, 0.0]), 1.0).unwrap(), Check::Holds);
        let sq = SetExpr::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(
            property_p_check(&sq, &p(&[1.0, 0.0]), &p(&[1.0, 0.0]), 3.0).unwrap(),
            Check::Fails
        );
    }
}
