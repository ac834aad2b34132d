//! Evaluation of the minimal time function `T_v(x; S)`, its scalarization
//! `phi_v(x; S) = inf{t in R : x + t v in S}`, the projection
//! `x + T(x) v`, directional derivatives and continuity probes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cones::contingent_cone;
use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{first_nonnegative, line_set, SetExpr, EPS, T_TOL};
use crate::lipschitz::{local_condition, Verdict};
use crate::point::Point;
use crate::sampling::random_in_ball;

/// `x + t v` for the attained minimal time `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionResult {
    pub t: ExtReal,
    pub point: Point,
}

pub(crate) fn check_direction(s: &SetExpr, v: &Point) -> Result<()> {
    check_dim(s.dim(), v.dim())?;
    if !v.is_finite() || v.norm() == 0.0 {
        return Err(Error::InvalidDirection);
    }
    Ok(())
}

fn check_inputs(s: &SetExpr, v: &Point, x: &Point) -> Result<()> {
    check_direction(s, v)?;
    check_dim(s.dim(), x.dim())?;
    if !x.is_finite() {
        return Err(Error::InvalidProblem("point must be finite".into()));
    }
    Ok(())
}

/// `T_v(x; S) = inf{t >= 0 : x + t v in S}`, `+inf` when the ray misses `S`.
pub fn min_time(s: &SetExpr, v: &Point, x: &Point) -> Result<ExtReal> {
    check_inputs(s, v, x)?;
    Ok(min_time_unchecked(s, v, x))
}

pub(crate) fn min_time_unchecked(s: &SetExpr, v: &Point, x: &Point) -> ExtReal {
    ExtReal::from_f64(first_nonnegative(&line_set(s, x.coords(), v.coords())))
}

/// `phi_v(x; S) = inf{t in R : x + t v in S}`; `-inf` when unbounded below,
/// `+inf` when the line misses `S`.
pub fn scalarization(s: &SetExpr, v: &Point, x: &Point) -> Result<ExtReal> {
    check_inputs(s, v, x)?;
    let ivs = line_set(s, x.coords(), v.coords());
    Ok(ivs
        .first()
        .map_or(ExtReal::PosInf, |iv| ExtReal::from_f64(iv.lo)))
}

/// The attained point `x + T(x) v`.
pub fn projection_pi(s: &SetExpr, v: &Point, x: &Point) -> Result<ProjectionResult> {
    let t = min_time(s, v, x)?;
    match t {
        ExtReal::Finite(t) => Ok(ProjectionResult {
            t: ExtReal::Finite(t),
            point: x.along(t, v),
        }),
        _ => Err(Error::NotInDomain),
    }
}

/// `x in dom T = S - cone{v}`.
pub fn in_domain(s: &SetExpr, v: &Point, x: &Point) -> Result<bool> {
    Ok(min_time(s, v, x)?.is_finite())
}

/// A directional derivative together with whether it is backed by a local
/// Lipschitz certificate at `x` (which makes it the Dini-Hadamard derivative).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionalDerivative {
    pub value: ExtReal,
    pub certified: bool,
}

/// Directional derivative of `T` at `x` in direction `u`.
///
/// Inside the set this is `T_v(u; K(x))`; outside it is `phi_v(u; K(x~))`
/// at the projection `x~`, where `K` is the contingent cone.
pub fn directional_derivative(
    s: &SetExpr,
    v: &Point,
    x: &Point,
    u: &Point,
) -> Result<DirectionalDerivative> {
    check_inputs(s, v, x)?;
    check_dim(s.dim(), u.dim())?;
    let proj = projection_pi(s, v, x)?;
    let in_set = s.contains_unchecked(x.coords(), EPS);
    let value = if in_set {
        let k = contingent_cone(s, x)?;
        ExtReal::from_f64(first_nonnegative(&k.line_set(u, v)))
    } else {
        let k = contingent_cone(s, &proj.point)?;
        k.line_set(u, v)
            .first()
            .map_or(ExtReal::PosInf, |iv| ExtReal::from_f64(iv.lo))
    };
    let certified = local_condition(s, v, x)? == Verdict::Lipschitz;
    Ok(DirectionalDerivative { value, certified })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuity {
    Continuous,
    Discontinuous,
    Inconclusive,
}

/// Continuity of `T` at `x`.
///
/// Continuous when the open segment just past the projection lies in the
/// interior of the set, or when the sampled oscillation shrinks with the
/// radius. Discontinuous when `x` is the last set point before a gap along
/// the ray (the ray leaves the set at `x` and re-enters later).
pub fn continuity_probe(s: &SetExpr, v: &Point, x: &Point) -> Result<Continuity> {
    check_inputs(s, v, x)?;
    if s.interior_contains(x) {
        return Ok(Continuity::Continuous);
    }
    let ivs = line_set(s, x.coords(), v.coords());
    let t0 = first_nonnegative(&ivs);
    if !t0.is_finite() {
        return Err(Error::NotInDomain);
    }
    for gamma in [1e-3, 1e-2, 1e-1] {
        let inside = (1..=64).all(|k| {
            let t = t0 + gamma * k as f64 / 65.0;
            s.interior_contains(&x.along(t, v))
        });
        if inside {
            return Ok(Continuity::Continuous);
        }
    }
    if s.contains_unchecked(x.coords(), EPS) {
        let pos = ivs.iter().position(|iv| iv.hi >= -T_TOL);
        if let Some(i) = pos {
            let leaves_here = ivs[i].hi.abs() <= T_TOL;
            if leaves_here && i + 1 < ivs.len() {
                return Ok(Continuity::Discontinuous);
            }
        }
    }
    // Sampled oscillation at shrinking radii.
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let mut devs = Vec::new();
    for r in [1e-2, 1e-3, 1e-4] {
        let mut dev: f64 = 0.0;
        for _ in 0..256 {
            let w = random_in_ball(&mut rng, x.dim());
            let y = Point::new(x.coords().iter().zip(&w).map(|(a, b)| a + r * b).collect());
            let ty = first_nonnegative(&line_set(s, y.coords(), v.coords()));
            dev = dev.max((ty - t0).abs());
        }
        devs.push(dev);
    }
    let shrinking = devs.windows(2).all(|w| w[1] <= w[0] * 0.5 + 1e-12);
    if devs.iter().all(|d| d.is_finite()) && shrinking && devs[2] <= 1e-2 {
        return Ok(Continuity::Continuous);
    }
    Ok(Continuity::Inconclusive)
}
