//! Exact line/set intersection: `{t in R : x + t v in s}` as closed intervals.

use super::catalog::{cusp_line_set, CatalogId};
use super::SetExpr;
use crate::point::{dot, norm};

/// A closed interval `[lo, hi]` with possibly infinite ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ALL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }
}

/// Slopes below this (relative to |v|) count as parallel to a hyperplane.
const PARALLEL_TOL: f64 = 1e-12;

/// Sorted, disjoint closed intervals of `t` with `x + t v` in `s`.
pub fn line_set(s: &SetExpr, x: &[f64], v: &[f64]) -> Vec<Interval> {
    match s {
        SetExpr::Halfspace { .. } | SetExpr::Box { .. } | SetExpr::Polytope { .. } => {
            let rows = s.rows().expect("polyhedral variant");
            rows_line_set(&rows, x, v).into_iter().collect()
        }
        SetExpr::Ball { c, r } => ball_line_set(c.coords(), *r, x, v).into_iter().collect(),
        SetExpr::Union { members } => {
            let parts: Vec<Interval> = members.iter().flat_map(|m| line_set(m, x, v)).collect();
            merge(parts)
        }
        SetExpr::Implicit2D { catalog_id, params } => {
            let p = super::local_coords(x, params);
            catalog_line_set(*catalog_id, &p, v)
        }
    }
}

pub(crate) fn catalog_line_set(id: CatalogId, p: &[f64], v: &[f64]) -> Vec<Interval> {
    match id.pieces() {
        Some(pieces) => merge(
            pieces
                .iter()
                .filter_map(|rows| rows_line_set(rows, p, v))
                .collect(),
        ),
        None => cusp_line_set(p, v),
    }
}

/// Line against `{<a_i, y> <= b_i}` with unit rows.
pub(crate) fn rows_line_set(rows: &[(Vec<f64>, f64)], x: &[f64], v: &[f64]) -> Option<Interval> {
    let vn = norm(v);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (a, b) in rows {
        let alpha = dot(a, v);
        let beta = b - dot(a, x);
        if alpha.abs() <= PARALLEL_TOL * vn {
            if beta < -PARALLEL_TOL {
                return None;
            }
        } else if alpha > 0.0 {
            hi = hi.min(beta / alpha);
        } else {
            lo = lo.max(beta / alpha);
        }
    }
    (lo <= hi).then_some(Interval::new(lo, hi))
}

/// Line against the ball `|y - c| <= r`, with tangency and stable roots.
pub(crate) fn ball_line_set(c: &[f64], r: f64, x: &[f64], v: &[f64]) -> Option<Interval> {
    let w: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
    let a = dot(v, v);
    let b = dot(&w, v);
    let cc = dot(&w, &w) - r * r;
    // disc / a = r^2 - (distance from c to the line)^2; compare relative to r^2.
    let disc = b * b - a * cc;
    let rel = disc / (a * r * r);
    if rel < -1e-12 {
        return None;
    }
    if rel <= 1e-12 {
        let t = -b / a;
        return Some(Interval::new(t, t));
    }
    let sq = disc.sqrt();
    let q = -(b + b.signum() * sq);
    let (t1, t2) = if q == 0.0 {
        let h = sq / a;
        (-h, h)
    } else {
        (q / a, cc / q)
    };
    Some(Interval::new(t1.min(t2), t1.max(t2)))
}

/// Sorts and merges overlapping or touching intervals.
pub(crate) fn merge(mut parts: Vec<Interval>) -> Vec<Interval> {
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::new();
    for iv in parts {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// Interval ends this close below zero still count as reaching `t = 0`.
pub(crate) const T_TOL: f64 = 1e-12;

/// First point of the set along `t >= 0`, or `+inf`.
pub(crate) fn first_nonnegative(ivs: &[Interval]) -> f64 {
    ivs.iter()
        .find(|iv| iv.hi >= -T_TOL)
        .map(|iv| iv.lo.max(0.0))
        .unwrap_or(f64::INFINITY)
}
