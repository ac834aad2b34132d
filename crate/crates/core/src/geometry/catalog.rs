//! Curated planar sets given by membership predicates.
//!
//! Each entry ships its own recession cone and, for the polyhedral ones, the
//! list of convex pieces whose union is the set. Those pieces double as the
//! stratification used for limiting normal cones.

use serde::{Deserialize, Serialize};

use super::cone::GeneratedCone;
use super::ray::Interval;
use crate::point::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogId {
    /// `{y >= -|x|}`
    AbsCone,
    /// `{y >= -sqrt(|x|)}`
    SqrtCusp,
    /// `{y = 0} U {x = 0, y >= 0}`
    AxisCross,
    /// `{y >= |x|}`
    Cone,
    /// `{y = 0}`
    XAxis,
}

impl CatalogId {
    pub const ALL: [CatalogId; 5] = [
        CatalogId::AbsCone,
        CatalogId::SqrtCusp,
        CatalogId::AxisCross,
        CatalogId::Cone,
        CatalogId::XAxis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogId::AbsCone => "abs-cone",
            CatalogId::SqrtCusp => "sqrt-cusp",
            CatalogId::AxisCross => "axis-cross",
            CatalogId::Cone => "cone",
            CatalogId::XAxis => "x-axis",
        }
    }

    pub fn is_convex(self) -> bool {
        matches!(self, CatalogId::Cone | CatalogId::XAxis)
    }

    /// Convex polyhedral pieces `{<a, p> <= b}` whose union is the set (in
    /// local coordinates), or `None` for the curved entry.
    pub fn pieces(self) -> Option<Vec<Vec<(Vec<f64>, f64)>>> {
        let r = |a: f64, b: f64| (vec![a, b], 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            CatalogId::AbsCone => Some(vec![vec![r(s, -s)], vec![r(-s, -s)]]),
            CatalogId::SqrtCusp => None,
            CatalogId::AxisCross => Some(vec![
                vec![r(0.0, 1.0), r(0.0, -1.0)],
                vec![r(1.0, 0.0), r(-1.0, 0.0), r(0.0, -1.0)],
            ]),
            CatalogId::Cone => Some(vec![vec![r(s, -s), r(-s, -s)]]),
            CatalogId::XAxis => Some(vec![vec![r(0.0, 1.0), r(0.0, -1.0)]]),
        }
    }

    /// Hand-derived recession cone (exact).
    pub fn recession_cone(self) -> GeneratedCone {
        let p = |x: f64, y: f64| Point::from([x, y]);
        match self {
            CatalogId::AbsCone | CatalogId::Cone => GeneratedCone::new(
                2,
                &[p(1.0, 1.0), p(-1.0, 1.0)],
                &[],
                super::Exactness::Exact,
            ),
            CatalogId::SqrtCusp => GeneratedCone::ray(&p(0.0, 1.0)),
            CatalogId::AxisCross => GeneratedCone::zero(2),
            CatalogId::XAxis => GeneratedCone::line(&p(1.0, 0.0)),
        }
    }
}

/// `y + sqrt|x| >= -eps`
pub(crate) fn cusp_contains(p: &[f64], eps: f64) -> bool {
    p[1] + p[0].abs().sqrt() >= -eps
}

pub(crate) fn cusp_interior(p: &[f64]) -> bool {
    p[1] + p[0].abs().sqrt() > 1e-12
}

/// `{t : p + t w in sqrt-cusp}` as sorted disjoint closed intervals.
pub(crate) fn cusp_line_set(p: &[f64], w: &[f64]) -> Vec<Interval> {
    let (p0, q0, a, b) = (p[0], p[1], w[0], w[1]);
    let f = |t: f64| q0 + t * b + (p0 + t * a).abs().sqrt();

    if a == 0.0 {
        let c = q0 + p0.abs().sqrt();
        return if b == 0.0 {
            if c >= 0.0 {
                vec![Interval::ALL]
            } else {
                vec![]
            }
        } else if b > 0.0 {
            vec![Interval::new(-c / b, f64::INFINITY)]
        } else {
            vec![Interval::new(f64::NEG_INFINITY, -c / b)]
        };
    }

    // Candidate boundary crossings: the kink and roots of (q0 + t b)^2 = s (p0 + t a)
    // on each side s = +-1 of the kink.
    let tk = -p0 / a;
    let mut cands = vec![tk];
    for s in [1.0, -1.0] {
        let qa = b * b;
        let qb = 2.0 * q0 * b - s * a;
        let qc = q0 * q0 - s * p0;
        for t in quadratic_roots(qa, qb, qc) {
            let on_side = s * (p0 + t * a) >= -1e-12;
            let below = q0 + t * b <= 1e-12;
            if on_side && below {
                cands.push(t);
            }
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));

    // Sign pattern between candidates decides the intervals.
    let mut out: Vec<Interval> = Vec::new();
    let mut open: Option<f64> = None;
    let n = cands.len();
    let probe_left = cands[0] - 1.0 - cands[0].abs();
    if f(probe_left) >= 0.0 {
        open = Some(f64::NEG_INFINITY);
    }
    for i in 0..n {
        let t = cands[i];
        let next_in = if i + 1 < n {
            f(0.5 * (t + cands[i + 1])) >= 0.0
        } else {
            f(t + 1.0 + t.abs()) >= 0.0
        };
        match (open, next_in) {
            (Some(_), true) => {}
            (Some(lo), false) => {
                out.push(Interval::new(lo, t));
                open = None;
            }
            (None, true) => open = Some(t),
            (None, false) => {
                if f(t) >= -1e-12 {
                    out.push(Interval::new(t, t));
                }
            }
        }
    }
    if let Some(lo) = open {
        out.push(Interval::new(lo, f64::INFINITY));
    }
    out
}

/// Real roots of `a t^2 + b t + c = 0`, handling the degenerate linear case.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-15 * scale {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-14 * (b * b + (4.0 * a * c).abs()) {
        return vec![];
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    let mut r = vec![q / a, c / q];
    r.sort_by(f64::total_cmp);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip_through_serde() {
        for id in CatalogId::ALL {
            let s = serde_json::to_string(&id).unwrap();
            assert_eq!(s, format!("\"{}\"", id.name()));
            let back: CatalogId = serde_json::from_str(&s).unwrap();
            assert_eq!(back, id);
        }
    }

    #[test]
    fn cusp_vertical_line() {
        let iv = cusp_line_set(&[0.25, -1.0], &[0.0, 1.0]);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].lo - 0.5).abs() < 1e-15);
        assert_eq!(iv[0].hi, f64::INFINITY);
    }

    #[test]
    fn cusp_horizontal_line_below_origin() {
        // y = -1 meets the set where sqrt|x| >= 1, i.e. |x| >= 1.
        let iv = cusp_line_set(&[0.0, -1.0], &[1.0, 0.0]);
        assert_eq!(iv.len(), 2);
        assert_eq!(iv[0].lo, f64::NEG_INFINITY);
        assert!((iv[0].hi + 1.0).abs() < 1e-12);
        assert!((iv[1].lo - 1.0).abs() < 1e-12);
        assert_eq!(iv[1].hi, f64::INFINITY);
    }

    #[test]
    fn cusp_axis_ray_enters_at_the_tip() {
        let iv = cusp_line_set(&[0.0, -2.0], &[0.0, 1.0]);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].lo - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_roots_stable() {
        let r = quadratic_roots(1.0, -1e8, 1.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1e-8).abs() < 1e-20);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
        assert_eq!(quadratic_roots(0.0, 2.0, -4.0), vec![2.0]);
    }
}
