//! Subdifferentials of `T` (and of its scalarization `phi`) as dual slices:
//! a normal cone cut by one linear condition on `<x*, v>`. Also the Fenchel
//! conjugate and the minimum-norm subgradient used by the solver.

use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cones::{
    dini_normal_cone, frechet_normal_cone, limiting_normal_cone, ConeFamily,
};
use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{
    recession_contains_exact, support, GeneratedCone, SetExpr, EPS,
};
use crate::linalg::least_distance;
use crate::lipschitz::{local_condition, property_p_check, Check, Verdict};
use crate::mintime::{check_direction, projection_pi, scalarization};
use crate::point::Point;
use crate::polyhedral::Polyhedron;

/// The linear condition on `<x*, v>` cutting the cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Constraint {
    /// `<x*, v> >= -1`
    #[serde(rename = "ge-1")]
    GeMinusOne,
    /// `<x*, v> = -1`
    #[serde(rename = "eq-1")]
    EqMinusOne,
    /// `<x*, v> >= 0`
    #[serde(rename = "vplus")]
    VPlus,
    /// `<x*, v> = 0`
    #[serde(rename = "vperp")]
    VPerp,
    /// `-1 <= <x*, v> <= 0`
    #[serde(rename = "band")]
    Band,
}

impl Constraint {
    /// Rows `(a, b)` meaning `<a, x*> <= b`.
    fn rows(self, v: &Point) -> Vec<(Vec<f64>, f64)> {
        let pos = v.coords().to_vec();
        let neg: Vec<f64> = pos.iter().map(|x| -x).collect();
        match self {
            Constraint::GeMinusOne => vec![(neg, 1.0)],
            Constraint::EqMinusOne => vec![(pos, -1.0), (neg, 1.0)],
            Constraint::VPlus => vec![(neg, 0.0)],
            Constraint::VPerp => vec![(pos, 0.0), (neg, 0.0)],
            Constraint::Band => vec![(neg, 1.0), (pos, 0.0)],
        }
    }

    fn holds(self, s: f64, tol: f64) -> bool {
        match self {
            Constraint::GeMinusOne => s >= -1.0 - tol,
            Constraint::EqMinusOne => (s + 1.0).abs() <= tol,
            Constraint::VPlus => s >= -tol,
            Constraint::VPerp => s.abs() <= tol,
            Constraint::Band => s >= -1.0 - tol && s <= tol,
        }
    }
}

/// How a slice relates to the true subdifferential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceExactness {
    /// The represented set is the subdifferential.
    Exact,
    /// The represented set contains the subdifferential.
    UpperEstimate,
    /// Built from a sampled cone: the represented set is contained in the
    /// slice of the true cone.
    InnerApprox,
}

/// `{x* in cone : constraint(<x*, v>)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSlice {
    cone: ConeFamily,
    v: Point,
    constraint: Constraint,
    exactness: SliceExactness,
}

impl DualSlice {
    pub fn new(cone: ConeFamily, v: Point, constraint: Constraint, exactness: SliceExactness) -> Self {
        let exactness = if cone.exactness().is_exact() {
            exactness
        } else {
            SliceExactness::InnerApprox
        };
        DualSlice {
            cone,
            v,
            constraint,
            exactness,
        }
    }

    fn single(cone: GeneratedCone, v: &Point, c: Constraint, e: SliceExactness) -> Self {
        DualSlice::new(ConeFamily::single(cone), v.clone(), c, e)
    }

    pub fn cone(&self) -> &ConeFamily {
        &self.cone
    }

    pub fn v(&self) -> &Point {
        &self.v
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn exactness(&self) -> SliceExactness {
        self.exactness
    }

    pub fn is_exact(&self) -> bool {
        self.exactness == SliceExactness::Exact
    }

    pub fn contains(&self, xstar: &Point, tol: f64) -> bool {
        xstar.dim() == self.v.dim()
            && self.constraint.holds(xstar.dot(&self.v), tol)
            && self.cone.contains(xstar, tol)
    }

    fn part_rows(&self, part: &GeneratedCone) -> Vec<(Vec<f64>, f64)> {
        let mut rows: Vec<(Vec<f64>, f64)> = part.hrep().into_iter().map(|r| (r, 0.0)).collect();
        rows.extend(self.constraint.rows(&self.v));
        rows
    }

    /// The nonempty parts as canonical polyhedra.
    pub fn polyhedra(&self) -> Vec<Polyhedron> {
        let d = self.v.dim();
        self.cone
            .parts()
            .iter()
            .filter_map(|p| Polyhedron::from_rows(&self.part_rows(p), d))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.polyhedra().is_empty()
    }

    /// Same represented set: every nonempty part of one is a part of the
    /// other, after discarding parts contained in another part.
    pub fn same_set(&self, other: &DualSlice, tol: f64) -> bool {
        let a = maximal(self.polyhedra(), tol);
        let b = maximal(other.polyhedra(), tol);
        a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| p.approx_eq(q, tol)))
    }

    /// Minimum-norm element (per part, then the smallest; ties keep the
    /// first part in canonical order), or `None` when the slice is empty.
    pub fn min_norm_element(&self) -> Option<Point> {
        let d = self.v.dim();
        let mut best: Option<Vec<f64>> = None;
        for part in self.cone.parts() {
            let rows = self.part_rows(part);
            let g: Vec<Vec<f64>> = rows.iter().map(|(a, _)| a.iter().map(|x| -x).collect()).collect();
            let h: Vec<f64> = rows.iter().map(|(_, b)| -b).collect();
            if let Some(y) = least_distance(&g, &h, d) {
                let n = crate::point::norm(&y);
                if best.as_ref().is_none_or(|b| n < crate::point::norm(b) - 1e-12) {
                    best = Some(y);
                }
            }
        }
        best.map(|y| Point::new(y.into_iter().map(crate::linalg::snap).collect()))
    }

    /// A random member: a random point of a random nonempty part, built from
    /// its vertices, rays and lineality.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Option<Point> {
        let polys = self.polyhedra();
        if polys.is_empty() {
            return None;
        }
        let p = &polys[rng.gen_range(0..polys.len())];
        let d = self.v.dim();
        let mut y = vec![0.0; d];
        let w: Vec<f64> = p.vertices.iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = w.iter().sum();
        for (vx, wi) in p.vertices.iter().zip(&w) {
            for (yi, c) in y.iter_mut().zip(vx.coords()) {
                *yi += wi / total * c;
            }
        }
        for r in &p.rays {
            let t = rng.gen::<f64>() * scale;
            for (yi, c) in y.iter_mut().zip(r.coords()) {
                *yi += t * c;
            }
        }
        for l in &p.lineality {
            let t = (rng.gen::<f64>() * 2.0 - 1.0) * scale;
            for (yi, c) in y.iter_mut().zip(l.coords()) {
                *yi += t * c;
            }
        }
        Some(Point::new(y))
    }
}

/// Drops polyhedra contained in another one of the list.
fn maximal(mut polys: Vec<Polyhedron>, tol: f64) -> Vec<Polyhedron> {
    let mut keep: Vec<Polyhedron> = Vec::new();
    polys.sort_by_key(|p| std::cmp::Reverse(p.rays.len() + 2 * p.lineality.len()));
    for p in polys {
        if !keep.iter().any(|q| poly_subset(&p, q, tol)) {
            keep.retain(|q| !poly_subset(q, &p, tol));
            keep.push(p);
        }
    }
    keep
}

/// `p` inside `q`, tested on `p`'s generators against `q`'s hull. Only exact
/// up to the shapes produced here: generators of `p` must each be generators
/// of `q` or lie on a segment between two of its vertices.
fn poly_subset(p: &Polyhedron, q: &Polyhedron, tol: f64) -> bool {
    let in_dirs = |x: &Point, dirs: &[Point]| dirs.iter().any(|r| (x - r).norm() <= tol);
    let in_span = |x: &Point, lin: &[Point]| {
        let mut rem = x.clone();
        for l in lin {
            rem = rem.along(-rem.dot(l) / l.norm_sq(), l);
        }
        rem.norm() <= tol * x.norm().max(1.0)
    };
    p.lineality.iter().all(|l| in_span(l, &q.lineality))
        && p.rays.iter().all(|r| in_dirs(r, &q.rays) || in_span(r, &q.lineality))
        && p.vertices.iter().all(|x| {
            q.vertices.iter().any(|a| (x - a).norm() <= tol)
                || q.vertices.iter().any(|a| {
                    q.vertices.iter().any(|b| {
                        let ab = b - a;
                        let t = (x - a).dot(&ab) / ab.norm_sq().max(1e-300);
                        (0.0..=1.0).contains(&t) && (&a.along(t, &ab) - x).norm() <= tol
                    }) || q.rays.iter().any(|r| {
                        let t = (x - a).dot(r);
                        t >= 0.0 && (&a.along(t, r) - x).norm() <= tol
                    })
                })
        })
}

impl Serialize for DualSlice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DualSlice", 5)?;
        st.serialize_field("cone", &self.cone)?;
        st.serialize_field("v", &self.v)?;
        st.serialize_field("constraint", &self.constraint)?;
        st.serialize_field("exact", &self.is_exact())?;
        st.serialize_field("exactness", &self.exactness)?;
        st.end()
    }
}

struct Site {
    in_set: bool,
    /// `x` itself inside the set, else the projection `x + T(x) v`.
    base: Point,
    t: f64,
}

fn site(s: &SetExpr, v: &Point, x: &Point) -> Result<Site> {
    check_direction(s, v)?;
    check_dim(s.dim(), x.dim())?;
    if s.contains_unchecked(x.coords(), EPS) {
        return Ok(Site {
            in_set: true,
            base: x.clone(),
            t: 0.0,
        });
    }
    let p = projection_pi(s, v, x)?;
    Ok(Site {
        in_set: false,
        base: p.point,
        t: p.t.finite().expect("finite projection"),
    })
}

fn lower_calm(s: &SetExpr, v: &Point, x: &Point) -> Result<bool> {
    Ok(local_condition(s, v, x)? == Verdict::Lipschitz)
}

fn upgrade(ok: bool) -> SliceExactness {
    if ok {
        SliceExactness::Exact
    } else {
        SliceExactness::UpperEstimate
    }
}

fn require_convex(s: &SetExpr, op: &'static str) -> Result<()> {
    if s.is_convex() {
        Ok(())
    } else {
        Err(Error::UnsupportedVariant {
            op,
            variant: s.kind(),
        })
    }
}

/// Normal cone of a convex set (convex variants and convex catalog entries).
fn convex_cone_at(s: &SetExpr, x: &Point) -> Result<GeneratedCone> {
    let fam = limiting_normal_cone(s, x)?;
    Ok(fam.parts()[0].clone())
}

/// Fenchel conjugate `T*(x*) = sigma_S(x*)` when `<x*, -v> <= 1`, else `+inf`.
pub fn conjugate(s: &SetExpr, v: &Point, xstar: &Point) -> Result<ExtReal> {
    check_direction(s, v)?;
    check_dim(s.dim(), xstar.dim())?;
    if !s.is_convex_variant() {
        return Err(Error::UnsupportedVariant {
            op: "conjugate",
            variant: s.kind(),
        });
    }
    if -xstar.dot(v) > 1.0 + 1e-12 {
        return Ok(ExtReal::PosInf);
    }
    support(s, xstar)
}

/// Convex subdifferential: `N(x) n {<x*, v> >= -1}` inside the set (the band
/// `-1 <= <x*, v> <= 0` when `v` is a recession direction), and
/// `N(x~) n {<x*, v> = -1}` at the projection `x~` outside it.
pub fn convex_subdifferential(s: &SetExpr, v: &Point, x: &Point) -> Result<DualSlice> {
    require_convex(s, "convex_subdifferential")?;
    let st = site(s, v, x)?;
    let cone = convex_cone_at(s, &st.base)?;
    let c = if !st.in_set {
        Constraint::EqMinusOne
    } else if recession_contains_exact(s, v) {
        Constraint::Band
    } else {
        Constraint::GeMinusOne
    };
    Ok(DualSlice::single(cone, v, c, SliceExactness::Exact))
}

/// Frechet subdifferential. Outside the set the slice is an upper estimate
/// unless `T` is certified lower calm around `x` (or the set is convex).
pub fn frechet_subdifferential(s: &SetExpr, v: &Point, x: &Point) -> Result<DualSlice> {
    let st = site(s, v, x)?;
    let cone = frechet_normal_cone(s, &st.base)?;
    if st.in_set {
        return Ok(DualSlice::single(cone, v, Constraint::GeMinusOne, SliceExactness::Exact));
    }
    let e = upgrade(s.is_convex() || lower_calm(s, v, x)?);
    Ok(DualSlice::single(cone, v, Constraint::EqMinusOne, e))
}

/// s-Holder subdifferential. Supported for polyhedral sets and balls, where
/// the s-Holder normal cone equals the Frechet one for every `s > 0`.
pub fn holder_subdifferential(s: &SetExpr, v: &Point, x: &Point, sexp: f64) -> Result<DualSlice> {
    if !(sexp > 0.0 && sexp.is_finite()) {
        return Err(Error::Precondition("Holder exponent must be positive".into()));
    }
    let supported = match s {
        SetExpr::Ball { .. } => true,
        SetExpr::Union { .. } => s.polyhedral_pieces().is_some(),
        SetExpr::Implicit2D { .. } => false,
        _ => true,
    };
    if !supported {
        return Err(Error::NotComputable(format!(
            "s-Holder normal cone of a {} set",
            s.kind()
        )));
    }
    frechet_subdifferential(s, v, x)
}

/// Limiting subdifferential. Outside the set it is exact when `T` is lower
/// calm around `x` and property P holds at the projection with radius `T(x)`.
pub fn limiting_subdifferential(s: &SetExpr, v: &Point, x: &Point) -> Result<DualSlice> {
    let st = site(s, v, x)?;
    let cone = limiting_normal_cone(s, &st.base)?;
    if st.in_set {
        return Ok(DualSlice::new(cone, v.clone(), Constraint::GeMinusOne, SliceExactness::Exact));
    }
    let ok = s.is_convex()
        || (lower_calm(s, v, x)? && property_p_check(s, v, &st.base, st.t)? == Check::Holds);
    Ok(DualSlice::new(cone, v.clone(), Constraint::EqMinusOne, upgrade(ok)))
}

/// Singular subdifferential: `N(x) n {v}^+` inside the set (`{v}^perp` when
/// `v` is a recession direction), `N(x~) n {v}^perp` outside it.
pub fn singular_subdifferential(s: &SetExpr, v: &Point, x: &Point) -> Result<DualSlice> {
    let st = site(s, v, x)?;
    let cone = limiting_normal_cone(s, &st.base)?;
    if st.in_set {
        let c = if recession_contains_exact(s, v) {
            Constraint::VPerp
        } else {
            Constraint::VPlus
        };
        return Ok(DualSlice::new(cone, v.clone(), c, SliceExactness::Exact));
    }
    let ok = s.is_convex() && !convex_subdifferential(s, v, x)?.is_empty();
    Ok(DualSlice::new(cone, v.clone(), Constraint::VPerp, upgrade(ok)))
}

/// Dini-Hadamard subdifferential from the Dini normal cone.
pub fn dini_subdifferential(s: &SetExpr, v: &Point, x: &Point) -> Result<DualSlice> {
    let st = site(s, v, x)?;
    let cone = dini_normal_cone(s, &st.base)?;
    if st.in_set {
        return Ok(DualSlice::single(cone, v, Constraint::GeMinusOne, SliceExactness::Exact));
    }
    let e = upgrade(s.is_convex() || lower_calm(s, v, x)?);
    Ok(DualSlice::single(cone, v, Constraint::EqMinusOne, e))
}

fn scalarization_site(s: &SetExpr, v: &Point, x: &Point) -> Result<GeneratedCone> {
    require_convex(s, "scalarization_subdiff")?;
    check_dim(s.dim(), x.dim())?;
    if !recession_contains_exact(s, v) {
        return Err(Error::Precondition(
            "v must be certified in the recession cone".into(),
        ));
    }
    let phi = scalarization(s, v, x)?
        .finite()
        .ok_or(Error::NotInDomain)?;
    convex_cone_at(s, &x.along(phi, v))
}

/// Subdifferential of `phi`: `N(x + phi(x) v) n {<x*, v> = -1}`.
pub fn scalarization_subdiff(s: &SetExpr, v: &Point, x: &Point) -> Result<DualSlice> {
    let cone = scalarization_site(s, v, x)?;
    Ok(DualSlice::single(cone, v, Constraint::EqMinusOne, SliceExactness::Exact))
}

/// Singular subdifferential of `phi`: `N(x + phi(x) v) n {v}^perp`.
pub fn scalarization_singular_subdiff(s: &SetExpr, v: &Point, x: &Point) -> Result<DualSlice> {
    let cone = scalarization_site(s, v, x)?;
    Ok(DualSlice::single(cone, v, Constraint::VPerp, SliceExactness::Exact))
}

/// Minimum-norm element of a slice, `None` when it is empty.
pub fn select_subgradient(d: &DualSlice) -> Option<Point> {
    d.min_norm_element()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CatalogId;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[f64]) -> Point {
        Point::from(v)
    }

    fn ball() -> SetExpr {
        SetExpr::ball([0.0, 0.0], 8f64.sqrt()).unwrap()
    }

    fn diag_segment(lo: f64, hi: f64) -> Polyhedron {
        Polyhedron::canonical(vec![vec![lo, lo], vec![hi, hi]], vec![], vec![], 2)
    }

    #[test]
    fn conjugate_examples() {
        let v = p(&[1.0, 1.0]);
        assert_abs_diff_eq!(
            conjugate(&ball(), &v, &p(&[-0.5, -0.5])).unwrap().finite().unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_eq!(conjugate(&ball(), &v, &p(&[0.0, 0.0])).unwrap(), ExtReal::ZERO);
        assert_eq!(conjugate(&ball(), &v, &p(&[-1.0, -1.0])).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn convex_subdifferential_examples() {
        let v = p(&[1.0, 1.0]);
        let d = convex_subdifferential(&ball(), &v, &p(&[-2.0, -2.0])).unwrap();
        let polys = d.polyhedra();
        assert_eq!(polys.len(), 1);
        assert!(polys[0].approx_eq(&diag_segment(-0.5, 0.0), 1e-9));

        let d = convex_subdifferential(&ball(), &v, &p(&[2.0, 2.0])).unwrap();
        let polys = d.polyhedra();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(polys[0].vertices, vec![p(&[0.0, 0.0])]);
        assert!(polys[0].rays[0].distance(&p(&[s, s])) < 1e-12);

        let d = convex_subdifferential(&ball(), &v, &p(&[-3.0, -3.0])).unwrap();
        let polys = d.polyhedra();
        assert!(polys[0].approx_eq(&diag_segment(-0.5, -0.5), 1e-9));
        assert!(d.is_exact());
    }

    #[test]
    fn selection_examples() {
        let v = p(&[1.0, 1.0]);
        let d = convex_subdifferential(&ball(), &v, &p(&[-3.0, -3.0])).unwrap();
        let g = select_subgradient(&d).unwrap();
        assert!(g.distance(&p(&[-0.5, -0.5])) < 1e-9);
        let d = convex_subdifferential(&ball(), &v, &p(&[-2.0, -2.0])).unwrap();
        assert_eq!(select_subgradient(&d).unwrap(), p(&[0.0, 0.0]));
        // {0} n {<x*, v> = -1} is empty.
        let d = DualSlice::single(
            GeneratedCone::zero(2),
            &v,
            Constraint::EqMinusOne,
            SliceExactness::Exact,
        );
        assert!(d.is_empty());
        assert_eq!(select_subgradient(&d), None);
    }

    #[test]
    fn nonconvex_examples() {
        let v = p(&[0.0, 1.0]);
        let origin = p(&[0.0, 0.0]);
        let abs = SetExpr::implicit(CatalogId::AbsCone);
        let f = frechet_subdifferential(&abs, &v, &origin).unwrap();
        assert_eq!(f.polyhedra().len(), 1);
        assert_eq!(f.polyhedra()[0].vertices, vec![origin.clone()]);
        assert!(f.polyhedra()[0].is_bounded());
        let dini = dini_subdifferential(&abs, &v, &origin).unwrap();
        assert!(dini.same_set(&f, 1e-9));

        let lim = limiting_subdifferential(&abs, &v, &origin).unwrap();
        let expect = [
            Polyhedron::canonical(vec![vec![0.0, 0.0], vec![-1.0, -1.0]], vec![], vec![], 2),
            Polyhedron::canonical(vec![vec![0.0, 0.0], vec![1.0, -1.0]], vec![], vec![], 2),
        ];
        let got = lim.polyhedra();
        assert_eq!(got.len(), 2);
        assert!(expect.iter().all(|e| got.iter().any(|g| g.approx_eq(e, 1e-9))));

        let cross = SetExpr::implicit(CatalogId::AxisCross);
        let x = p(&[0.0, -2.0]);
        let f = frechet_subdifferential(&cross, &v, &x).unwrap();
        let polys = f.polyhedra();
        assert_eq!(polys.len(), 1);
        assert_eq!(polys[0].vertices, vec![p(&[0.0, -1.0])]);
        assert!(polys[0].is_bounded());

        let lim = limiting_subdifferential(&cross, &v, &x).unwrap();
        assert_eq!(lim.polyhedra().len(), 1);
        assert_eq!(lim.polyhedra()[0].vertices, vec![p(&[0.0, -1.0])]);

        let sing = singular_subdifferential(&cross, &v, &x).unwrap();
        let polys = maximal(sing.polyhedra(), 1e-9);
        assert_eq!(polys.len(), 1);
        assert_eq!(polys[0].lineality, vec![p(&[1.0, 0.0])]);
    }

    #[test]
    fn singular_examples() {
        let v = p(&[1.0, 1.0]);
        let d = singular_subdifferential(&ball(), &v, &p(&[-2.0, -2.0])).unwrap();
        let polys = d.polyhedra();
        assert_eq!(polys.len(), 1);
        assert_eq!(polys[0].vertices, vec![p(&[0.0, 0.0])]);
        assert!(polys[0].is_bounded());
        let d = singular_subdifferential(&ball(), &v, &p(&[0.5, 0.0])).unwrap();
        assert_eq!(d.polyhedra()[0].vertices, vec![p(&[0.0, 0.0])]);
    }

    #[test]
    fn holder_support() {
        let sq = SetExpr::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let v = p(&[-1.0, -1.0]);
        let x = p(&[1.0, 1.0]);
        for sexp in [0.5, 1.0, 2.0] {
            let h = holder_subdifferential(&sq, &v, &x, sexp).unwrap();
            assert!(h.same_set(&frechet_subdifferential(&sq, &v, &x).unwrap(), 1e-9));
        }
        let cusp = SetExpr::implicit(CatalogId::SqrtCusp);
        assert!(matches!(
            holder_subdifferential(&cusp, &p(&[0.0, 1.0]), &p(&[0.0, 0.0]), 1.0),
            Err(Error::NotComputable(_))
        ));
    }

    #[test]
    fn scalarization_example() {
        let up = SetExpr::halfspace([0.0, -1.0], 0.0).unwrap();
        let v = p(&[0.0, 1.0]);
        let d = scalarization_subdiff(&up, &v, &p(&[0.0, -3.0])).unwrap();
        let polys = d.polyhedra();
        assert_eq!(polys[0].vertices, vec![p(&[0.0, -1.0])]);
        assert!(polys[0].is_bounded());
        // phi and T coincide where T > 0 and v is a recession direction.
        let c = convex_subdifferential(&up, &v, &p(&[0.0, -3.0])).unwrap();
        assert!(d.same_set(&c, 1e-9));
        // Inside the set phi < 0 still lands on the boundary line.
        let inner = scalarization_subdiff(&up, &v, &p(&[1.0, 3.0])).unwrap();
        assert!(inner.same_set(&d, 1e-9));
        assert!(matches!(
            scalarization_subdiff(&ball(), &p(&[1.0, 0.0]), &p(&[0.0, 0.0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = convex_subdifferential(&ball(), &p(&[1.0, 1.0]), &p(&[2.0, 2.0])).unwrap();
        for _ in 0..50 {
            let y = d.sample(&mut rng, 3.0).unwrap();
            assert!(d.contains(&y, 1e-9));
        }
    }
}
