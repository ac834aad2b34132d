//! Set primitives: membership, support function, Euclidean projection and
//! recession cones.

mod catalog;
mod cone;
mod ray;

use serde::{Deserialize, Serialize};

pub use catalog::CatalogId;
pub use cone::{Exactness, GeneratedCone};
pub use ray::{line_set, Interval};

pub(crate) use catalog::{cusp_contains, cusp_interior};
pub(crate) use ray::{first_nonnegative, merge, rows_line_set, T_TOL};

use crate::error::{check_dim, Error, Result};
use crate::ext::{inf_vec, ExtReal};
use crate::linalg::{least_distance, project_onto_rows};
use crate::point::{dot, norm, Point, MAX_DIM};
use crate::polyhedral::Polyhedron;

/// Default membership tolerance, absolute on unit-normalized rows.
pub const EPS: f64 = 1e-9;

/// One inequality `<a, x> <= b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Row {
    pub a: Point,
    pub b: f64,
}

/// A nonempty closed subset of R^d.
///
/// Deserialization validates the input and normalizes every halfspace row to
/// `|a| = 1`. Values built directly through the enum are accepted as long as
/// they are well formed; operations normalize on the fly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", try_from = "repr::SetExprRepr")]
pub enum SetExpr {
    Halfspace {
        a: Point,
        b: f64,
    },
    Ball {
        c: Point,
        r: f64,
    },
    Box {
        #[serde(with = "inf_vec")]
        lo: Vec<f64>,
        #[serde(with = "inf_vec")]
        hi: Vec<f64>,
    },
    Polytope {
        rows: Vec<Row>,
    },
    Union {
        members: Vec<SetExpr>,
    },
    /// A curated planar set, optionally translated by `params = [dx, dy]`.
    Implicit2D {
        catalog_id: CatalogId,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        params: Vec<f64>,
    },
}

mod repr {
    use super::*;

    #[derive(Deserialize)]
    #[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
    pub enum SetExprRepr {
        Halfspace {
            a: Point,
            b: f64,
        },
        Ball {
            c: Point,
            r: f64,
        },
        Box {
            #[serde(with = "inf_vec")]
            lo: Vec<f64>,
            #[serde(with = "inf_vec")]
            hi: Vec<f64>,
        },
        Polytope {
            rows: Vec<Row>,
        },
        Union {
            members: Vec<SetExpr>,
        },
        Implicit2D {
            catalog_id: CatalogId,
            #[serde(default)]
            params: Vec<f64>,
        },
    }

    impl TryFrom<SetExprRepr> for SetExpr {
        type Error = Error;

        fn try_from(r: SetExprRepr) -> Result<SetExpr> {
            let s = match r {
                SetExprRepr::Halfspace { a, b } => SetExpr::Halfspace { a, b },
                SetExprRepr::Ball { c, r } => SetExpr::Ball { c, r },
                SetExprRepr::Box { lo, hi } => SetExpr::Box { lo, hi },
                SetExprRepr::Polytope { rows } => SetExpr::Polytope { rows },
                SetExprRepr::Union { members } => SetExpr::Union { members },
                SetExprRepr::Implicit2D { catalog_id, params } => {
                    SetExpr::Implicit2D { catalog_id, params }
                }
            };
            s.validated()
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSet(msg.into())
}

fn check_finite_point(p: &Point, what: &str) -> Result<()> {
    if p.dim() == 0 || p.dim() > MAX_DIM {
        return Err(invalid(format!("{what} must have dimension 1..={MAX_DIM}")));
    }
    if !p.is_finite() {
        return Err(invalid(format!("{what} must be finite")));
    }
    Ok(())
}

fn normalize_row(a: &Point, b: f64, what: &str) -> Result<(Point, f64)> {
    check_finite_point(a, what)?;
    if !b.is_finite() {
        return Err(invalid(format!("{what}: b must be finite")));
    }
    let n = a.norm();
    if n == 0.0 {
        return Err(invalid(format!("{what}: normal a must be nonzero")));
    }
    Ok((Point::new(a.coords().iter().map(|x| x / n).collect()), b / n))
}

impl SetExpr {
    pub fn halfspace(a: impl Into<Point>, b: f64) -> Result<Self> {
        SetExpr::Halfspace { a: a.into(), b }.validated()
    }

    pub fn ball(c: impl Into<Point>, r: f64) -> Result<Self> {
        SetExpr::Ball { c: c.into(), r }.validated()
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        SetExpr::Box { lo, hi }.validated()
    }

    pub fn polytope(rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        SetExpr::Polytope {
            rows: rows
                .into_iter()
                .map(|(a, b)| Row { a: Point::new(a), b })
                .collect(),
        }
        .validated()
    }

    pub fn union(members: Vec<SetExpr>) -> Result<Self> {
        SetExpr::Union { members }.validated()
    }

    pub fn implicit(catalog_id: CatalogId) -> Self {
        SetExpr::Implicit2D {
            catalog_id,
            params: Vec::new(),
        }
    }

    /// Checks the invariants and returns the normalized form.
    pub fn validated(self) -> Result<Self> {
        match self {
            SetExpr::Halfspace { a, b } => {
                let (a, b) = normalize_row(&a, b, "halfspace")?;
                Ok(SetExpr::Halfspace { a, b })
            }
            SetExpr::Ball { c, r } => {
                check_finite_point(&c, "ball center")?;
                if !(r.is_finite() && r > 0.0) {
                    return Err(invalid("ball radius must be finite and positive"));
                }
                Ok(SetExpr::Ball { c, r })
            }
            SetExpr::Box { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(invalid("box lo and hi must have the same length"));
                }
                if lo.is_empty() || lo.len() > MAX_DIM {
                    return Err(invalid(format!("box must have dimension 1..={MAX_DIM}")));
                }
                for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
                    if l.is_nan() || h.is_nan() || *l == f64::INFINITY || *h == f64::NEG_INFINITY {
                        return Err(invalid(format!("box bound {i} is not a valid extended real")));
                    }
                    if l > h {
                        return Err(invalid(format!("box requires lo <= hi (coordinate {i})")));
                    }
                }
                Ok(SetExpr::Box { lo, hi })
            }
            SetExpr::Polytope { rows } => {
                if rows.is_empty() {
                    return Err(invalid("polytope needs at least one row"));
                }
                let d = rows[0].a.dim();
                let mut out = Vec::with_capacity(rows.len());
                for (i, r) in rows.iter().enumerate() {
                    if r.a.dim() != d {
                        return Err(invalid(format!("polytope row {i} has the wrong dimension")));
                    }
                    let (a, b) = normalize_row(&r.a, r.b, &format!("polytope row {i}"))?;
                    out.push(Row { a, b });
                }
                let g: Vec<Vec<f64>> = out.iter().map(|r| (-&r.a).into_vec()).collect();
                let h: Vec<f64> = out.iter().map(|r| -r.b).collect();
                if least_distance(&g, &h, d).is_none() {
                    return Err(invalid("polytope is empty"));
                }
                Ok(SetExpr::Polytope { rows: out })
            }
            SetExpr::Union { members } => {
                if members.len() < 2 {
                    return Err(invalid("union needs at least two members"));
                }
                let d = members[0].dim();
                let mut out = Vec::with_capacity(members.len());
                for (i, m) in members.into_iter().enumerate() {
                    if !m.is_convex_variant() {
                        return Err(invalid(format!(
                            "union member {i} must be a halfspace, ball, box or polytope"
                        )));
                    }
                    if m.dim() != d {
                        return Err(invalid(format!("union member {i} has the wrong dimension")));
                    }
                    out.push(m.validated()?);
                }
                Ok(SetExpr::Union { members: out })
            }
            SetExpr::Implicit2D { catalog_id, params } => {
                if !(params.is_empty() || params.len() == 2) {
                    return Err(invalid("implicit2d params must be [] or an offset [dx, dy]"));
                }
                if params.iter().any(|p| !p.is_finite()) {
                    return Err(invalid("implicit2d offset must be finite"));
                }
                Ok(SetExpr::Implicit2D { catalog_id, params })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetExpr::Halfspace { a, .. } => a.dim(),
            SetExpr::Ball { c, .. } => c.dim(),
            SetExpr::Box { lo, .. } => lo.len(),
            SetExpr::Polytope { rows } => rows.first().map_or(0, |r| r.a.dim()),
            SetExpr::Union { members } => members.first().map_or(0, SetExpr::dim),
            SetExpr::Implicit2D { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SetExpr::Halfspace { .. } => "halfspace",
            SetExpr::Ball { .. } => "ball",
            SetExpr::Box { .. } => "box",
            SetExpr::Polytope { .. } => "polytope",
            SetExpr::Union { .. } => "union",
            SetExpr::Implicit2D { .. } => "implicit2d",
        }
    }

    /// Halfspace, ball, box or polytope.
    pub fn is_convex_variant(&self) -> bool {
        matches!(
            self,
            SetExpr::Halfspace { .. } | SetExpr::Ball { .. } | SetExpr::Box { .. } | SetExpr::Polytope { .. }
        )
    }

    /// Convex as a set: the convex variants plus the convex catalog entries.
    /// Unions are conservatively reported as nonconvex.
    pub fn is_convex(&self) -> bool {
        match self {
            SetExpr::Implicit2D { catalog_id, .. } => catalog_id.is_convex(),
            other => other.is_convex_variant(),
        }
    }

    /// Finite intersection of halfspaces (halfspace, box, polytope).
    pub fn is_polyhedral(&self) -> bool {
        matches!(self, SetExpr::Halfspace { .. } | SetExpr::Box { .. } | SetExpr::Polytope { .. })
    }

    /// Unit-normalized rows `(a, b)` of a polyhedral variant.
    pub fn rows(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        let unit = |a: &Point, b: f64| {
            let n = a.norm();
            (a.coords().iter().map(|x| x / n).collect::<Vec<f64>>(), b / n)
        };
        match self {
            SetExpr::Halfspace { a, b } => Some(vec![unit(a, *b)]),
            SetExpr::Polytope { rows } => Some(rows.iter().map(|r| unit(&r.a, r.b)).collect()),
            SetExpr::Box { lo, hi } => {
                let d = lo.len();
                let mut out = Vec::new();
                for i in 0..d {
                    if hi[i].is_finite() {
                        let mut a = vec![0.0; d];
                        a[i] = 1.0;
                        out.push((a, hi[i]));
                    }
                    if lo[i].is_finite() {
                        let mut a = vec![0.0; d];
                        a[i] = -1.0;
                        out.push((a, -lo[i]));
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Convex polyhedral pieces whose union is the set, in global coordinates.
    /// Available for polyhedral variants, unions of polyhedral members and the
    /// polyhedral catalog entries.
    pub(crate) fn polyhedral_pieces(&self) -> Option<Vec<Vec<(Vec<f64>, f64)>>> {
        match self {
            SetExpr::Halfspace { .. } | SetExpr::Box { .. } | SetExpr::Polytope { .. } => {
                Some(vec![self.rows()?])
            }
            SetExpr::Union { members } => members.iter().map(|m| m.rows()).collect(),
            SetExpr::Implicit2D { catalog_id, params } => {
                let pieces = catalog_id.pieces()?;
                Some(
                    pieces
                        .into_iter()
                        .map(|rows| translate_rows(rows, params))
                        .collect(),
                )
            }
            SetExpr::Ball { .. } => None,
        }
    }

    /// Member list for unions, the set itself otherwise.
    pub(crate) fn members(&self) -> Vec<&SetExpr> {
        match self {
            SetExpr::Union { members } => members.iter().collect(),
            other => vec![other],
        }
    }

    /// Membership without the dimension check.
    pub(crate) fn contains_unchecked(&self, x: &[f64], eps: f64) -> bool {
        match self {
            SetExpr::Ball { c, r } => {
                let d: f64 = x
                    .iter()
                    .zip(c.coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d <= r + eps
            }
            SetExpr::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(xi, (l, h))| *xi >= l - eps && *xi <= h + eps),
            SetExpr::Halfspace { .. } | SetExpr::Polytope { .. } => rows_contain(&self.rows().unwrap(), x, eps),
            SetExpr::Union { members } => members.iter().any(|m| m.contains_unchecked(x, eps)),
            SetExpr::Implicit2D { catalog_id, params } => {
                let p = local_coords(x, params);
                match catalog_id.pieces() {
                    Some(pieces) => pieces.iter().any(|rows| rows_contain(rows, &p, eps)),
                    None => cusp_contains(&p, eps),
                }
            }
        }
    }

    /// `x` lies in the interior of the set.
    pub fn interior_contains(&self, x: &Point) -> bool {
        const M: f64 = 1e-12;
        let x = x.coords();
        match self {
            SetExpr::Ball { c, r } => {
                let d = norm(&x.iter().zip(c.coords()).map(|(a, b)| a - b).collect::<Vec<_>>());
                d < r - M
            }
            SetExpr::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(xi, (l, h))| *xi > l + M && *xi < h - M),
            SetExpr::Halfspace { .. } | SetExpr::Polytope { .. } => self
                .rows()
                .unwrap()
                .iter()
                .all(|(a, b)| dot(a, x) < b - M),
            SetExpr::Union { members } => members.iter().any(|m| m.interior_contains(&Point::from(x))),
            SetExpr::Implicit2D { catalog_id, params } => {
                let p = local_coords(x, params);
                match catalog_id.pieces() {
                    Some(pieces) => pieces
                        .iter()
                        .any(|rows| rows.iter().all(|(a, b)| dot(a, &p) < b - M)),
                    None => cusp_interior(&p),
                }
            }
        }
    }

    /// Axis-aligned bounding box, when the set is bounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            SetExpr::Ball { c, r } => Some((
                c.coords().iter().map(|x| x - r).collect(),
                c.coords().iter().map(|x| x + r).collect(),
            )),
            SetExpr::Box { lo, hi } => {
                (lo.iter().chain(hi).all(|x| x.is_finite())).then(|| (lo.clone(), hi.clone()))
            }
            SetExpr::Polytope { .. } => {
                let p = Polyhedron::from_rows(&self.rows()?, self.dim())?;
                if !p.is_bounded() {
                    return None;
                }
                let d = self.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for v in &p.vertices {
                    for i in 0..d {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                Some((lo, hi))
            }
            SetExpr::Union { members } => {
                let boxes: Option<Vec<_>> = members.iter().map(|m| m.bounding_box()).collect();
                let boxes = boxes?;
                let d = self.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for (l, h) in boxes {
                    for i in 0..d {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                Some((lo, hi))
            }
            SetExpr::Halfspace { .. } | SetExpr::Implicit2D { .. } => None,
        }
    }
}

pub(crate) fn rows_contain(rows: &[(Vec<f64>, f64)], x: &[f64], eps: f64) -> bool {
    rows.iter().all(|(a, b)| dot(a, x) <= b + eps)
}

pub(crate) fn local_coords(x: &[f64], params: &[f64]) -> Vec<f64> {
    if params.len() == 2 {
        vec![x[0] - params[0], x[1] - params[1]]
    } else {
        x.to_vec()
    }
}

fn translate_rows(rows: Vec<(Vec<f64>, f64)>, params: &[f64]) -> Vec<(Vec<f64>, f64)> {
    if params.len() != 2 {
        return rows;
    }
    rows.into_iter()
        .map(|(a, b)| {
            let shift = dot(&a, params);
            (a, b + shift)
        })
        .collect()
}

/// Membership up to `eps` in each defining inequality (balls: `|x - c| <= r + eps`).
pub fn contains(s: &SetExpr, x: &Point, eps: f64) -> Result<bool> {
    check_dim(s.dim(), x.dim())?;
    Ok(s.contains_unchecked(x.coords(), eps))
}

fn unsupported(op: &'static str, s: &SetExpr) -> Error {
    Error::UnsupportedVariant {
        op,
        variant: s.kind(),
    }
}

/// Support function `sup{<x*, w> : w in s}` of a convex variant.
pub fn support(s: &SetExpr, xstar: &Point) -> Result<ExtReal> {
    check_dim(s.dim(), xstar.dim())?;
    let xs = xstar.coords();
    let scale = 1e-12 * xstar.norm().max(1.0);
    match s {
        SetExpr::Ball { c, r } => Ok(ExtReal::Finite(dot(xs, c.coords()) + r * xstar.norm())),
        SetExpr::Box { lo, hi } => {
            let mut total = 0.0;
            for (i, &y) in xs.iter().enumerate() {
                let term = if y > 0.0 {
                    y * hi[i]
                } else if y < 0.0 {
                    y * lo[i]
                } else {
                    0.0
                };
                if term == f64::INFINITY {
                    return Ok(ExtReal::PosInf);
                }
                total += term;
            }
            Ok(ExtReal::Finite(total))
        }
        SetExpr::Halfspace { .. } => {
            let (a, b) = s.rows().unwrap().remove(0);
            let lambda = dot(xs, &a);
            let resid: f64 = norm(&xs.iter().zip(&a).map(|(x, ai)| x - lambda * ai).collect::<Vec<_>>());
            if resid <= scale && lambda >= -scale {
                Ok(ExtReal::Finite(lambda.max(0.0) * b))
            } else {
                Ok(ExtReal::PosInf)
            }
        }
        SetExpr::Polytope { .. } => {
            let p = Polyhedron::from_rows(&s.rows().unwrap(), s.dim())
                .ok_or_else(|| Error::NotComputable("polytope vertex enumeration failed".into()))?;
            if p.rays.iter().any(|r| dot(xs, r.coords()) > scale)
                || p.lineality.iter().any(|l| dot(xs, l.coords()).abs() > scale)
            {
                return Ok(ExtReal::PosInf);
            }
            let best = p
                .vertices
                .iter()
                .map(|v| dot(xs, v.coords()))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(ExtReal::Finite(best))
        }
        SetExpr::Union { .. } | SetExpr::Implicit2D { .. } => Err(unsupported("support", s)),
    }
}

/// Nearest point of a convex variant.
pub fn euclid_project(s: &SetExpr, x: &Point) -> Result<Point> {
    check_dim(s.dim(), x.dim())?;
    match s {
        SetExpr::Ball { c, r } => {
            let w = x - c;
            let d = w.norm();
            if d <= *r {
                Ok(x.clone())
            } else {
                Ok(c.along(r / d, &w))
            }
        }
        SetExpr::Box { lo, hi } => Ok(Point::new(
            x.coords()
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(xi, (l, h))| xi.max(*l).min(*h))
                .collect(),
        )),
        SetExpr::Halfspace { .. } => {
            let (a, b) = s.rows().unwrap().remove(0);
            let excess = (dot(&a, x.coords()) - b).max(0.0);
            Ok(x.along(-excess, &Point::new(a)))
        }
        SetExpr::Polytope { .. } => project_onto_rows(&s.rows().unwrap(), x.coords())
            .map(Point::new)
            .ok_or_else(|| Error::NotComputable("polytope projection failed".into())),
        SetExpr::Union { .. } | SetExpr::Implicit2D { .. } => Err(unsupported("euclid_project", s)),
    }
}

/// Recession cone `{u : w + l u in s for all w in s, l >= 0}`.
///
/// Exact for every variant except unions, where the intersection of the
/// members' cones is returned flagged as an inner approximation.
pub fn recession_cone(s: &SetExpr) -> GeneratedCone {
    let d = s.dim();
    match s {
        SetExpr::Ball { .. } => GeneratedCone::zero(d),
        SetExpr::Box { lo, hi } => {
            let mut gens = Vec::new();
            for i in 0..d {
                if hi[i] == f64::INFINITY {
                    gens.push(Point::basis(d, i));
                }
                if lo[i] == f64::NEG_INFINITY {
                    gens.push(-&Point::basis(d, i));
                }
            }
            GeneratedCone::new(d, &gens, &[], Exactness::Exact)
        }
        SetExpr::Halfspace { .. } | SetExpr::Polytope { .. } => {
            let rows: Vec<Vec<f64>> = s.rows().unwrap().into_iter().map(|(a, _)| a).collect();
            GeneratedCone::from_hrep(&rows, d, Exactness::Exact)
        }
        SetExpr::Union { members } => {
            let cones: Vec<GeneratedCone> = members.iter().map(recession_cone).collect();
            GeneratedCone::intersect_all(d, &cones).with_exactness(Exactness::InnerApprox)
        }
        SetExpr::Implicit2D { catalog_id, .. } => catalog_id.recession_cone(),
    }
}

/// `v` is certified to lie in the recession cone (exact cones only).
pub fn recession_contains_exact(s: &SetExpr, v: &Point) -> bool {
    let k = recession_cone(s);
    k.exactness().is_exact() && k.contains(v, EPS)
}
