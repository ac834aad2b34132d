//! Cone calculus at a point: convex normal cone, contingent (Bouligand) cone,
//! Dini-Hadamard, Frechet and limiting normal cones.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{
    euclid_project, merge, rows_line_set, CatalogId, Exactness, GeneratedCone, Interval, SetExpr,
    EPS,
};
use crate::point::{dot, Point};
use crate::sampling::random_in_ball;

/// A finite union of generated cones.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeFamily {
    parts: Vec<GeneratedCone>,
    exactness: Exactness,
}

impl ConeFamily {
    pub fn single(cone: GeneratedCone) -> Self {
        let e = cone.exactness();
        ConeFamily {
            parts: vec![cone],
            exactness: e,
        }
    }

    /// Normalizes the union: drops parts contained in other parts and the
    /// zero cone when anything larger is present, then sorts the rest.
    pub fn new(dim: usize, parts: Vec<GeneratedCone>, exactness: Exactness) -> Self {
        let mut kept: Vec<GeneratedCone> = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            let dominated = parts.iter().enumerate().any(|(j, q)| {
                j != i && p.subset_of(q, 1e-9) && (!q.subset_of(p, 1e-9) || j < i)
            });
            if !dominated {
                kept.push(p.clone().with_exactness(exactness));
            }
        }
        if kept.is_empty() {
            kept.push(GeneratedCone::zero(dim).with_exactness(exactness));
        }
        kept.sort_by(|a, b| cone_key(a).partial_cmp(&cone_key(b)).unwrap_or(std::cmp::Ordering::Equal));
        ConeFamily {
            parts: kept,
            exactness,
        }
    }

    pub fn parts(&self) -> &[GeneratedCone] {
        &self.parts
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn contains(&self, y: &Point, tol: f64) -> bool {
        self.parts.iter().any(|p| p.contains(y, tol))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(GeneratedCone::is_zero)
    }

    /// Same union of cones (part-wise matching of canonical forms).
    pub fn approx_eq(&self, other: &ConeFamily, tol: f64) -> bool {
        self.parts.len() == other.parts.len()
            && self
                .parts
                .iter()
                .all(|p| other.parts.iter().any(|q| p.approx_eq(q, tol)))
    }

    /// Intersection of the polars of all parts: the polar of the union.
    pub fn polar(&self) -> GeneratedCone {
        let polars: Vec<GeneratedCone> = self.parts.iter().map(GeneratedCone::polar).collect();
        GeneratedCone::intersect_all(self.dim(), &polars)
    }

    /// `{t : u + t v in union}` treating the family as a closed set.
    pub fn line_set(&self, u: &Point, v: &Point) -> Vec<Interval> {
        let mut ivs = Vec::new();
        for p in &self.parts {
            let rows: Vec<(Vec<f64>, f64)> = p
                .hrep()
                .into_iter()
                .map(|r| {
                    let n = crate::point::norm(&r);
                    (r.iter().map(|x| x / n).collect(), 0.0)
                })
                .collect();
            if let Some(iv) = rows_line_set(&rows, u.coords(), v.coords()) {
                ivs.push(iv);
            }
        }
        merge(ivs)
    }
}

fn cone_key(c: &GeneratedCone) -> Vec<f64> {
    let mut k = vec![c.lineality().len() as f64, c.generators().len() as f64];
    for g in c.generators().iter().chain(c.lineality()) {
        k.extend_from_slice(g.coords());
    }
    k
}

impl Serialize for ConeFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

fn require_member(s: &SetExpr, x: &Point) -> Result<()> {
    check_dim(s.dim(), x.dim())?;
    if s.contains_unchecked(x.coords(), EPS) {
        Ok(())
    } else {
        Err(Error::PointNotInSet)
    }
}

fn active_normals(rows: &[(Vec<f64>, f64)], x: &[f64]) -> Vec<Vec<f64>> {
    rows.iter()
        .filter(|(a, b)| (dot(a, x) - b).abs() <= EPS)
        .map(|(a, _)| a.clone())
        .collect()
}

/// Normal cone of a convex variant at a member point (no checks).
fn convex_normal(s: &SetExpr, x: &[f64]) -> GeneratedCone {
    let d = x.len();
    match s {
        SetExpr::Ball { c, r } => {
            let w = &Point::from(x) - c;
            if w.norm() >= r - EPS {
                GeneratedCone::ray(&w)
            } else {
                GeneratedCone::zero(d)
            }
        }
        _ => {
            let gens: Vec<Point> = active_normals(&s.rows().expect("polyhedral"), x)
                .into_iter()
                .map(Point::new)
                .collect();
            GeneratedCone::new(d, &gens, &[], Exactness::Exact)
        }
    }
}

/// Tangent cone of a convex variant at a member point (no checks).
fn convex_tangent(s: &SetExpr, x: &[f64]) -> GeneratedCone {
    match s {
        SetExpr::Ball { c, r } => {
            let w = &Point::from(x) - c;
            if w.norm() >= r - EPS {
                GeneratedCone::from_hrep(&[w.into_vec()], x.len(), Exactness::Exact)
            } else {
                GeneratedCone::whole(x.len())
            }
        }
        _ => rows_tangent(&s.rows().expect("polyhedral"), x),
    }
}

fn rows_tangent(rows: &[(Vec<f64>, f64)], x: &[f64]) -> GeneratedCone {
    GeneratedCone::from_hrep(&active_normals(rows, x), x.len(), Exactness::Exact)
}

fn rows_normal(rows: &[(Vec<f64>, f64)], x: &[f64]) -> GeneratedCone {
    let gens: Vec<Point> = active_normals(rows, x).into_iter().map(Point::new).collect();
    GeneratedCone::new(x.len(), &gens, &[], Exactness::Exact)
}

/// Local cones of the curved catalog entry at a point of the set.
struct CuspCones {
    tangent: GeneratedCone,
    frechet: GeneratedCone,
    limiting: GeneratedCone,
}

fn cusp_cones(p: &[f64]) -> CuspCones {
    let gap = p[1] + p[0].abs().sqrt();
    if gap > EPS {
        return CuspCones {
            tangent: GeneratedCone::whole(2),
            frechet: GeneratedCone::zero(2),
            limiting: GeneratedCone::zero(2),
        };
    }
    if p[0].abs() <= 1e-14 {
        // The tip: every direction is tangent, normals only arise as limits of
        // the nearly horizontal normals of the two flanks.
        return CuspCones {
            tangent: GeneratedCone::whole(2),
            frechet: GeneratedCone::zero(2),
            limiting: GeneratedCone::line(&Point::from([1.0, 0.0])),
        };
    }
    // Smooth flank: outward normal of the epigraph of -sqrt|x| is (f'(x), -1).
    let slope = -p[0].signum() / (2.0 * p[0].abs().sqrt());
    let n = Point::from([slope, -1.0]);
    let normal = GeneratedCone::ray(&n);
    CuspCones {
        tangent: normal.polar(),
        frechet: normal.clone(),
        limiting: normal,
    }
}

/// Normal cone of a convex variant (halfspace, ball, box, polytope).
pub fn normal_cone_convex(s: &SetExpr, x: &Point) -> Result<GeneratedCone> {
    if !s.is_convex_variant() {
        return Err(Error::UnsupportedVariant {
            op: "normal_cone_convex",
            variant: s.kind(),
        });
    }
    require_member(s, x)?;
    Ok(convex_normal(s, x.coords()))
}

/// Bouligand contingent cone.
pub fn contingent_cone(s: &SetExpr, x: &Point) -> Result<ConeFamily> {
    require_member(s, x)?;
    let d = s.dim();
    let xc = x.coords();
    Ok(match s {
        SetExpr::Union { members } => {
            let parts = members
                .iter()
                .filter(|m| m.contains_unchecked(xc, EPS))
                .map(|m| convex_tangent(m, xc))
                .collect();
            ConeFamily::new(d, parts, Exactness::Exact)
        }
        SetExpr::Implicit2D { catalog_id, params } => {
            let p = crate::geometry::local_coords(xc, params);
            match catalog_id.pieces() {
                Some(pieces) => {
                    let parts = pieces
                        .iter()
                        .filter(|rows| crate::geometry::rows_contain(rows, &p, EPS))
                        .map(|rows| rows_tangent(rows, &p))
                        .collect();
                    ConeFamily::new(d, parts, Exactness::Exact)
                }
                None => ConeFamily::single(cusp_cones(&p).tangent),
            }
        }
        _ => ConeFamily::single(convex_tangent(s, xc)),
    })
}

/// Dini-Hadamard normal cone: the polar of the contingent cone.
pub fn dini_normal_cone(s: &SetExpr, x: &Point) -> Result<GeneratedCone> {
    Ok(contingent_cone(s, x)?.polar())
}

/// Frechet normal cone.
///
/// For unions this is the intersection of the members' normal cones at `x`,
/// which is the polar of the union of their tangent cones.
pub fn frechet_normal_cone(s: &SetExpr, x: &Point) -> Result<GeneratedCone> {
    require_member(s, x)?;
    let d = s.dim();
    let xc = x.coords();
    Ok(match s {
        SetExpr::Union { members } => {
            let normals: Vec<GeneratedCone> = members
                .iter()
                .filter(|m| m.contains_unchecked(xc, EPS))
                .map(|m| convex_normal(m, xc))
                .collect();
            GeneratedCone::intersect_all(d, &normals)
        }
        SetExpr::Implicit2D { catalog_id, params } => {
            let p = crate::geometry::local_coords(xc, params);
            match catalog_id.pieces() {
                Some(pieces) => {
                    let normals: Vec<GeneratedCone> = pieces
                        .iter()
                        .filter(|rows| crate::geometry::rows_contain(rows, &p, EPS))
                        .map(|rows| rows_normal(rows, &p))
                        .collect();
                    GeneratedCone::intersect_all(d, &normals)
                }
                None => cusp_cones(&p).frechet,
            }
        }
        _ => convex_normal(s, xc),
    })
}

/// Limiting (Mordukhovich) normal cone.
///
/// Exact for convex variants, the catalog and planar unions of polyhedral
/// members. Other unions get a sampled estimate flagged as an inner
/// approximation.
pub fn limiting_normal_cone(s: &SetExpr, x: &Point) -> Result<ConeFamily> {
    require_member(s, x)?;
    let d = s.dim();
    let xc = x.coords();
    if s.is_convex_variant() {
        return Ok(ConeFamily::single(convex_normal(s, xc)));
    }
    if let SetExpr::Implicit2D {
        catalog_id: CatalogId::SqrtCusp,
        params,
    } = s
    {
        let p = crate::geometry::local_coords(xc, params);
        return Ok(ConeFamily::single(cusp_cones(&p).limiting));
    }
    if d == 2 {
        if let Some(pieces) = s.polyhedral_pieces() {
            return Ok(planar_polyhedral_limiting(&pieces, xc));
        }
    }
    Ok(sampled_union_limiting(s, xc))
}

/// Limiting normal cone of a planar union of polyhedra.
///
/// Near `x` the set coincides with `x + U K_i` (tangent cones of the pieces
/// through `x`). Along a ray `x + t u` the local picture is the convex set
/// `U_{i : u in K_i} (K_i + R u)`, whose normal cone is
/// `(n_{i : u in K_i} K_i°) n u^perp`. Only boundary rays of some `K_i` give
/// nonzero cones, so the union over those rays plus the Frechet cone at `x`
/// itself is the whole limiting cone.
fn planar_polyhedral_limiting(pieces: &[Vec<(Vec<f64>, f64)>], x: &[f64]) -> ConeFamily {
    let d = x.len();
    let tangents: Vec<GeneratedCone> = pieces
        .iter()
        .filter(|rows| crate::geometry::rows_contain(rows, x, EPS))
        .map(|rows| rows_tangent(rows, x))
        .collect();
    let polars: Vec<GeneratedCone> = tangents.iter().map(GeneratedCone::polar).collect();
    let mut parts = vec![GeneratedCone::intersect_all(d, &polars)];
    for k in tangents.iter().filter(|k| !k.is_whole()) {
        for u in k.spanning_directions() {
            let through: Vec<GeneratedCone> = tangents
                .iter()
                .zip(&polars)
                .filter(|(t, _)| t.contains(&u, 1e-9))
                .map(|(_, p)| p.clone())
                .collect();
            parts.push(GeneratedCone::intersect_all(d, &through).intersect_hyperplane(&u));
        }
    }
    ConeFamily::new(d, parts, Exactness::Exact)
}

/// Sampled limiting cone of a union of convex members: boundary points near
/// `x` are collected by projecting random nearby points onto the members, and
/// the normal cone at each is snapped to its limit at `x`.
fn sampled_union_limiting(s: &SetExpr, x: &[f64]) -> ConeFamily {
    let d = x.len();
    let members = s.members();
    let through: Vec<&SetExpr> = members
        .iter()
        .copied()
        .filter(|m| m.contains_unchecked(x, EPS))
        .collect();
    let normals_at_x: Vec<GeneratedCone> = through.iter().map(|m| convex_normal(m, x)).collect();
    let mut parts = vec![GeneratedCone::intersect_all(d, &normals_at_x)];

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut seen: HashMap<Vec<(usize, Vec<usize>)>, ()> = HashMap::new();
    for &rho in &[1e-4, 1e-6] {
        for _ in 0..600 {
            let w = random_in_ball(&mut rng, d);
            let z: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a + rho * b).collect();
            for m in &through {
                let Ok(y) = euclid_project(m, &Point::from(z.as_slice())) else {
                    continue;
                };
                if through.iter().any(|o| o.interior_contains(&y)) {
                    continue;
                }
                // Members whose boundary carries y, with their active pieces.
                let mut key = Vec::new();
                let mut cones = Vec::new();
                for (j, o) in through.iter().enumerate() {
                    if !o.contains_unchecked(y.coords(), 1e-12) {
                        continue;
                    }
                    match o {
                        SetExpr::Ball { c, .. } => {
                            key.push((j, vec![]));
                            cones.push(GeneratedCone::ray(&(&Point::from(x) - c)));
                        }
                        _ => {
                            let rows = o.rows().expect("polyhedral");
                            let act: Vec<usize> = (0..rows.len())
                                .filter(|&i| (dot(&rows[i].0, y.coords()) - rows[i].1).abs() <= 1e-10)
                                .collect();
                            let gens: Vec<Point> =
                                act.iter().map(|&i| Point::new(rows[i].0.clone())).collect();
                            key.push((j, act));
                            cones.push(GeneratedCone::new(d, &gens, &[], Exactness::Exact));
                        }
                    }
                }
                if cones.is_empty() || seen.insert(key, ()).is_some() {
                    continue;
                }
                parts.push(GeneratedCone::intersect_all(d, &cones));
            }
        }
    }
    ConeFamily::new(d, parts, Exactness::InnerApprox)
}
