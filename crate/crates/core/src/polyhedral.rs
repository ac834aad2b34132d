//! Conversions between inequality (H) and generator (V) descriptions of
//! polyhedral cones and polyhedra in low dimension.
//!
//! Extreme rays are found by brute-force enumeration of (k-1)-subsets of the
//! constraint rows, which is exact and fast enough at d <= 9.

use serde::Serialize;

use crate::linalg::{canonical_span, null_space, snap};
use crate::point::{dot, norm, Point};

/// Tolerance for "this inequality holds" on unit rows and unit generators.
pub(crate) const FEAS_TOL: f64 = 1e-9;

/// Generators of `{y : <r, y> <= 0 for all rows r}`: (extreme rays, lineality basis).
///
/// Rays are unit vectors orthogonal to the lineality space.
pub(crate) fn hcone_to_vrep(rows: &[Vec<f64>], dim: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = unit_rows(rows);
    let lin = null_space(&rows, dim, 1e-10);
    let k = dim - lin.len();
    if k == 0 {
        return (Vec::new(), lin);
    }
    let mut rays: Vec<Vec<f64>> = Vec::new();
    let mut push = |y: Vec<f64>| {
        if !rays.iter().any(|r| max_abs_diff(r, &y) <= FEAS_TOL) {
            rays.push(y);
        }
    };
    if k == 1 {
        // Pointed part is one-dimensional: a ray or a line (already in lin).
        let ortho = null_space(&lin, dim, 1e-10);
        let y = &ortho[0];
        for sign in [1.0, -1.0] {
            let ys: Vec<f64> = y.iter().map(|x| sign * x).collect();
            if rows.iter().all(|r| dot(r, &ys) <= FEAS_TOL) {
                push(ys);
            }
        }
        return (rays, lin);
    }
    for subset in Combinations::new(rows.len(), k - 1) {
        let mut m: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].clone()).collect();
        m.extend(lin.iter().cloned());
        let ns = null_space(&m, dim, 1e-10);
        if ns.len() != 1 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let ys: Vec<f64> = ns[0].iter().map(|x| sign * x).collect();
            if rows.iter().all(|r| dot(r, &ys) <= FEAS_TOL) {
                push(ys);
            }
        }
    }
    (rays, lin)
}

fn unit_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let n = norm(r);
        if n < 1e-14 {
            continue;
        }
        let u: Vec<f64> = r.iter().map(|x| x / n).collect();
        if !out.iter().any(|o| max_abs_diff(o, &u) <= 1e-12) {
            out.push(u);
        }
    }
    out
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Iterator over k-subsets of `0..n` in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// A polyhedron `conv(vertices) + cone(rays) + span(lineality)` in canonical form.
///
/// Canonical means: vertices and rays deduplicated and sorted, rays unit
/// length, lineality in unit row-echelon form. Two canonical descriptions of
/// the same set agree up to roundoff, which [`Polyhedron::approx_eq`] tolerates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyhedron {
    pub vertices: Vec<Point>,
    pub rays: Vec<Point>,
    pub lineality: Vec<Point>,
}

impl Polyhedron {
    /// V-representation of `{x : <a_i, x> <= b_i}`; `None` if empty.
    pub fn from_rows(rows: &[(Vec<f64>, f64)], dim: usize) -> Option<Polyhedron> {
        // Homogenize: (x, s) with <a, x> - b s <= 0 and s >= 0.
        let mut h: Vec<Vec<f64>> = rows
            .iter()
            .map(|(a, b)| {
                let mut r = a.clone();
                r.push(-b);
                r
            })
            .collect();
        let mut s_row = vec![0.0; dim + 1];
        s_row[dim] = -1.0;
        h.push(s_row);
        let (gens, lin) = hcone_to_vrep(&h, dim + 1);

        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for g in gens {
            let s = g[dim];
            if s > 1e-12 {
                vertices.push(g[..dim].iter().map(|x| x / s).collect::<Vec<f64>>());
            } else if norm(&g[..dim]) > 1e-12 {
                rays.push(g[..dim].to_vec());
            }
        }
        if vertices.is_empty() {
            // The pointed part has no vertex: either the set is empty, or it
            // has lineality and its "vertex" sits in the lineality space.
            if lin.is_empty() {
                return None;
            }
            // Feasible iff some point of the lineality-reduced system exists.
            let p = crate::linalg::project_onto_rows(rows, &vec![0.0; dim])?;
            vertices.push(p);
        }
        let lineality: Vec<Vec<f64>> = lin.iter().map(|l| l[..dim].to_vec()).collect();
        Some(Polyhedron::canonical(vertices, rays, lineality, dim))
    }

    pub(crate) fn canonical(
        vertices: Vec<Vec<f64>>,
        rays: Vec<Vec<f64>>,
        lineality: Vec<Vec<f64>>,
        dim: usize,
    ) -> Polyhedron {
        let lin = canonical_span(&lineality, dim);
        // Reduce vertices and rays modulo the lineality space.
        let reduce = |v: &[f64]| -> Vec<f64> {
            let mut out = v.to_vec();
            for l in &lin {
                let c = dot(&out, l) / dot(l, l);
                for (o, li) in out.iter_mut().zip(l) {
                    *o -= c * li;
                }
            }
            out
        };
        let mut vs: Vec<Vec<f64>> = Vec::new();
        for v in &vertices {
            let r: Vec<f64> = reduce(v).into_iter().map(snap).collect();
            if !vs.iter().any(|o| max_abs_diff(o, &r) <= FEAS_TOL) {
                vs.push(r);
            }
        }
        let mut rs: Vec<Vec<f64>> = Vec::new();
        for r in &rays {
            let r = reduce(r);
            let n = norm(&r);
            if n < 1e-12 {
                continue;
            }
            let u: Vec<f64> = r.iter().map(|x| snap(x / n)).collect();
            if !rs.iter().any(|o| max_abs_diff(o, &u) <= FEAS_TOL) {
                rs.push(u);
            }
        }
        sort_lex(&mut vs);
        sort_lex(&mut rs);
        Polyhedron {
            vertices: vs.into_iter().map(Point::new).collect(),
            rays: rs.into_iter().map(Point::new).collect(),
            lineality: lin.into_iter().map(Point::new).collect(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// Set equality of two canonical descriptions, up to `tol` per coordinate.
    pub fn approx_eq(&self, other: &Polyhedron, tol: f64) -> bool {
        same_vectors(&self.vertices, &other.vertices, tol)
            && same_vectors(&self.rays, &other.rays, tol)
            && same_vectors(&self.lineality, &other.lineality, tol)
    }
}

/// Multiset equality of two short vector lists within `tol`.
pub(crate) fn same_vectors(a: &[Point], b: &[Point], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    'outer: for x in a {
        for (j, y) in b.iter().enumerate() {
            if !used[j] && max_abs_diff(x.coords(), y.coords()) <= tol {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Lexicographic order with roundoff-sized differences treated as ties.
pub(crate) fn sort_lex(vs: &mut [Vec<f64>]) {
    vs.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            if (x - y).abs() > 1e-9 {
                return x.total_cmp(y);
            }
        }
        std::cmp::Ordering::Equal
    });
}
