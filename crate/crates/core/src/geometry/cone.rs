use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::linalg::snap;
use crate::point::{dot, norm, Point};
use crate::polyhedral::{hcone_to_vrep, same_vectors, sort_lex};

/// Whether a computed object is the true set or only a subset of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    InnerApprox,
}

impl Exactness {
    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }

    /// The weaker of two flags.
    pub fn and(self, other: Exactness) -> Exactness {
        if self.is_exact() && other.is_exact() {
            Exactness::Exact
        } else {
            Exactness::InnerApprox
        }
    }
}

/// A finitely generated cone `{sum l_i g_i + sum m_j w_j : l >= 0}` in R^d.
///
/// Always stored in minimal canonical form: extreme rays (unit, orthogonal to
/// the lineality space, sorted) plus a row-echelon lineality basis. The
/// inequality description is kept alongside for cheap membership tests.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedCone {
    dim: usize,
    generators: Vec<Point>,
    lineality: Vec<Point>,
    /// Extreme rays and lineality of the polar cone.
    polar_rays: Vec<Vec<f64>>,
    polar_lin: Vec<Vec<f64>>,
    exactness: Exactness,
}

impl GeneratedCone {
    /// The cone generated by `generators` (nonnegative combinations) and
    /// `lineality` (arbitrary combinations).
    pub fn new(dim: usize, generators: &[Point], lineality: &[Point], exactness: Exactness) -> Self {
        let mut rows: Vec<Vec<f64>> = generators.iter().map(|g| g.coords().to_vec()).collect();
        for l in lineality {
            rows.push(l.coords().to_vec());
            rows.push(l.coords().iter().map(|x| -x).collect());
        }
        // rows are the H-description of the polar.
        let (p_rays, p_lin) = hcone_to_vrep(&rows, dim);
        Self::from_polar_vrep(dim, p_rays, p_lin, exactness)
    }

    /// The cone `{y : <r, y> <= 0 for every row r}`.
    pub fn from_hrep(rows: &[Vec<f64>], dim: usize, exactness: Exactness) -> Self {
        let (gens, lin) = hcone_to_vrep(rows, dim);
        let mut polar_rows = gens.clone();
        for l in &lin {
            polar_rows.push(l.clone());
            polar_rows.push(l.iter().map(|x| -x).collect());
        }
        let (p_rays, p_lin) = hcone_to_vrep(&polar_rows, dim);
        Self::assemble(dim, gens, lin, p_rays, p_lin, exactness)
    }

    fn from_polar_vrep(
        dim: usize,
        p_rays: Vec<Vec<f64>>,
        p_lin: Vec<Vec<f64>>,
        exactness: Exactness,
    ) -> Self {
        let mut rows = p_rays.clone();
        for l in &p_lin {
            rows.push(l.clone());
            rows.push(l.iter().map(|x| -x).collect());
        }
        let (gens, lin) = hcone_to_vrep(&rows, dim);
        Self::assemble(dim, gens, lin, p_rays, p_lin, exactness)
    }

    fn assemble(
        dim: usize,
        gens: Vec<Vec<f64>>,
        lin: Vec<Vec<f64>>,
        p_rays: Vec<Vec<f64>>,
        p_lin: Vec<Vec<f64>>,
        exactness: Exactness,
    ) -> Self {
        let lin = crate::linalg::canonical_span(&lin, dim);
        let mut gens: Vec<Vec<f64>> = gens
            .into_iter()
            .map(|g| g.into_iter().map(snap).collect())
            .collect();
        sort_lex(&mut gens);
        GeneratedCone {
            dim,
            generators: gens.into_iter().map(Point::new).collect(),
            lineality: lin.into_iter().map(Point::new).collect(),
            polar_rays: p_rays,
            polar_lin: p_lin,
            exactness,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, &[], &[], Exactness::Exact)
    }

    pub fn whole(dim: usize) -> Self {
        let basis: Vec<Point> = (0..dim).map(|i| Point::basis(dim, i)).collect();
        Self::new(dim, &[], &basis, Exactness::Exact)
    }

    /// `cone{g}`.
    pub fn ray(g: &Point) -> Self {
        Self::new(g.dim(), std::slice::from_ref(g), &[], Exactness::Exact)
    }

    /// `span{l}`.
    pub fn line(l: &Point) -> Self {
        Self::new(l.dim(), &[], std::slice::from_ref(l), Exactness::Exact)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn lineality(&self) -> &[Point] {
        &self.lineality
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn with_exactness(mut self, e: Exactness) -> Self {
        self.exactness = e;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.lineality.len() == self.dim
    }

    /// Rows `r` with `cone = {y : <r, y> <= 0}` (equalities appear as `+-` pairs).
    pub fn hrep(&self) -> Vec<Vec<f64>> {
        let mut rows = self.polar_rays.clone();
        for l in &self.polar_lin {
            rows.push(l.clone());
            rows.push(l.iter().map(|x| -x).collect());
        }
        rows
    }

    /// Membership with a tolerance relative to `|y|`.
    pub fn contains(&self, y: &Point, tol: f64) -> bool {
        let scale = tol * y.norm().max(1.0);
        self.polar_rays.iter().all(|r| dot(r, y.coords()) <= scale)
            && self.polar_lin.iter().all(|l| dot(l, y.coords()).abs() <= scale)
    }

    /// `y` in the interior: strictly inside every facet of a full-dimensional cone.
    pub fn interior_contains(&self, y: &Point, margin: f64) -> bool {
        self.polar_lin.is_empty() && self.polar_rays.iter().all(|r| dot(r, y.coords()) < -margin)
    }

    /// Distance from an interior point `y` to the boundary (`+inf` for the whole space).
    pub fn boundary_distance(&self, y: &Point) -> f64 {
        if self.is_whole() {
            return f64::INFINITY;
        }
        if !self.polar_lin.is_empty() {
            return 0.0;
        }
        self.polar_rays
            .iter()
            .map(|r| -dot(r, y.coords()) / norm(r))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    /// The polar cone `{y : <y, g> <= 0 for all g in self}`.
    pub fn polar(&self) -> GeneratedCone {
        let mut p_rays: Vec<Vec<f64>> = self.generators.iter().map(|g| g.coords().to_vec()).collect();
        sort_lex(&mut p_rays);
        let p_lin: Vec<Vec<f64>> = self.lineality.iter().map(|l| l.coords().to_vec()).collect();
        Self::assemble(
            self.dim,
            self.polar_rays.clone(),
            self.polar_lin.clone(),
            p_rays,
            p_lin,
            self.exactness,
        )
    }

    pub fn intersect(&self, other: &GeneratedCone) -> GeneratedCone {
        let mut rows = self.hrep();
        rows.extend(other.hrep());
        Self::from_hrep(&rows, self.dim, self.exactness.and(other.exactness))
    }

    pub fn intersect_all(dim: usize, cones: &[GeneratedCone]) -> GeneratedCone {
        let mut rows = Vec::new();
        let mut ex = Exactness::Exact;
        for c in cones {
            rows.extend(c.hrep());
            ex = ex.and(c.exactness);
        }
        Self::from_hrep(&rows, dim, ex)
    }

    /// Intersection with the hyperplane `{y : <y, n> = 0}`.
    pub fn intersect_hyperplane(&self, n: &Point) -> GeneratedCone {
        let mut rows = self.hrep();
        rows.push(n.coords().to_vec());
        rows.push(n.coords().iter().map(|x| -x).collect());
        Self::from_hrep(&rows, self.dim, self.exactness)
    }

    /// Every generator and lineality direction of `self` lies in `other`.
    pub fn subset_of(&self, other: &GeneratedCone, tol: f64) -> bool {
        self.generators.iter().all(|g| other.contains(g, tol))
            && self
                .lineality
                .iter()
                .all(|l| other.contains(l, tol) && other.contains(&-l, tol))
    }

    /// Set equality of canonical forms (generators up to `tol` per coordinate).
    pub fn approx_eq(&self, other: &GeneratedCone, tol: f64) -> bool {
        self.dim == other.dim
            && same_vectors(&self.generators, &other.generators, tol)
            && same_vectors(&self.lineality, &other.lineality, tol)
    }

    /// A random element: nonnegative weights on generators, free weights on lineality.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Point {
        let mut y = vec![0.0; self.dim];
        for g in &self.generators {
            let w: f64 = rng.gen::<f64>() * scale;
            for (yi, gi) in y.iter_mut().zip(g.coords()) {
                *yi += w * gi;
            }
        }
        for l in &self.lineality {
            let w: f64 = (rng.gen::<f64>() * 2.0 - 1.0) * scale;
            for (yi, li) in y.iter_mut().zip(l.coords()) {
                *yi += w * li;
            }
        }
        Point::new(y)
    }

    /// Nonzero directions spanning the cone: generators and `+-` lineality.
    pub fn spanning_directions(&self) -> Vec<Point> {
        let mut out = self.generators.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(-l);
        }
        out
    }
}

impl Serialize for GeneratedCone {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GeneratedCone", 3)?;
        st.serialize_field("generators", &self.generators)?;
        st.serialize_field("lineality", &self.lineality)?;
        st.serialize_field("exact", &self.exactness.is_exact())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[f64]) -> Point {
        Point::from(v)
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let c = GeneratedCone::new(
            2,
            &[p(&[1.0, 0.0]), p(&[0.0, 1.0]), p(&[1.0, 1.0]), p(&[2.0, 0.0])],
            &[],
            Exactness::Exact,
        );
        assert_eq!(c.generators().len(), 2);
        assert_eq!(c.generators()[0].coords(), &[0.0, 1.0]);
        assert_eq!(c.generators()[1].coords(), &[1.0, 0.0]);
    }

    #[test]
    fn opposite_generators_become_lineality() {
        let c = GeneratedCone::new(2, &[p(&[0.0, 1.0]), p(&[0.0, -3.0])], &[], Exactness::Exact);
        assert!(c.generators().is_empty());
        assert_eq!(c.lineality().len(), 1);
        assert_eq!(c.lineality()[0].coords(), &[0.0, 1.0]);
    }

    #[test]
    fn polar_of_quadrant_is_opposite_quadrant() {
        let c = GeneratedCone::new(2, &[p(&[1.0, 0.0]), p(&[0.0, 1.0])], &[], Exactness::Exact);
        let pc = c.polar();
        let expected = GeneratedCone::new(2, &[p(&[-1.0, 0.0]), p(&[0.0, -1.0])], &[], Exactness::Exact);
        assert!(pc.approx_eq(&expected, 1e-12));
        assert!(pc.polar().approx_eq(&c, 1e-12));
    }

    #[test]
    fn zero_and_whole_are_polar() {
        let z = GeneratedCone::zero(3);
        assert!(z.is_zero());
        assert!(z.polar().is_whole());
        assert!(GeneratedCone::whole(3).polar().is_zero());
    }

    #[test]
    fn membership_and_interior() {
        let c = GeneratedCone::new(2, &[p(&[1.0, 1.0]), p(&[-1.0, 1.0])], &[], Exactness::Exact);
        assert!(c.contains(&p(&[0.0, 1.0]), 1e-12));
        assert!(c.contains(&p(&[1.0, 1.0]), 1e-12));
        assert!(!c.contains(&p(&[1.0, 0.5]), 1e-12));
        assert!(c.interior_contains(&p(&[0.0, 1.0]), 1e-12));
        assert!(!c.interior_contains(&p(&[1.0, 1.0]), 1e-12));
        let dist = c.boundary_distance(&p(&[0.0, 1.0]));
        assert!((dist - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn intersection_of_two_halfplanes() {
        let a = GeneratedCone::from_hrep(&[vec![-1.0, 0.0]], 2, Exactness::Exact);
        let b = GeneratedCone::from_hrep(&[vec![0.0, -1.0]], 2, Exactness::Exact);
        let q = a.intersect(&b);
        let expected = GeneratedCone::new(2, &[p(&[1.0, 0.0]), p(&[0.0, 1.0])], &[], Exactness::Exact);
        assert!(q.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn samples_are_members() {
        let c = GeneratedCone::new(
            3,
            &[p(&[1.0, 0.0, 1.0]), p(&[0.0, 1.0, 1.0])],
            &[p(&[1.0, -1.0, 0.0])],
            Exactness::Exact,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(c.contains(&c.sample(&mut rng, 5.0), 1e-9));
        }
    }

    #[test]
    fn serializes_with_exact_flag() {
        let c = GeneratedCone::ray(&p(&[0.0, 2.0]));
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"generators":[[0.0,1.0]],"lineality":[],"exact":true}"#);
    }
}
