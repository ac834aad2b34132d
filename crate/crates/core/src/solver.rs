//! Directional location problems: minimize `S(x) = sum_i T_{v_i}(x; S_i)`
//! (or `max_i`) over a convex constraint set, by projected subgradient, with
//! optimality certificates and existence/uniqueness prechecks.

#[cfg(debug_assertions)]
use rand::SeedableRng;
#[cfg(debug_assertions)]
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::normal_cone_convex;
use crate::error::{check_dim, Error, Result};
use crate::ext::{inf_f64, ExtReal};
use crate::geometry::{contains, euclid_project, recession_cone, SetExpr, EPS};
use crate::linalg::rank;
use crate::mintime::{check_direction, min_time_unchecked};
use crate::point::{Point, MAX_DIM};
use crate::polyhedral::Polyhedron;
#[cfg(debug_assertions)]
use crate::sampling::random_in_ball;
use crate::subdiff::{
    convex_subdifferential, limiting_subdifferential, select_subgradient, DualSlice,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Sum,
    Max,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub set: SetExpr,
    pub direction: Point,
}

/// A location problem: targets `(S_i, v_i)`, constraint `S_0`, objective.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub constraint: SetExpr,
    pub targets: Vec<Target>,
    pub objective: Objective,
}

impl ProblemSpec {
    pub fn new(constraint: SetExpr, targets: Vec<Target>, objective: Objective) -> Result<Self> {
        let p = ProblemSpec {
            dimension: constraint.dim(),
            constraint,
            targets,
            objective,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidProblem(format!("dimension must be 1..={MAX_DIM}")));
        }
        if self.targets.is_empty() {
            return Err(Error::InvalidProblem("targets must be nonempty".into()));
        }
        check_dim(d, self.constraint.dim())?;
        if !self.constraint.is_convex_variant() {
            return Err(Error::InvalidProblem(
                "constraint must be a halfspace, ball, box or polytope".into(),
            ));
        }
        for t in &self.targets {
            check_dim(d, t.set.dim())?;
            check_direction(&t.set, &t.direction)?;
        }
        Ok(())
    }

    pub fn all_convex(&self) -> bool {
        self.targets.iter().all(|t| t.set.is_convex())
    }
}

/// Step-size rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Step {
    /// `gamma0 / sqrt(k)`
    Diminishing { gamma0: f64 },
    Constant { gamma: f64 },
    /// `(S(x_k) - f_star) / |g_k|^2`
    Polyak { f_star: f64 },
}

impl Default for Step {
    fn default() -> Self {
        Step::Diminishing { gamma0: 1.0 }
    }
}

fn default_max_iters() -> usize {
    5000
}

fn default_tol() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOptions {
    /// Starting point; the origin when absent.
    #[serde(default)]
    pub x0: Option<Point>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub step: Step,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trace: bool,
    /// Allow nonconvex targets (limiting subgradients, no guarantees).
    #[serde(default)]
    pub heuristic: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            x0: None,
            max_iters: default_max_iters(),
            step: Step::default(),
            tol: default_tol(),
            seed: 0,
            trace: false,
            heuristic: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidProblem(m.into()));
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        match self.step {
            Step::Diminishing { gamma0: g } | Step::Constant { gamma: g } if !(g > 0.0 && g.is_finite()) => {
                bad("step size must be positive")
            }
            Step::Polyak { f_star } if !f_star.is_finite() => bad("f_star must be finite"),
            _ => Ok(()),
        }
    }
}

/// The on-disk problem document: a problem plus optional solver options.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    /// Defaults to the whole space.
    #[serde(default)]
    pub constraint: Option<SetExpr>,
    pub targets: Vec<Target>,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default)]
    pub solver: Option<SolveOptions>,
}

impl ProblemFile {
    pub fn into_parts(self) -> Result<(ProblemSpec, SolveOptions)> {
        let d = self.dimension;
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidProblem(format!("dimension must be 1..={MAX_DIM}")));
        }
        let constraint = match self.constraint {
            Some(c) => c,
            None => SetExpr::boxed(vec![f64::NEG_INFINITY; d], vec![f64::INFINITY; d])?,
        };
        let p = ProblemSpec {
            dimension: d,
            constraint,
            targets: self.targets,
            objective: self.objective,
        };
        p.validate()?;
        let o = self.solver.unwrap_or_default();
        o.validate()?;
        if let Some(x0) = &o.x0 {
            check_dim(d, x0.dim())?;
        }
        Ok((p, o))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    IterationCap,
    InfeasibleStart,
    StalledEmptySubdifferential,
    /// Every trial step left the domain of `S` after 30 halvings.
    StalledDomain,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub k: usize,
    pub x: Point,
    #[serde(serialize_with = "inf_f64::serialize")]
    pub value: f64,
    #[serde(serialize_with = "inf_f64::serialize")]
    pub best: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub best_x: Point,
    #[serde(serialize_with = "inf_f64::serialize")]
    pub best_value: f64,
    pub iterations_used: usize,
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

fn objective_unchecked(p: &ProblemSpec, x: &Point) -> f64 {
    let vals = p
        .targets
        .iter()
        .map(|t| min_time_unchecked(&t.set, &t.direction, x).to_f64());
    match p.objective {
        Objective::Sum => vals.sum(),
        Objective::Max => vals.fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `S(x)`: the sum (or max) of the targets' minimal times.
pub fn evaluate_objective(p: &ProblemSpec, x: &Point) -> Result<ExtReal> {
    check_dim(p.dimension, x.dim())?;
    Ok(ExtReal::from_f64(objective_unchecked(p, x)))
}

fn target_slice(t: &Target, x: &Point, heuristic: bool) -> Result<DualSlice> {
    if heuristic && !t.set.is_convex() {
        limiting_subdifferential(&t.set, &t.direction, x)
    } else {
        convex_subdifferential(&t.set, &t.direction, x)
    }
}

/// A subgradient of `S` at `x`, `None` when a needed slice is empty.
fn subgradient(p: &ProblemSpec, x: &Point, heuristic: bool) -> Result<Option<Point>> {
    let d = p.dimension;
    match p.objective {
        Objective::Sum => {
            let mut g = Point::zeros(d);
            for t in &p.targets {
                match select_subgradient(&target_slice(t, x, heuristic)?) {
                    Some(s) => g = &g + &s,
                    None => return Ok(None),
                }
            }
            Ok(Some(g))
        }
        Objective::Max => {
            let vals: Vec<f64> = p
                .targets
                .iter()
                .map(|t| min_time_unchecked(&t.set, &t.direction, x).to_f64())
                .collect();
            let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let i = vals.iter().position(|&v| v == top).expect("nonempty targets");
            Ok(select_subgradient(&target_slice(&p.targets[i], x, heuristic)?))
        }
    }
}

/// The subgradient inequality `S(y) >= S(x) + <g, y - x>` at random probes.
#[cfg(debug_assertions)]
fn debug_check_subgradient(p: &ProblemSpec, x: &Point, fx: f64, g: &Point, rng: &mut ChaCha8Rng) {
    for _ in 0..20 {
        let w = random_in_ball(rng, p.dimension);
        let y = x.along(1.0, &Point::new(w));
        let fy = objective_unchecked(p, &y);
        debug_assert!(
            fy >= fx + g.dot(&(&y - x)) - 1e-9 * (1.0 + fx.abs()),
            "subgradient inequality violated at {x}"
        );
    }
}

/// Projected subgradient method.
///
/// Trial points with infinite objective or an empty subdifferential are
/// rejected and retried with half the step, at most 30 times.
pub fn solve(p: &ProblemSpec, o: &SolveOptions) -> Result<SolveReport> {
    p.validate()?;
    o.validate()?;
    if !o.heuristic && !p.all_convex() {
        return Err(Error::InvalidProblem(
            "nonconvex targets need the heuristic option".into(),
        ));
    }
    let d = p.dimension;
    let x0 = o.x0.clone().unwrap_or_else(|| Point::zeros(d));
    check_dim(d, x0.dim())?;
    let mut x = euclid_project(&p.constraint, &x0)?;
    let mut fx = objective_unchecked(p, &x);
    let mut best_x = x.clone();
    let mut best = fx;
    let mut trace = o.trace.then(Vec::new);
    if let Some(tr) = trace.as_mut() {
        tr.push(TraceEntry { k: 0, x: x.clone(), value: fx, best });
    }
    if !fx.is_finite() {
        return Ok(SolveReport {
            best_x,
            best_value: best,
            iterations_used: 0,
            status: SolveStatus::InfeasibleStart,
            trace,
        });
    }
    #[cfg(debug_assertions)]
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);

    let mut history = vec![best];
    let mut status = SolveStatus::IterationCap;
    let mut used = 0;
    let Some(mut g) = subgradient(p, &x, o.heuristic)? else {
        return Ok(SolveReport {
            best_x,
            best_value: best,
            iterations_used: 0,
            status: SolveStatus::StalledEmptySubdifferential,
            trace,
        });
    };
    for k in 1..=o.max_iters {
        used = k;
        #[cfg(debug_assertions)]
        if !o.heuristic {
            debug_check_subgradient(p, &x, fx, &g, &mut rng);
        }
        let gn2 = g.norm_sq();
        if gn2 == 0.0 {
            status = SolveStatus::Converged;
            break;
        }
        let mut gamma = match o.step {
            Step::Diminishing { gamma0 } => gamma0 / (k as f64).sqrt(),
            Step::Constant { gamma } => gamma,
            Step::Polyak { f_star } => ((fx - f_star).max(0.0) / gn2).max(1e-12),
        };
        let mut accepted = None;
        for _ in 0..=30 {
            let trial = euclid_project(&p.constraint, &x.along(-gamma, &g))?;
            let ft = objective_unchecked(p, &trial);
            if ft.is_finite() {
                if let Some(gt) = subgradient(p, &trial, o.heuristic)? {
                    accepted = Some((trial, ft, gt));
                    break;
                }
            }
            gamma *= 0.5;
        }
        let Some((nx, nf, ng)) = accepted else {
            status = SolveStatus::StalledDomain;
            break;
        };
        x = nx;
        fx = nf;
        g = ng;
        if fx < best {
            best = fx;
            best_x = x.clone();
        }
        history.push(best);
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceEntry { k, x: x.clone(), value: fx, best });
        }
        if k >= 100 && history[k - 100] - best < o.tol {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(SolveReport {
        best_x,
        best_value: best,
        iterations_used: used,
        status,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetCheck {
    pub cone_membership: bool,
    pub v_constraint_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub multipliers: Vec<Point>,
    pub in_set_indices: Vec<usize>,
    pub out_set_indices: Vec<usize>,
    /// `min |sum x_i* + n0|` over `n0 in N(x; S_0)` and the slices.
    #[serde(serialize_with = "inf_f64::serialize")]
    pub residual: f64,
    pub per_target_checks: Vec<TargetCheck>,
    pub certified: bool,
}

/// Coefficient block of the certificate program.
enum Block {
    /// Convex weights on vertices.
    Simplex(Vec<Point>),
    /// Nonnegative weights.
    Cone(Vec<Point>),
    /// Free weights.
    Span(Vec<Point>),
}

fn project_simplex(w: &mut [f64]) {
    let mut u: Vec<f64> = w.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in w.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Minimizes `|sum of block combinations|` by accelerated projected gradient.
/// Returns the per-block combinations at the minimizer.
fn min_norm_sum(blocks: &[Block], d: usize, iters: usize) -> Vec<Point> {
    let vecs = |b: &Block| -> Vec<Point> {
        match b {
            Block::Simplex(v) | Block::Cone(v) | Block::Span(v) => v.clone(),
        }
    };
    let cols: Vec<Vec<Point>> = blocks.iter().map(vecs).collect();
    let lip: f64 = cols.iter().flatten().map(Point::norm_sq).sum::<f64>().max(1e-300);
    let mut w: Vec<Vec<f64>> = blocks
        .iter()
        .map(|b| match b {
            Block::Simplex(v) => vec![1.0 / v.len() as f64; v.len()],
            Block::Cone(v) | Block::Span(v) => vec![0.0; v.len()],
        })
        .collect();
    let combine = |w: &[Vec<f64>]| -> Vec<Point> {
        cols.iter()
            .zip(w)
            .map(|(c, wi)| {
                let mut acc = Point::zeros(d);
                for (g, a) in c.iter().zip(wi) {
                    acc = acc.along(*a, g);
                }
                acc
            })
            .collect()
    };
    let total = |parts: &[Point]| parts.iter().fold(Point::zeros(d), |a, b| &a + b);
    let project = |w: &mut Vec<Vec<f64>>| {
        for (b, wi) in blocks.iter().zip(w.iter_mut()) {
            match b {
                Block::Simplex(_) => project_simplex(wi),
                Block::Cone(_) => wi.iter_mut().for_each(|x| *x = x.max(0.0)),
                Block::Span(_) => {}
            }
        }
    };
    let mut y = w.clone();
    let mut t = 1.0_f64;
    for _ in 0..iters {
        let z = total(&combine(&y));
        if z.norm() < 1e-15 {
            w = y;
            break;
        }
        let mut next: Vec<Vec<f64>> = y
            .iter()
            .zip(&cols)
            .map(|(yi, c)| yi.iter().zip(c).map(|(a, g)| a - g.dot(&z) / lip).collect())
            .collect();
        project(&mut next);
        let tn = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / tn;
        y = next
            .iter()
            .zip(&w)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y0)| x + beta * (x - y0)).collect())
            .collect();
        project(&mut y);
        w = next;
        t = tn;
    }
    combine(&w)
}

/// Optimality certificate for a convex problem at `x`: multipliers from the
/// targets' convex subdifferentials whose sum is minus a normal of the
/// constraint at `x`. A residual within `tol` certifies `x` optimal.
pub fn certify(p: &ProblemSpec, x: &Point, tol: f64) -> Result<CertificateReport> {
    p.validate()?;
    check_dim(p.dimension, x.dim())?;
    if !p.all_convex() {
        return Err(Error::InvalidProblem("certify needs convex targets".into()));
    }
    if p.objective != Objective::Sum {
        return Err(Error::InvalidProblem("certify supports the sum objective".into()));
    }
    if !contains(&p.constraint, x, EPS)? {
        return Err(Error::Precondition("point must lie in the constraint set".into()));
    }
    let d = p.dimension;
    let mut blocks = Vec::new();
    let mut slices = Vec::new();
    let mut in_set = Vec::new();
    let mut out_set = Vec::new();
    for (i, t) in p.targets.iter().enumerate() {
        if !min_time_unchecked(&t.set, &t.direction, x).is_finite() {
            return Err(Error::NotInDomain);
        }
        if t.set.contains_unchecked(x.coords(), EPS) {
            in_set.push(i);
        } else {
            out_set.push(i);
        }
        let slice = convex_subdifferential(&t.set, &t.direction, x)?;
        let polys: Vec<Polyhedron> = slice.polyhedra();
        slices.push(slice);
        let Some(poly) = polys.into_iter().next() else {
            return Ok(CertificateReport {
                multipliers: vec![],
                in_set_indices: in_set,
                out_set_indices: out_set,
                residual: f64::INFINITY,
                per_target_checks: vec![],
                certified: false,
            });
        };
        blocks.push(Block::Simplex(poly.vertices));
        blocks.push(Block::Cone(poly.rays));
        blocks.push(Block::Span(poly.lineality));
    }
    let n0 = normal_cone_convex(&p.constraint, x)?;
    blocks.push(Block::Cone(n0.generators().to_vec()));
    blocks.push(Block::Span(n0.lineality().to_vec()));

    let parts = min_norm_sum(&blocks, d, 20_000);
    let n = p.targets.len();
    let multipliers: Vec<Point> = (0..n)
        .map(|i| {
            let m = &(&parts[3 * i] + &parts[3 * i + 1]) + &parts[3 * i + 2];
            Point::new(m.coords().iter().map(|c| crate::linalg::snap(*c)).collect())
        })
        .collect();
    let residual = parts.iter().fold(Point::zeros(d), |a, b| &a + b).norm();
    let per_target_checks = multipliers
        .iter()
        .zip(&slices)
        .zip(&p.targets)
        .enumerate()
        .map(|(i, ((m, sl), t))| {
            let s = m.dot(&t.direction);
            let err = if in_set.contains(&i) {
                (-s - 1.0).max(0.0)
            } else {
                (s + 1.0).abs()
            };
            TargetCheck {
                cone_membership: sl.cone().contains(m, 1e-9),
                v_constraint_error: err,
            }
        })
        .collect();
    Ok(CertificateReport {
        multipliers,
        in_set_indices: in_set,
        out_set_indices: out_set,
        residual,
        per_target_checks,
        certified: residual <= tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExistenceReport {
    /// A point of `S_0` with finite objective found by the probe.
    pub feasible_point: Option<Point>,
    /// Index of a compact set among `S_0, S_1, ..., S_n` (0 is the constraint).
    pub compact_set: Option<usize>,
    pub warnings: Vec<String>,
}

fn is_compact(s: &SetExpr) -> bool {
    match s {
        SetExpr::Union { members } => members.iter().all(is_compact),
        SetExpr::Implicit2D { .. } => false,
        _ => recession_cone(s).is_zero(),
    }
}

/// Checks the sufficient conditions for an optimal solution to exist:
/// `dom S n S_0` nonempty (probed) and some set among `S_0, ..., S_n` compact.
/// In finite dimensions "convex with one bounded set" reduces to the same
/// compactness test.
pub fn existence_precheck(p: &ProblemSpec) -> Result<ExistenceReport> {
    p.validate()?;
    let d = p.dimension;
    let mut warnings = Vec::new();
    let compact_set = std::iter::once(&p.constraint)
        .chain(p.targets.iter().map(|t| &t.set))
        .position(is_compact);
    if compact_set.is_none() {
        warnings.push("no compact set among the constraint and targets; existence not guaranteed".into());
    }
    // Probe: projections of target reference points and a grid over the
    // constraint's bounding box (clipped to [-100, 100]).
    let mut probes: Vec<Point> = Vec::new();
    for t in &p.targets {
        for m in t.set.members() {
            if let Some((lo, hi)) = m.bounding_box() {
                let c: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
                probes.push(Point::new(c.clone()));
                // Backwards along v from the reference point stays in dom T_i.
                for back in [1.0, 10.0, 100.0] {
                    probes.push(Point::new(c.clone()).along(-back, &t.direction));
                }
            }
        }
    }
    let (lo, hi) = p.constraint.bounding_box().unwrap_or((vec![-100.0; d], vec![100.0; d]));
    let per_axis = ((20_000f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let mut idx = vec![0usize; d];
    loop {
        let q: Vec<f64> = (0..d)
            .map(|i| {
                let (a, b) = (lo[i].max(-100.0), hi[i].min(100.0));
                a + (b - a) * idx[i] as f64 / (per_axis - 1) as f64
            })
            .collect();
        probes.push(Point::new(q));
        let mut i = 0;
        while i < d {
            idx[i] += 1;
            if idx[i] < per_axis {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    let mut feasible_point = None;
    for q in probes {
        let y = euclid_project(&p.constraint, &q)?;
        if objective_unchecked(p, &y).is_finite() {
            feasible_point = Some(y);
            break;
        }
    }
    if feasible_point.is_none() {
        warnings.push("probe found no point of the constraint set with finite objective".into());
    }
    Ok(ExistenceReport {
        feasible_point,
        compact_set,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    HypothesesHold,
    HypothesesFail,
    PartiallyChecked,
}

/// Hypotheses of the uniqueness theorem: at least two strictly convex
/// targets (balls) with pairwise independent directions. The segment
/// condition has no finite certificate, so the best possible outcome is
/// `partially_checked`.
pub fn uniqueness_precheck(p: &ProblemSpec) -> Result<UniquenessVerdict> {
    p.validate()?;
    if p.objective != Objective::Sum || p.targets.len() < 2 {
        return Ok(UniquenessVerdict::HypothesesFail);
    }
    if !p.targets.iter().all(|t| matches!(t.set, SetExpr::Ball { .. })) {
        return Ok(UniquenessVerdict::HypothesesFail);
    }
    let d = p.dimension;
    for (i, a) in p.targets.iter().enumerate() {
        for b in &p.targets[i + 1..] {
            let rows = vec![
                a.direction.normalized().expect("nonzero").into_vec(),
                b.direction.normalized().expect("nonzero").into_vec(),
            ];
            if rank(&rows, d, 1e-10) < 2 {
                return Ok(UniquenessVerdict::HypothesesFail);
            }
        }
    }
    Ok(UniquenessVerdict::PartiallyChecked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(v: &[f64]) -> Point {
        Point::from(v)
    }

    pub(crate) fn two_ball(objective: Objective) -> ProblemSpec {
        ProblemSpec::new(
            SetExpr::boxed(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap(),
            vec![
                Target {
                    set: SetExpr::ball([4.0, 0.0], 1.0).unwrap(),
                    direction: p(&[1.0, 0.0]),
                },
                Target {
                    set: SetExpr::ball([0.0, 4.0], 1.0).unwrap(),
                    direction: p(&[0.0, 1.0]),
                },
            ],
            objective,
        )
        .unwrap()
    }

    #[test]
    fn objective_examples() {
        let pr = two_ball(Objective::Sum);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let val = evaluate_objective(&pr, &p(&[s, s])).unwrap().finite().unwrap();
        assert_abs_diff_eq!(val, 8.0 - 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(evaluate_objective(&pr, &p(&[0.0, 2.0])).unwrap(), ExtReal::PosInf);
        assert_eq!(evaluate_objective(&pr, &p(&[0.0, 0.0])).unwrap(), ExtReal::Finite(6.0));
    }

    #[test]
    fn solves_two_ball_sum() {
        let pr = two_ball(Objective::Sum);
        let rep = solve(&pr, &SolveOptions::default()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((rep.best_value - (8.0 - 2.0 * 2f64.sqrt())).abs() < 1e-3, "{rep:?}");
        assert!(rep.best_x.distance(&p(&[s, s])) < 2e-3);
        assert!(rep.iterations_used <= 5000);
    }

    #[test]
    fn solves_two_ball_max() {
        // Iterates settle into a two-cycle across the kink at distance
        // proportional to the step, so the step scale sets the accuracy.
        let pr = two_ball(Objective::Max);
        let o = SolveOptions {
            step: Step::Diminishing { gamma0: 0.05 },
            ..SolveOptions::default()
        };
        let rep = solve(&pr, &o).unwrap();
        assert!((rep.best_value - (4.0 - 2f64.sqrt())).abs() < 1e-3, "{rep:?}");
    }

    #[test]
    fn halfspace_target_reaches_zero() {
        let a = p(&[1.0, 2.0]);
        let v = a.scaled(-1.0 / a.norm_sq());
        let pr = ProblemSpec::new(
            SetExpr::ball([3.0, 3.0], 5.0).unwrap(),
            vec![Target {
                set: SetExpr::halfspace(a, 0.0).unwrap(),
                direction: v,
            }],
            Objective::Sum,
        )
        .unwrap();
        let o = SolveOptions {
            x0: Some(p(&[6.0, 6.0])),
            ..SolveOptions::default()
        };
        let rep = solve(&pr, &o).unwrap();
        assert_eq!(rep.best_value, 0.0);
    }

    #[test]
    fn optimal_start_is_kept() {
        let pr = two_ball(Objective::Sum);
        let pr = ProblemSpec::new(
            pr.constraint.clone(),
            vec![Target {
                set: SetExpr::ball([0.0, 0.0], 1.0).unwrap(),
                direction: p(&[1.0, 0.0]),
            }],
            Objective::Sum,
        )
        .unwrap();
        let o = SolveOptions {
            x0: Some(p(&[0.5, 0.0])),
            ..SolveOptions::default()
        };
        let rep = solve(&pr, &o).unwrap();
        assert_eq!(rep.best_x, p(&[0.5, 0.0]));
        assert_eq!(rep.best_value, 0.0);
        assert_eq!(rep.status, SolveStatus::Converged);
    }

    #[test]
    fn certificate_examples() {
        let pr = two_ball(Objective::Sum);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = certify(&pr, &p(&[s, s]), 1e-6).unwrap();
        assert!(c.multipliers[0].distance(&p(&[-1.0, 1.0])) < 1e-9);
        assert!(c.multipliers[1].distance(&p(&[1.0, -1.0])) < 1e-9);
        assert!(c.residual < 1e-9);
        assert!(c.certified);
        assert_eq!(c.out_set_indices, vec![0, 1]);
        let c = certify(&pr, &p(&[0.8, 0.6]), 1e-6).unwrap();
        assert!(c.residual > 0.05);
        assert!(!c.certified);
    }

    #[test]
    fn certificate_with_active_constraint() {
        // One ball target ahead, constraint x <= 0: optimum on the wall.
        let pr = ProblemSpec::new(
            SetExpr::halfspace([1.0, 0.0], 0.0).unwrap(),
            vec![Target {
                set: SetExpr::ball([3.0, 0.0], 1.0).unwrap(),
                direction: p(&[1.0, 0.0]),
            }],
            Objective::Sum,
        )
        .unwrap();
        let c = certify(&pr, &p(&[0.0, 0.0]), 1e-6).unwrap();
        assert!(c.residual < 1e-9, "{c:?}");
        let c = certify(&pr, &p(&[-1.0, 0.0]), 1e-6).unwrap();
        assert!(c.residual > 0.5);
    }

    #[test]
    fn interior_point_certifies_with_zero_multipliers() {
        let pr = ProblemSpec::new(
            SetExpr::boxed(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap(),
            vec![
                Target {
                    set: SetExpr::ball([0.0, 0.0], 2.0).unwrap(),
                    direction: p(&[1.0, 0.0]),
                },
                Target {
                    set: SetExpr::ball([1.0, 0.0], 2.0).unwrap(),
                    direction: p(&[0.0, 1.0]),
                },
            ],
            Objective::Sum,
        )
        .unwrap();
        let c = certify(&pr, &p(&[0.5, 0.0]), 1e-9).unwrap();
        assert!(c.multipliers.iter().all(Point::is_zero));
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn existence_examples() {
        let rep = existence_precheck(&two_ball(Objective::Sum)).unwrap();
        assert_eq!(rep.compact_set, Some(0));
        assert!(rep.warnings.is_empty());

        let whole = SetExpr::boxed(vec![f64::NEG_INFINITY; 2], vec![f64::INFINITY; 2]).unwrap();
        let hs = |a: [f64; 2], v: [f64; 2]| Target {
            set: SetExpr::halfspace(a, 0.0).unwrap(),
            direction: p(&v),
        };
        let pr = ProblemSpec::new(
            whole.clone(),
            vec![hs([1.0, 0.0], [-1.0, 0.0]), hs([0.0, 1.0], [0.0, -1.0])],
            Objective::Sum,
        )
        .unwrap();
        let rep = existence_precheck(&pr).unwrap();
        assert_eq!(rep.compact_set, None);
        assert_eq!(rep.warnings.len(), 1);

        // The ball sits behind the constraint slab along v.
        let pr = ProblemSpec::new(
            SetExpr::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            vec![Target {
                set: SetExpr::ball([10.0, 10.0], 1.0).unwrap(),
                direction: p(&[-1.0, 0.0]),
            }],
            Objective::Sum,
        )
        .unwrap();
        let rep = existence_precheck(&pr).unwrap();
        assert!(rep.feasible_point.is_none());
        assert!(rep.warnings.iter().any(|w| w.contains("finite objective")));
    }

    #[test]
    fn uniqueness_examples() {
        assert_eq!(
            uniqueness_precheck(&two_ball(Objective::Sum)).unwrap(),
            UniquenessVerdict::PartiallyChecked
        );
        let mut pr = two_ball(Objective::Sum);
        pr.targets[1].direction = p(&[-2.0, 0.0]);
        assert_eq!(uniqueness_precheck(&pr).unwrap(), UniquenessVerdict::HypothesesFail);
        pr.targets.pop();
        assert_eq!(uniqueness_precheck(&pr).unwrap(), UniquenessVerdict::HypothesesFail);
    }

    #[test]
    fn problem_file_parses() {
        let doc = r#"{
            "dimension": 2,
            "constraint": {"type": "box", "lo": [-5, -5], "hi": [5, 5]},
            "targets": [
                {"set": {"type": "ball", "c": [4, 0], "r": 1}, "direction": [1, 0]},
                {"set": {"type": "ball", "c": [0, 4], "r": 1}, "direction": [0, 1]}
            ],
            "objective": "sum",
            "solver": {"x0": [0, 0], "max_iters": 5000,
                       "step": {"kind": "diminishing", "gamma0": 1.0},
                       "tol": 1e-6, "seed": 0, "trace": false}
        }"#;
        let f: ProblemFile = serde_json::from_str(doc).unwrap();
        let (pr, o) = f.into_parts().unwrap();
        assert_eq!(pr, two_ball(Objective::Sum));
        assert_eq!(o.x0, Some(p(&[0.0, 0.0])));
        let bad = doc.replace("\"tol\"", "\"tolerance\"");
        assert!(serde_json::from_str::<ProblemFile>(&bad).is_err());
    }
}
