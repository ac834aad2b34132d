//! Command-line front end: reads a problem file, runs one command and renders
//! the report as CSV or JSON.
//!
//! Output is deterministic for a given input file, seed and flag set. Floats
//! are written with 12 significant digits and infinities as `inf`/`-inf`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use mintime::lipschitz::{global_lipschitz, local_lipschitz};
use mintime::mintime::directional_derivative;
use mintime::oracle::{fd_directional, oracle_grid_min, oracle_min_time, GridSpec};
use mintime::solver::{certify, solve, ProblemFile, ProblemSpec, SolveOptions};
use mintime::subdiff::{
    conjugate, convex_subdifferential, dini_subdifferential, frechet_subdifferential, holder_subdifferential,
    limiting_subdifferential, singular_subdifferential, DualSlice,
};
use mintime::{min_time, projection_pi, scalarization, ExtReal, Point};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// T, phi, the projection and the domain flag per target
    Eval,
    /// A subdifferential of T per target (see --kind)
    Grad,
    /// Directional derivative in --direction, with a finite-difference check
    Ddir,
    /// Projected subgradient solve of the location problem
    Solve,
    /// Optimality certificate at --point
    Certify,
    /// Local (with --point) or global Lipschitz verdicts per target
    Lipschitz,
    /// Conjugate of T at the dual point given by --point
    Conjugate,
    /// Exact values against the brute-force oracles
    OracleCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Grad => "grad",
            Command::Ddir => "ddir",
            Command::Solve => "solve",
            Command::Certify => "certify",
            Command::Lipschitz => "lipschitz",
            Command::Conjugate => "conjugate",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Convex,
    Frechet,
    Dini,
    Limiting,
    Singular,
    Holder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `lo,hi,n`: the cube `[lo, hi]^d` with `n` cells per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridArg {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

fn parse_grid(s: &str) -> std::result::Result<GridArg, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        return Err("expected \"lo,hi,n\"".into());
    };
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(GridArg {
        lo: num(lo)?,
        hi: num(hi)?,
        cells: n.parse().map_err(|e| format!("{n:?}: {e}"))?,
    })
}

#[derive(Clone, Debug, Parser)]
#[command(name = "mintime", version, about = "Directional minimal time functions on problem files")]
pub struct CommandRequest {
    #[arg(value_enum)]
    pub command: Command,
    /// Problem file (JSON)
    pub input_path: PathBuf,
    /// Query point (comma separated); the dual point for `conjugate`, the
    /// start point for `solve`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Derivative direction for `ddir` (comma separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub direction: Option<Vec<f64>>,
    /// Restrict per-target commands to one target (0-based)
    #[arg(long)]
    pub direction_index: Option<usize>,
    #[arg(long, value_enum, default_value = "convex")]
    pub kind: Kind,
    /// Holder exponent for `--kind holder`
    #[arg(long)]
    pub s: Option<f64>,
    /// Certificate tolerance (default 1e-6) or oracle tolerance (default 1e-9)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for sampled checks; overrides the solver seed in the file
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Oracle grid "lo,hi,n" for `oracle-check`
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridArg>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<mintime::Error> for CliError {
    fn from(e: mintime::Error) -> Self {
        match e {
            mintime::Error::NotComputable(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Prefixes a library error with the target it came from.
fn at_target<T>(i: usize, r: mintime::Result<T>) -> Result<T> {
    r.map_err(|e| match CliError::from(e) {
        CliError::Validation(m) => CliError::Validation(format!("target {i}: {m}")),
        CliError::Numerical(m) => CliError::Numerical(format!("target {i}: {m}")),
    })
}

/// Reads and validates the problem file; returns it with the input digest.
pub fn load_problem(path: &PathBuf) -> Result<(ProblemSpec, SolveOptions, String)> {
    let bytes = std::fs::read(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let text = std::str::from_utf8(&bytes).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        invalid(format!("{}: field `{field}`: {}", path.display(), e.inner()))
    })?;
    let (p, o) = file
        .into_parts()
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok((p, o, digest))
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse::<f64>().unwrap() + 0.0
}

fn num(x: f64) -> String {
    let r = round12(x);
    if r == f64::INFINITY {
        "inf".into()
    } else if r == f64::NEG_INFINITY {
        "-inf".into()
    } else if r.is_nan() {
        "nan".into()
    } else if r != 0.0 && !(1e-4..1e12).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

fn ext(x: ExtReal) -> String {
    num(x.to_f64())
}

fn coords(p: &Point) -> impl Iterator<Item = String> + '_ {
    p.coords().iter().map(|&c| num(c))
}

fn indexed(prefix: &str, d: usize) -> impl Iterator<Item = String> + '_ {
    (1..=d).map(move |i| format!("{prefix}{i}"))
}

/// The serialized tag of a unit enum variant.
fn tag<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(e) => e.to_string(),
    }
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round12(n.as_f64().unwrap());
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: impl IntoIterator<Item = String>) -> Self {
        Table {
            header: header.into_iter().collect(),
            rows: Vec::new(),
        }
    }
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

struct Context<'a> {
    req: &'a CommandRequest,
    p: ProblemSpec,
    o: SolveOptions,
    seed: u64,
}

impl Context<'_> {
    fn targets(&self) -> Result<Vec<usize>> {
        let n = self.p.targets.len();
        match self.req.direction_index {
            Some(i) if i >= n => Err(invalid(format!("--direction-index {i} out of range ({n} targets)"))),
            Some(i) => Ok(vec![i]),
            None => Ok((0..n).collect()),
        }
    }

    fn vector(&self, flag: &str, v: &Option<Vec<f64>>) -> Result<Point> {
        let v = v
            .as_ref()
            .ok_or_else(|| invalid(format!("{} needs --{flag}", self.req.command.name())))?;
        let d = self.p.dimension;
        if v.len() != d {
            return Err(invalid(format!("--{flag} has {} coordinates, the problem has dimension {d}", v.len())));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(invalid(format!("--{flag} must be finite")));
        }
        Ok(Point::new(v.clone()))
    }

    fn point(&self) -> Result<Point> {
        self.vector("point", &self.req.point)
    }
}

/// Runs one command and returns the rendered report.
pub fn run(req: &CommandRequest) -> Result<String> {
    let (p, o, digest) = load_problem(&req.input_path)?;
    let seed = req.seed.unwrap_or(o.seed);
    let cx = Context { req, p, o, seed };
    let (result, table) = match req.command {
        Command::Eval => eval(&cx)?,
        Command::Grad => grad(&cx)?,
        Command::Ddir => ddir(&cx)?,
        Command::Solve => solve_cmd(&cx)?,
        Command::Certify => certify_cmd(&cx)?,
        Command::Lipschitz => lipschitz(&cx)?,
        Command::Conjugate => conjugate_cmd(&cx)?,
        Command::OracleCheck => oracle_check(&cx)?,
    };
    Ok(match req.format {
        Format::Json => {
            let mut doc = json!({
                "tool": "mintime",
                "version": VERSION,
                "command": req.command.name(),
                "seed": seed,
                "input_sha256": digest,
                "result": result,
            });
            round_json(&mut doc);
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            writeln!(s, "# mintime {VERSION} {} seed={seed} input_sha256={digest}", req.command.name()).unwrap();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).expect("csv");
            for row in &table.rows {
                w.write_record(row).expect("csv");
            }
            s.push_str(&String::from_utf8(w.into_inner().expect("csv")).expect("utf8"));
            s
        }
    })
}

fn eval(cx: &Context) -> Result<(Value, Table)> {
    let x = cx.point()?;
    let d = cx.p.dimension;
    let mut table = Table::new(strings(["target_index", "T", "phi"]).into_iter().chain(indexed("proj_x", d)));
    table.header.push("in_domain".into());
    let mut out = Vec::new();
    for i in cx.targets()? {
        let t = &cx.p.targets[i];
        let tx = at_target(i, min_time(&t.set, &t.direction, &x))?;
        let phi = at_target(i, scalarization(&t.set, &t.direction, &x))?;
        let proj = tx
            .is_finite()
            .then(|| at_target(i, projection_pi(&t.set, &t.direction, &x)))
            .transpose()?
            .map(|r| r.point);
        let mut row = vec![i.to_string(), ext(tx), ext(phi)];
        match &proj {
            Some(q) => row.extend(coords(q)),
            None => row.extend(std::iter::repeat_n(String::new(), d)),
        }
        row.push(tx.is_finite().to_string());
        table.rows.push(row);
        out.push(json!({
            "target_index": i,
            "T": tx,
            "phi": phi,
            "projection": proj,
            "in_domain": tx.is_finite(),
        }));
    }
    Ok((Value::Array(out), table))
}

fn slice_for(cx: &Context, i: usize, x: &Point) -> Result<DualSlice> {
    let t = &cx.p.targets[i];
    let (s, v) = (&t.set, &t.direction);
    at_target(
        i,
        match cx.req.kind {
            Kind::Convex => convex_subdifferential(s, v, x),
            Kind::Frechet => frechet_subdifferential(s, v, x),
            Kind::Dini => dini_subdifferential(s, v, x),
            Kind::Limiting => limiting_subdifferential(s, v, x),
            Kind::Singular => singular_subdifferential(s, v, x),
            Kind::Holder => {
                let sexp = cx.req.s.ok_or_else(|| invalid("--kind holder needs --s"))?;
                holder_subdifferential(s, v, x, sexp)
            }
        },
    )
}

fn grad(cx: &Context) -> Result<(Value, Table)> {
    let x = cx.point()?;
    let d = cx.p.dimension;
    let kind = tag_kind(cx.req.kind);
    let mut table = Table::new(
        strings(["target_index", "kind", "exactness", "part", "element"])
            .into_iter()
            .chain(indexed("x", d)),
    );
    let mut out = Vec::new();
    for i in cx.targets()? {
        let slice = slice_for(cx, i, &x)?;
        let polys = slice.polyhedra();
        let head = |part: String, element: &str| {
            vec![i.to_string(), kind.to_string(), tag(&slice.exactness()), part, element.to_string()]
        };
        if polys.is_empty() {
            let mut row = head(String::new(), "empty");
            row.extend(std::iter::repeat_n(String::new(), d));
            table.rows.push(row);
        }
        for (k, poly) in polys.iter().enumerate() {
            let groups = [("vertex", &poly.vertices), ("ray", &poly.rays), ("line", &poly.lineality)];
            for (element, points) in groups {
                for q in points {
                    let mut row = head(k.to_string(), element);
                    row.extend(coords(q));
                    table.rows.push(row);
                }
            }
        }
        out.push(json!({
            "target_index": i,
            "kind": kind,
            "slice": slice,
            "polyhedra": polys,
        }));
    }
    Ok((Value::Array(out), table))
}

fn tag_kind(k: Kind) -> &'static str {
    match k {
        Kind::Convex => "convex",
        Kind::Frechet => "frechet",
        Kind::Dini => "dini",
        Kind::Limiting => "limiting",
        Kind::Singular => "singular",
        Kind::Holder => "holder",
    }
}

/// `|a - b|`, zero when both are the same infinity.
fn delta(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn ddir(cx: &Context) -> Result<(Value, Table)> {
    let x = cx.point()?;
    let u = cx.vector("direction", &cx.req.direction)?;
    let mut table = Table::new(strings(["target_index", "ddir", "certified", "fd_oracle", "delta"]));
    let mut out = Vec::new();
    for i in cx.targets()? {
        let t = &cx.p.targets[i];
        let dd = at_target(i, directional_derivative(&t.set, &t.direction, &x, &u))?;
        let fd = at_target(i, fd_directional(&t.set, &t.direction, &x, &u))?;
        let gap = delta(dd.value.to_f64(), fd.to_f64());
        table.rows.push(vec![i.to_string(), ext(dd.value), dd.certified.to_string(), ext(fd), num(gap)]);
        out.push(json!({
            "target_index": i,
            "ddir": dd.value,
            "certified": dd.certified,
            "fd_oracle": fd,
            "delta": num_json(gap),
        }));
    }
    Ok((Value::Array(out), table))
}

/// A float that may be infinite, in the report convention.
fn num_json(x: f64) -> Value {
    to_json(&ExtReal::from_f64(x))
}

fn solve_cmd(cx: &Context) -> Result<(Value, Table)> {
    let mut o = cx.o.clone();
    o.seed = cx.seed;
    if cx.req.point.is_some() {
        o.x0 = Some(cx.point()?);
    }
    let rep = solve(&cx.p, &o)?;
    let d = cx.p.dimension;
    let mut table = Table::new(
        strings(["best_value", "iterations_used", "status"])
            .into_iter()
            .chain(indexed("best_x", d)),
    );
    let mut row = vec![num(rep.best_value), rep.iterations_used.to_string(), tag(&rep.status)];
    row.extend(coords(&rep.best_x));
    table.rows.push(row);
    Ok((to_json(&rep), table))
}

fn certify_cmd(cx: &Context) -> Result<(Value, Table)> {
    let x = cx.point()?;
    let tol = cx.req.tol.unwrap_or(1e-6);
    let rep = certify(&cx.p, &x, tol)?;
    let d = cx.p.dimension;
    let mut table = Table::new(
        strings(["target_index", "in_set", "cone_membership", "v_constraint_error"])
            .into_iter()
            .chain(indexed("multiplier_", d))
            .chain(strings(["residual", "certified"])),
    );
    for (i, check) in rep.per_target_checks.iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            rep.in_set_indices.contains(&i).to_string(),
            check.cone_membership.to_string(),
            num(check.v_constraint_error),
        ];
        row.extend(coords(&rep.multipliers[i]));
        row.push(num(rep.residual));
        row.push(rep.certified.to_string());
        table.rows.push(row);
    }
    Ok((to_json(&rep), table))
}

fn lipschitz(cx: &Context) -> Result<(Value, Table)> {
    let x = cx.req.point.is_some().then(|| cx.point()).transpose()?;
    let scope = if x.is_some() { "local" } else { "global" };
    let mut table = Table::new(strings([
        "target_index",
        "scope",
        "verdict",
        "constant",
        "local_modulus",
        "empirical_ratio",
        "infinite_pairs",
        "evidence",
    ]));
    let mut out = Vec::new();
    for i in cx.targets()? {
        let t = &cx.p.targets[i];
        let rep = at_target(
            i,
            match &x {
                Some(x) => local_lipschitz(&t.set, &t.direction, x, cx.seed),
                None => global_lipschitz(&t.set, &t.direction, cx.seed),
            },
        )?;
        table.rows.push(vec![
            i.to_string(),
            scope.into(),
            tag(&rep.verdict),
            rep.constant.map_or(String::new(), ext),
            rep.local_modulus.map_or(String::new(), num),
            num(rep.empirical_ratio),
            rep.infinite_pairs.to_string(),
            rep.evidence.clone(),
        ]);
        out.push(json!({ "target_index": i, "scope": scope, "report": rep }));
    }
    Ok((Value::Array(out), table))
}

fn conjugate_cmd(cx: &Context) -> Result<(Value, Table)> {
    let xs = cx.point()?;
    let mut table = Table::new(strings(["target_index", "conjugate"]));
    let mut out = Vec::new();
    for i in cx.targets()? {
        let t = &cx.p.targets[i];
        let c = at_target(i, conjugate(&t.set, &t.direction, &xs))?;
        table.rows.push(vec![i.to_string(), ext(c)]);
        out.push(json!({ "target_index": i, "conjugate": c }));
    }
    Ok((Value::Array(out), table))
}

fn oracle_check(cx: &Context) -> Result<(Value, Table)> {
    if cx.req.point.is_none() && cx.req.grid.is_none() {
        return Err(invalid("oracle-check needs --point, --grid or both"));
    }
    let tol = cx.req.tol.unwrap_or(1e-9);
    let mut table = Table::new(strings(["item", "exact", "oracle", "delta"]));
    let mut rows = Vec::new();
    let mut push = |item: String, exact: f64, oracle: f64| {
        let gap = delta(exact, oracle);
        table.rows.push(vec![item.clone(), num(exact), num(oracle), num(gap)]);
        rows.push(json!({
            "item": item,
            "exact": num_json(exact),
            "oracle": num_json(oracle),
            "delta": num_json(gap),
        }));
    };
    if cx.req.point.is_some() {
        let x = cx.point()?;
        for i in cx.targets()? {
            let t = &cx.p.targets[i];
            let exact = at_target(i, min_time(&t.set, &t.direction, &x))?.to_f64();
            let t_max = if exact.is_finite() { (2.0 * exact).max(1e3) } else { 1e3 };
            let oracle = at_target(i, oracle_min_time(&t.set, &t.direction, &x, t_max, tol))?.to_f64();
            push(format!("T[{i}]"), exact, oracle);
        }
    }
    let mut grid_json = Value::Null;
    if let Some(g) = cx.req.grid {
        let d = cx.p.dimension;
        let spec = GridSpec::new(vec![g.lo; d], vec![g.hi; d], g.cells)?;
        let grid = oracle_grid_min(&cx.p, &spec)?;
        let mut o = cx.o.clone();
        o.seed = cx.seed;
        let rep = solve(&cx.p, &o)?;
        push("objective_min".into(), rep.best_value, grid.value);
        grid_json = to_json(&grid);
    }
    Ok((json!({ "rows": rows, "grid": grid_json }), table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_use_twelve_significant_digits() {
        assert_eq!(num(8.0 - 2.0 * 2f64.sqrt()), "5.17157287525");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(3.0), "3");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(num(9.000000518556e-10), "9.00000051856e-10");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn grid_flags_parse() {
        assert_eq!(
            parse_grid("-2, 2,50"),
            Ok(GridArg {
                lo: -2.0,
                hi: 2.0,
                cells: 50
            })
        );
        assert!(parse_grid("1,2").is_err());
        assert!(parse_grid("a,2,3").is_err());
        assert!(parse_grid("0,1,-4").is_err());
    }

    #[test]
    fn json_rounding_keeps_integers_and_strings() {
        let mut v = json!({"a": 1.0 / 3.0, "b": [2, "inf"], "c": -0.0});
        round_json(&mut v);
        assert_eq!(v, json!({"a": 0.333333333333, "b": [2, "inf"], "c": 0.0}));
    }
}
