//! Browser bindings for the demo page in `www/`: a minimal time heatmap, the
//! subdifferential at a clicked point, and a traced location solve.
//!
//! Sets and problems cross the boundary as the same JSON the CLI reads.

use mintime::solver::{solve, ProblemFile};
use mintime::subdiff::{convex_subdifferential, frechet_subdifferential, limiting_subdifferential};
use mintime::{min_time, projection_pi, Point, SetExpr};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse_set(set_json: &str) -> Result<SetExpr, String> {
    let s: SetExpr = serde_json::from_str(set_json).map_err(|e| format!("set: {e}"))?;
    if s.dim() != 2 {
        return Err(format!("the demo draws planar sets; got dimension {}", s.dim()));
    }
    Ok(s)
}

/// Row-major `n x n` samples of `T_v` over `[lo, hi]^2`, first row at `y = hi`.
pub fn heatmap_values(set_json: &str, vx: f64, vy: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    let s = parse_set(set_json)?;
    let ordered = lo < hi;
    if !ordered || !(2..=1024).contains(&n) {
        return Err("heatmap needs lo < hi and 2 <= n <= 1024".into());
    }
    let v = Point::new(vec![vx, vy]);
    let step = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let x = Point::new(vec![lo + c as f64 * step, hi - r as f64 * step]);
            out.push(min_time(&s, &v, &x).map_err(|e| e.to_string())?.to_f64());
        }
    }
    Ok(out)
}

/// The chosen subdifferential at `(x, y)` with its polyhedral pieces and the
/// projection `x + T(x) v`, as JSON.
pub fn subdifferential_json(set_json: &str, vx: f64, vy: f64, x: f64, y: f64, kind: &str) -> Result<String, String> {
    let s = parse_set(set_json)?;
    let v = Point::new(vec![vx, vy]);
    let p = Point::new(vec![x, y]);
    let slice = match kind {
        "convex" => convex_subdifferential(&s, &v, &p),
        "frechet" => frechet_subdifferential(&s, &v, &p),
        "limiting" => limiting_subdifferential(&s, &v, &p),
        other => return Err(format!("unknown kind {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    let proj = projection_pi(&s, &v, &p).ok().map(|r| r.point);
    let doc = json!({
        "T": min_time(&s, &v, &p).map_err(|e| e.to_string())?,
        "projection": proj,
        "exactness": slice.exactness(),
        "polyhedra": slice.polyhedra(),
    });
    Ok(doc.to_string())
}

/// Solves a problem document with the trace enabled; returns the report as JSON.
pub fn solve_trace_json(problem_json: &str) -> Result<String, String> {
    let file: ProblemFile = serde_json::from_str(problem_json).map_err(|e| format!("problem: {e}"))?;
    let (p, mut o) = file.into_parts().map_err(|e| e.to_string())?;
    o.trace = true;
    let rep = solve(&p, &o).map_err(|e| e.to_string())?;
    serde_json::to_string(&rep).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn heatmap(set_json: &str, vx: f64, vy: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    heatmap_values(set_json, vx, vy, lo, hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn subdifferential(set_json: &str, vx: f64, vy: f64, x: f64, y: f64, kind: &str) -> Result<String, JsError> {
    subdifferential_json(set_json, vx, vy, x, y, kind).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve_trace(problem_json: &str) -> Result<String, JsError> {
    solve_trace_json(problem_json).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BALL: &str = r#"{"type": "ball", "c": [0, 0], "r": 2.8284271247461903}"#;

    #[test]
    fn heatmap_matches_point_evaluation() {
        let vals = heatmap_values(BALL, 1.0, 1.0, -4.0, 4.0, 9).unwrap();
        assert_eq!(vals.len(), 81);
        // Bottom-left corner (-4, -4): T = 4 - 2 = 2.
        assert!((vals[72] - 2.0).abs() < 1e-12);
        // Top-right corner lies past the ball.
        assert_eq!(vals[8], f64::INFINITY);
        assert!(heatmap_values(BALL, 1.0, 1.0, 1.0, 0.0, 9).is_err());
    }

    #[test]
    fn subdifferential_of_the_example_ball() {
        let doc: serde_json::Value =
            serde_json::from_str(&subdifferential_json(BALL, 1.0, 1.0, -3.0, -3.0, "convex").unwrap()).unwrap();
        assert!((doc["T"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(doc["exactness"], "exact");
        let v = &doc["polyhedra"][0]["vertices"][0];
        assert!((v[0].as_f64().unwrap() + 0.5).abs() < 1e-12);
        assert!(subdifferential_json(BALL, 1.0, 1.0, 0.0, 0.0, "bogus").is_err());
    }

    #[test]
    fn solve_trace_reaches_the_two_ball_optimum() {
        let problem = r#"{
            "dimension": 2,
            "constraint": {"type": "box", "lo": [-5, -5], "hi": [5, 5]},
            "targets": [
                {"set": {"type": "ball", "c": [4, 0], "r": 1}, "direction": [1, 0]},
                {"set": {"type": "ball", "c": [0, 4], "r": 1}, "direction": [0, 1]}
            ]
        }"#;
        let doc: serde_json::Value = serde_json::from_str(&solve_trace_json(problem).unwrap()).unwrap();
        assert!((doc["best_value"].as_f64().unwrap() - (8.0 - 2.0 * 2f64.sqrt())).abs() < 1e-3);
        assert!(!doc["trace"].as_array().unwrap().is_empty());
    }

    #[test]
    fn non_planar_sets_are_rejected() {
        assert!(parse_set(r#"{"type": "ball", "c": [0, 0, 0], "r": 1}"#).is_err());
    }
}
