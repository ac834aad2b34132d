mod common;

use common::*;
use mintime::geometry::contains;
use mintime::oracle::{oracle_grid_min, GridSpec};
use mintime::solver::{
    certify, evaluate_objective, existence_precheck, solve, Objective, ProblemFile, ProblemSpec, SolveOptions,
    Target,
};
use mintime::{Point, SetExpr};
use std::path::PathBuf;

fn problems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn load(name: &str) -> (ProblemSpec, SolveOptions) {
    let text = std::fs::read_to_string(problems_dir().join(name)).unwrap();
    let file: ProblemFile = serde_json::from_str(&text).unwrap();
    file.into_parts().unwrap()
}

const CONVEX: [&str; 6] = [
    "two_ball.json",
    "two_ball_max.json",
    "ball_example.json",
    "mixed_targets.json",
    "halfspace_ball.json",
    "polytope_3d.json",
];

/// The constraint's bounding box, with unbounded sides cut at +-10.
fn search_box(p: &ProblemSpec) -> (Vec<f64>, Vec<f64>) {
    let d = p.dimension;
    let (lo, hi) = p
        .constraint
        .bounding_box()
        .unwrap_or((vec![f64::NEG_INFINITY; d], vec![f64::INFINITY; d]));
    (
        lo.iter().map(|l| l.max(-10.0)).collect(),
        hi.iter().map(|h| h.min(10.0)).collect(),
    )
}

/// Grid minimum refined around the incumbent until cells are at most 1e-4
/// wide. Each level recentres its window on the incumbent until that stops
/// improving, which follows optima along nearly flat boundaries, then cuts the
/// cell size tenfold.
fn refined_grid_min(p: &ProblemSpec) -> (Point, f64) {
    let d = p.dimension;
    let (search_lo, search_hi) = search_box(p);
    let cells = if d == 3 { 60 } else { 400 };
    let mut r = oracle_grid_min(p, &GridSpec::new(search_lo.clone(), search_hi.clone(), cells).unwrap()).unwrap();
    let mut h = (0..d).map(|i| (search_hi[i] - search_lo[i]) / cells as f64).fold(0.0, f64::max);
    let cells = if d == 3 { 60 } else { 200 };
    while h > 1e-4 {
        let half = cells as f64 * h / 20.0;
        for _ in 0..50 {
            let best = r.best.clone().expect("feasible grid node");
            let lo: Vec<f64> = (0..d).map(|i| (best.coords()[i] - half).max(search_lo[i])).collect();
            let hi: Vec<f64> = (0..d).map(|i| (best.coords()[i] + half).min(search_hi[i])).collect();
            let next = oracle_grid_min(p, &GridSpec::new(lo, hi, cells).unwrap()).unwrap();
            if next.value >= r.value {
                break;
            }
            r = next;
        }
        h /= 10.0;
    }
    (r.best.unwrap(), r.value)
}

#[test]
fn shipped_problem_files_parse() {
    let mut names: Vec<String> = std::fs::read_dir(problems_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for name in names {
        let (p, o) = load(&name);
        assert!(!p.targets.is_empty(), "{name}");
        o.validate().unwrap();
    }
}

#[test]
fn malformed_problem_files_are_rejected() {
    let wrong_dim = r#"{"dimension": 3, "targets": [{"set": {"type": "ball", "c": [0, 0], "r": 1}, "direction": [1, 0]}]}"#;
    let file: ProblemFile = serde_json::from_str(wrong_dim).unwrap();
    assert!(file.into_parts().is_err());
    let unknown = r#"{"dimension": 2, "targets": [], "extra": 1}"#;
    assert!(serde_json::from_str::<ProblemFile>(unknown).is_err());
}

#[test]
fn traces_are_monotone_and_iterates_feasible() {
    for name in CONVEX {
        let (p, mut o) = load(name);
        o.trace = true;
        let rep = solve(&p, &o).unwrap();
        let trace = rep.trace.unwrap();
        assert!(!trace.is_empty(), "{name}");
        for w in trace.windows(2) {
            assert!(w[1].best <= w[0].best, "{name}: best rose at k = {}", w[1].k);
        }
        for e in &trace {
            assert!(contains(&p.constraint, &e.x, 1e-8).unwrap(), "{name}: x_{} infeasible", e.k);
            assert!(e.best <= e.value || e.k > 0, "{name}");
        }
        assert_eq!(trace.last().unwrap().best, rep.best_value, "{name}");
    }
}

#[test]
fn solver_matches_the_refined_grid_on_shipped_convex_instances() {
    for name in CONVEX {
        let (p, o) = load(name);
        let rep = solve(&p, &o).unwrap();
        let (_, grid) = refined_grid_min(&p);
        assert!(
            (rep.best_value - grid).abs() <= 1e-3,
            "{name}: solver {} vs grid {grid}",
            rep.best_value
        );
    }
}

#[test]
fn shipped_instances_reach_their_known_optima() {
    let known = [
        ("two_ball.json", 8.0 - 2.0 * 2f64.sqrt()),
        ("two_ball_max.json", 4.0 - 2f64.sqrt()),
        ("ball_example.json", 0.0),
        ("mixed_targets.json", 9.0 - 2f64.sqrt()),
        ("halfspace_ball.json", 6.0 - 2f64.sqrt()),
        ("polytope_3d.json", 6.0 - 3f64.sqrt()),
    ];
    for (name, value) in known {
        let (p, o) = load(name);
        let rep = solve(&p, &o).unwrap();
        assert!((rep.best_value - value).abs() <= 1e-3, "{name}: {} vs {value}", rep.best_value);
    }
}

#[test]
fn small_residuals_certify_near_grid_optimal_points() {
    for name in CONVEX {
        let (p, o) = load(name);
        if p.objective != Objective::Sum {
            continue;
        }
        let (grid_x, grid) = refined_grid_min(&p);
        let rep = solve(&p, &o).unwrap();
        let mut candidates = vec![rep.best_x, grid_x];
        let mut r = rng(7);
        let (lo, hi) = search_box(&p);
        for _ in 0..50 {
            let x = Point::new(
                (0..p.dimension)
                    .map(|i| rand::Rng::gen_range(&mut r, lo[i]..=hi[i]))
                    .collect(),
            );
            candidates.push(x);
        }
        for x in candidates {
            if !contains(&p.constraint, &x, 1e-9).unwrap() || !evaluate_objective(&p, &x).unwrap().is_finite() {
                continue;
            }
            let cert = certify(&p, &x, 1e-6).unwrap();
            if cert.residual <= 1e-6 {
                let value = evaluate_objective(&p, &x).unwrap().to_f64();
                assert!(value <= grid + 2e-3, "{name}: certified {x:?} has {value} > grid {grid}");
            }
        }
    }
}

#[test]
fn perturbed_two_ball_point_is_not_certified() {
    let pr = two_ball(Objective::Sum);
    let cert = certify(&pr, &p(&[0.8, 0.6]), 1e-6).unwrap();
    assert!(cert.residual > 0.05, "residual {}", cert.residual);
    assert!(!cert.certified);
}

#[test]
fn solves_are_deterministic() {
    for name in CONVEX {
        let (p, mut o) = load(name);
        o.trace = true;
        assert_eq!(solve(&p, &o).unwrap(), solve(&p, &o).unwrap(), "{name}");
    }
}

#[test]
fn nonconvex_targets_need_the_heuristic_flag() {
    let (p, mut o) = load("cusp.json");
    assert!(!p.all_convex());
    assert!(solve(&p, &o).is_err());
    assert!(certify(&p, &Point::zeros(2), 1e-6).is_err());
    o.heuristic = true;
    let rep = solve(&p, &o).unwrap();
    assert!(rep.best_value.is_finite());
    assert!(rep.best_value <= evaluate_objective(&p, &Point::zeros(2)).unwrap().to_f64());
}

#[test]
fn shifted_targets_trigger_the_infeasibility_warning() {
    let pr = ProblemSpec::new(
        SetExpr::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
        vec![Target {
            set: SetExpr::ball([0.0, -10.0], 1.0).unwrap(),
            direction: p(&[0.0, 1.0]),
        }],
        Objective::Sum,
    )
    .unwrap();
    let rep = existence_precheck(&pr).unwrap();
    assert_eq!(rep.feasible_point, None);
    assert!(!rep.warnings.is_empty());
}
