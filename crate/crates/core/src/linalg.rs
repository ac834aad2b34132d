//! Small dense linear algebra: nonnegative least squares, least-distance
//! programming, null spaces.
//!
//! Everything here works on tiny systems (d <= 9 columns, a few dozen rows),
//! so clarity wins over performance.

use nalgebra::{DMatrix, DVector};

use crate::point::{dot, norm};

/// Lawson-Hanson active-set NNLS: `argmin ||A x - b||` subject to `x >= 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let (m, n) = a.shape();
    let mut x = DVector::zeros(n);
    if n == 0 || m == 0 {
        return x;
    }
    let scale = a.norm().max(1.0) * b.norm().max(1.0);
    let tol = 1e-13 * scale * (m.max(n) as f64);
    let mut passive = vec![false; n];

    for _ in 0..(3 * n + 30) {
        let w = a.transpose() * (b - a * &x);
        let entering = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = entering else { break };
        passive[t] = true;

        // Inner loop: restore feasibility of the passive least-squares solution.
        for _ in 0..=n {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let zp = lstsq_columns(a, &idx, b);
            if idx.iter().enumerate().all(|(k, _)| zp[k] > 0.0) {
                x.fill(0.0);
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = zp[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            let mut blocking = idx[0];
            for (k, &j) in idx.iter().enumerate() {
                if zp[k] <= 0.0 {
                    let denom = x[j] - zp[k];
                    let aj = if denom > 0.0 { x[j] / denom } else { 0.0 };
                    if aj < alpha {
                        alpha = aj;
                        blocking = j;
                    }
                }
            }
            let alpha = alpha.clamp(0.0, 1.0);
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (zp[k] - x[j]);
            }
            x[blocking] = 0.0;
            for &j in &idx {
                if x[j] <= 0.0 {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

fn lstsq_columns(a: &DMatrix<f64>, cols: &[usize], b: &DVector<f64>) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, k| a[(i, cols[k])]);
    let svd = sub.svd(true, true);
    let eps = 1e-13 * svd.singular_values.max().max(1e-300);
    svd.solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(cols.len()))
}

/// Least-distance programming: the minimum-norm `y` with `G y >= h`
/// (`G` given row-wise). `None` when the system is infeasible.
pub(crate) fn least_distance(g: &[Vec<f64>], h: &[f64], dim: usize) -> Option<Vec<f64>> {
    if g.is_empty() || h.iter().all(|&hi| hi <= 0.0) {
        return Some(vec![0.0; dim]);
    }
    let m = g.len();
    // E = [G^T; h^T], f = e_{n+1}; then y = r[..n] / -r[n] with r = E u - f.
    let e = DMatrix::from_fn(dim + 1, m, |i, j| if i < dim { g[j][i] } else { h[j] });
    let mut f = DVector::zeros(dim + 1);
    f[dim] = 1.0;
    let u = nnls(&e, &f);
    let r = &e * &u - &f;
    if r.norm() < 1e-11 || -r[dim] <= 0.0 {
        return None;
    }
    let y: Vec<f64> = (0..dim).map(|i| r[i] / -r[dim]).collect();
    let violation = |y: &[f64]| {
        g.iter()
            .zip(h)
            .map(|(gi, hi)| hi - dot(gi, y))
            .fold(0.0_f64, f64::max)
    };
    let scale = 1.0 + norm(&y) + h.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    // Guard against a numerically inconsistent answer.
    if violation(&y) > 1e-7 * scale {
        return None;
    }
    // -r[dim] = 1 / (1 + |y|^2) loses digits when |y| is large. The min-norm
    // point of the active rows' affine set is no longer than the optimum, so
    // when it is feasible it is the optimum.
    let active: Vec<usize> = (0..m).filter(|&j| u[j] > 0.0).collect();
    if let Some(p) = polish_on_active(g, h, &active, dim) {
        if violation(&p) <= 1e-12 * scale && norm(&p) <= norm(&y) * (1.0 + 1e-6) + 1e-12 {
            return Some(p);
        }
    }
    Some(y)
}

/// Minimum-norm `y` with `<g_j, y> = h_j` on `active`.
fn polish_on_active(g: &[Vec<f64>], h: &[f64], active: &[usize], dim: usize) -> Option<Vec<f64>> {
    if active.is_empty() {
        return None;
    }
    let ga = DMatrix::from_fn(active.len(), dim, |k, i| g[active[k]][i]);
    let ha = DVector::from_iterator(active.len(), active.iter().map(|&j| h[j]));
    // Pseudo-inverse solve; the Gram matrix would square the conditioning.
    let svd = ga.svd(true, true);
    let eps = 1e-13 * svd.singular_values.max().max(1e-300);
    let y = svd.solve(&ha, eps).ok()?;
    Some(y.iter().copied().collect())
}

/// Euclidean projection of `p` onto `{x : <a_i, x> <= b_i}`; `None` when empty.
pub(crate) fn project_onto_rows(rows: &[(Vec<f64>, f64)], p: &[f64]) -> Option<Vec<f64>> {
    // y = x - p solves: min |y| s.t. -a_i . y >= a_i . p - b_i
    let g: Vec<Vec<f64>> = rows.iter().map(|(a, _)| a.iter().map(|x| -x).collect()).collect();
    let h: Vec<f64> = rows.iter().map(|(a, b)| dot(a, p) - b).collect();
    let y = least_distance(&g, &h, p.len())?;
    Some(p.iter().zip(&y).map(|(a, b)| a + b).collect())
}

/// Orthonormal basis of `{y : <r, y> = 0 for every row r}`.
pub(crate) fn null_space(rows: &[Vec<f64>], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
    }
    let m = rows.len().max(dim);
    let mat = DMatrix::from_fn(m, dim, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = mat.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut out = Vec::new();
    for k in 0..dim {
        if svd.singular_values[k] <= tol {
            out.push((0..dim).map(|j| vt[(k, j)]).collect());
        }
    }
    out
}

pub(crate) fn rank(rows: &[Vec<f64>], dim: usize, tol: f64) -> usize {
    dim - null_space(rows, dim, tol).len()
}

/// Row-reduced echelon basis of `span(vectors)` with each row scaled to unit
/// length and a positive leading entry. Canonical for a given subspace.
pub(crate) fn canonical_span(vectors: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    // Orthonormalize first so the pivoting below is well conditioned.
    let perp = null_space(vectors, dim, 1e-9);
    let basis = null_space(&perp, dim, 1e-9);
    let mut m: Vec<Vec<f64>> = basis;
    let k = m.len();
    let mut row = 0;
    for col in 0..dim {
        if row == k {
            break;
        }
        let piv = (row..k)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() < 1e-9 {
            continue;
        }
        m.swap(row, piv);
        let p = m[row][col];
        for x in m[row].iter_mut() {
            *x /= p;
        }
        for i in 0..k {
            if i != row {
                let f = m[i][col];
                if f != 0.0 {
                    for j in 0..dim {
                        m[i][j] -= f * m[row][j];
                    }
                }
            }
        }
        row += 1;
    }
    m.truncate(row);
    for r in m.iter_mut() {
        let n = norm(r);
        for x in r.iter_mut() {
            *x = snap(*x / n);
        }
    }
    m
}

/// Flushes roundoff-sized values to zero (and `-0.0` to `0.0`).
pub(crate) fn snap(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        0.0
    } else {
        x
    }
}
