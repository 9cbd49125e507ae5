//! Direct-summation reference implementations, written from the formulas
//! and kept independent of the library's code paths.

#![allow(dead_code)]

/// Weighted ICC from a dense symmetric weight matrix; sums over i > j.
/// Returns `(r, s_sq, t_sq, x_bar)`; `None` when no pair qualifies or the
/// variance is zero.
pub fn icc(
    w: &[Vec<f64>],
    x: &[Option<f64>],
    strict_literal: bool,
) -> Option<(f64, f64, f64, f64)> {
    let n = w.len();
    let mut sw = 0.0;
    let mut sx = 0.0;
    for i in 0..n {
        for j in 0..i {
            if let (true, Some(xi), Some(xj)) = (w[i][j] > 0.0, x[i], x[j]) {
                sw += w[i][j];
                sx += w[i][j] * (xi + xj);
            }
        }
    }
    if sw == 0.0 {
        return None;
    }
    let xbar = sx / (2.0 * sw);
    let mut s = 0.0;
    let mut t = 0.0;
    for i in 0..n {
        for j in 0..i {
            if let (true, Some(xi), Some(xj)) = (w[i][j] > 0.0, x[i], x[j]) {
                s += w[i][j] * ((xi - xbar).powi(2) + (xj - xbar).powi(2));
                t += w[i][j] * (xi - xbar) * (xj - xbar);
            }
        }
    }
    let s2 = s / (2.0 * sw);
    let t2 = if strict_literal {
        t / (2.0 * sw)
    } else {
        t / sw
    };
    if s2 == 0.0 {
        return None;
    }
    Some((t2 / s2, s2, t2, xbar))
}

/// Pearson correlation of two dense symmetric weight matrices over pairs
/// i > j selected by `domain` ("union", "intersection" or "all").
pub fn overlap(a: &[Vec<f64>], b: &[Vec<f64>], domain: &str) -> Option<f64> {
    let n = a.len();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..n {
        for j in 0..i {
            let keep = match domain {
                "union" => a[i][j] > 0.0 || b[i][j] > 0.0,
                "intersection" => a[i][j] > 0.0 && b[i][j] > 0.0,
                "all" => true,
                _ => unreachable!(),
            };
            if keep {
                xs.push(a[i][j]);
                ys.push(b[i][j]);
            }
        }
    }
    let m = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let ma = xs.iter().sum::<f64>() / m;
    let mb = ys.iter().sum::<f64>() / m;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - ma) * (y - mb);
        da += (x - ma).powi(2);
        db += (y - mb).powi(2);
    }
    if da == 0.0 || db == 0.0 {
        return None;
    }
    Some(num / (da.sqrt() * db.sqrt()))
}

/// Directed weights of one node's out-counts: n^alpha / sum n^alpha.
pub fn alpha_row(counts: &[f64], alpha: f64) -> Vec<f64> {
    let powered: Vec<f64> = counts.iter().map(|n| n.powf(alpha)).collect();
    let total: f64 = powered.iter().sum();
    powered.iter().map(|p| p / total).collect()
}

/// Dense symmetric weights: (w_ij + w_ji)/2 from dense directed counts.
pub fn symmetric_weights(counts: &[Vec<f64>], alpha: f64) -> Vec<Vec<f64>> {
    let n = counts.len();
    let mut directed = vec![vec![0.0; n]; n];
    for i in 0..n {
        let targets: Vec<usize> = (0..n).filter(|&j| counts[i][j] > 0.0).collect();
        let row: Vec<f64> = targets.iter().map(|&j| counts[i][j]).collect();
        if row.is_empty() {
            continue;
        }
        for (&j, w) in targets.iter().zip(alpha_row(&row, alpha)) {
            directed[i][j] = w;
        }
    }
    let mut sym = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            sym[i][j] = (directed[i][j] + directed[j][i]) / 2.0;
        }
    }
    sym
}
