//! RBF kernel plumbing shared by kernel regression and the dependence test.

use nalgebra::DMatrix;

/// Column-wise standardization to mean 0, sd 1. Columns with sd below
/// `1e-12` are dropped; their original positions are returned alongside.
pub(crate) fn standardize_columns(cols: &[&[f64]]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        if sd < 1e-12 {
            dropped.push(j);
        } else {
            kept.push(col.iter().map(|v| (v - mean) / sd).collect());
        }
    }
    (kept, dropped)
}

/// Pack equal-length columns into an n x k matrix of row vectors.
pub(crate) fn rows_from_columns(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = cols[0].len();
    let k = cols.len();
    DMatrix::from_fn(n, k, |i, j| cols[j][i])
}

/// Median of the positive pairwise Euclidean distances between rows of x,
/// on at most `cap` rows taken by a deterministic stride. None when every
/// pair coincides.
pub(crate) fn median_pairwise_distance(x: &DMatrix<f64>, cap: usize) -> Option<f64> {
    let n = x.nrows();
    let idx: Vec<usize> = if n <= cap {
        (0..n).collect()
    } else {
        (0..cap).map(|t| t * n / cap).collect()
    };
    let mut sq = Vec::with_capacity(idx.len() * (idx.len() - 1) / 2);
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            let d2: f64 = (x.row(i) - x.row(j)).norm_squared();
            if d2 > 0.0 {
                sq.push(d2);
            }
        }
    }
    if sq.is_empty() {
        return None;
    }
    sq.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let m = sq.len();
    let med_sq = if m % 2 == 1 { sq[m / 2] } else { 0.5 * (sq[m / 2 - 1] + sq[m / 2]) };
    Some(med_sq.sqrt())
}

/// Gram matrix of the isotropic RBF kernel exp(-|xi - xj|^2 / (2 sigma^2)).
pub(crate) fn rbf_gram(x: &DMatrix<f64>, sigma: f64) -> DMatrix<f64> {
    let n = x.nrows();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for j in i + 1..n {
            let d2 = (x.row(i) - x.row(j)).norm_squared();
            let v = (-d2 * inv).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}
