//! Hilbert-Schmidt independence criterion with gamma and permutation
//! p-values.
//!
//! The statistic is the biased estimate (1/n^2) tr(K H L H) on RBF Gram
//! matrices of the two blocks; each block is standardized column-wise and
//! given one isotropic kernel with median-heuristic bandwidth. The gamma
//! p-value moment-matches the null of n * HSIC from the Gram matrices; the
//! permutation p-value shuffles the rows of the second block.
//!
//! The gamma variance formula needs n >= 6; for n in {4, 5} the result is
//! flagged degenerate (p = 1.0). Permutation mode has no such floor.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use statrs::distribution::{ContinuousCDF, Gamma};

use crate::error::{Error, Result};
use crate::kernels::{median_pairwise_distance, rbf_gram, rows_from_columns, standardize_columns};
use crate::rng::rng_from_seed;

/// Ceiling of the dependence measure: -log10 of the contractual p-value
/// floor 1e-350. The floor itself is below the smallest subnormal f64, so
/// the clamp acts on the measure, keeping scores finite.
pub const DM_MAX: f64 = 350.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvalueMethod {
    /// Moment-matched gamma approximation of the null (production path).
    Gamma,
    /// Empirical null from `b` row shuffles of the second block.
    Permutation { b: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct HsicOptions {
    pub method: PvalueMethod,
    /// Kernel widths on the standardized blocks; median heuristic if unset.
    pub bandwidths: Option<(f64, f64)>,
}

impl Default for HsicOptions {
    fn default() -> HsicOptions {
        HsicOptions { method: PvalueMethod::Gamma, bandwidths: None }
    }
}

#[derive(Clone, Debug)]
pub struct HsicResult {
    /// Biased HSIC estimate, clamped to be nonnegative.
    pub statistic: f64,
    pub n: usize,
    pub p_value: f64,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    pub method: PvalueMethod,
    /// Set when a block is constant (or the moment fit is impossible);
    /// then statistic = 0 and p_value = 1.
    pub degenerate: bool,
}

struct Prepared {
    kc: DMatrix<f64>,
    lc: DMatrix<f64>,
    /// Off-diagonal means of the raw Gram matrices.
    mu_x: f64,
    mu_y: f64,
}

enum Blocks {
    Degenerate { n: usize },
    Ready(Box<Prepared>),
}

fn center(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let inv = 1.0 / n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| g.row(i).sum() * inv).collect();
    let total: f64 = row_means.iter().sum::<f64>() * inv;
    DMatrix::from_fn(n, n, |i, j| g[(i, j)] - row_means[i] - row_means[j] + total)
}

fn off_diag_mean(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    (g.sum() - g.diagonal().sum()) / (n * (n - 1)) as f64
}

fn prepare(x_cols: &[&[f64]], y_cols: &[&[f64]], opts: &HsicOptions) -> Result<Blocks> {
    if x_cols.is_empty() || y_cols.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let n = x_cols[0].len();
    for col in x_cols.iter().chain(y_cols.iter()) {
        if col.len() != n {
            return Err(Error::RowCountMismatch(n, col.len()));
        }
    }
    if n < 4 {
        return Err(Error::TooFewSamples { need: 3, got: n, what: "HSIC" });
    }
    let (x_std, _) = standardize_columns(x_cols);
    let (y_std, _) = standardize_columns(y_cols);
    if x_std.is_empty() || y_std.is_empty() {
        return Ok(Blocks::Degenerate { n });
    }
    let x = rows_from_columns(&x_std);
    let y = rows_from_columns(&y_std);
    let (sx, sy) = match opts.bandwidths {
        Some(pair) => {
            if pair.0 <= 0.0 || pair.1 <= 0.0 {
                return Err(Error::InvalidParam("bandwidths must be positive".into()));
            }
            pair
        }
        None => {
            let mx = median_pairwise_distance(&x, 500);
            let my = median_pairwise_distance(&y, 500);
            match (mx, my) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(Blocks::Degenerate { n }),
            }
        }
    };
    let k = rbf_gram(&x, sx);
    let l = rbf_gram(&y, sy);
    let mu_x = off_diag_mean(&k);
    let mu_y = off_diag_mean(&l);
    let kc = center(&k);
    let lc = center(&l);
    Ok(Blocks::Ready(Box::new(Prepared { kc, lc, mu_x, mu_y })))
}

fn raw_sum(kc: &DMatrix<f64>, lc: &DMatrix<f64>) -> f64 {
    kc.zip_fold(lc, 0.0, |acc, a, b| acc + a * b)
}

/// Biased HSIC estimate (1/n^2) tr(K H L H); 0 for degenerate blocks.
pub fn hsic_statistic(
    x_cols: &[&[f64]],
    y_cols: &[&[f64]],
    bandwidths: Option<(f64, f64)>,
) -> Result<f64> {
    let opts = HsicOptions { method: PvalueMethod::Gamma, bandwidths };
    match prepare(x_cols, y_cols, &opts)? {
        Blocks::Degenerate { .. } => Ok(0.0),
        Blocks::Ready(p) => {
            let n = p.kc.nrows() as f64;
            Ok((raw_sum(&p.kc, &p.lc) / (n * n)).max(0.0))
        }
    }
}

fn degenerate_result(n: usize, method: PvalueMethod) -> HsicResult {
    HsicResult {
        statistic: 0.0,
        n,
        p_value: 1.0,
        gamma_shape: 1.0,
        gamma_scale: 1.0,
        method,
        degenerate: true,
    }
}

pub fn hsic_pvalue(x_cols: &[&[f64]], y_cols: &[&[f64]], opts: &HsicOptions) -> Result<HsicResult> {
    let prep = match prepare(x_cols, y_cols, opts)? {
        Blocks::Degenerate { n } => return Ok(degenerate_result(n, opts.method)),
        Blocks::Ready(p) => p,
    };
    let n = prep.kc.nrows();
    let m = n as f64;
    let sum = raw_sum(&prep.kc, &prep.lc);
    let statistic = (sum / (m * m)).max(0.0);
    let test_stat = m * statistic;

    // Null moments of m * HSIC from the Gram matrices (moment matching).
    let mean = (1.0 + prep.mu_x * prep.mu_y - prep.mu_x - prep.mu_y) / m;
    let mut var_sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                let v = prep.kc[(i, j)] * prep.lc[(i, j)] / 6.0;
                var_sum += v * v;
            }
        }
    }
    let var = 72.0 * (m - 4.0) * (m - 5.0) / (m * (m - 1.0) * (m - 2.0) * (m - 3.0)) * var_sum
        / (m * (m - 1.0));
    if !(mean > 0.0) || !(var > 0.0) {
        // Moment fit impossible (n in {4, 5} or vanishing variance); keep
        // the statistic but refuse to claim significance.
        let mut r = degenerate_result(n, opts.method);
        r.statistic = statistic;
        return Ok(r);
    }
    let shape = mean * mean / var;
    let scale = var * m / mean;

    let p_value = match opts.method {
        PvalueMethod::Gamma => {
            let dist = Gamma::new(shape, 1.0 / scale)
                .map_err(|e| Error::InvalidParam(format!("gamma fit: {e}")))?;
            (1.0 - dist.cdf(test_stat)).clamp(0.0, 1.0)
        }
        PvalueMethod::Permutation { b, seed } => {
            let mut rng = rng_from_seed(seed);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut at_least = 0usize;
            for _ in 0..b {
                perm.shuffle(&mut rng);
                let mut s = 0.0;
                for j in 0..n {
                    let pj = perm[j];
                    for i in 0..n {
                        s += prep.kc[(i, j)] * prep.lc[(perm[i], pj)];
                    }
                }
                if s >= sum {
                    at_least += 1;
                }
            }
            (1 + at_least) as f64 / (b + 1) as f64
        }
    };

    Ok(HsicResult {
        statistic,
        n,
        p_value,
        gamma_shape: shape,
        gamma_scale: scale,
        method: opts.method,
        degenerate: false,
    })
}

/// Dependence measure of a residual against a block of other variables:
/// -log10 of the (floored) gamma HSIC p-value. Higher means more dependent.
pub fn dependence_measure(residual: &[f64], others: &[&[f64]]) -> Result<f64> {
    let r = hsic_pvalue(&[residual], others, &HsicOptions::default())?;
    Ok(dm_from_p(r.p_value))
}

/// -log10(max(p, 1e-350)); maps p-values to a bounded dependence scale.
pub fn dm_from_p(p: f64) -> f64 {
    (-p.max(0.0).log10()).min(DM_MAX)
}
