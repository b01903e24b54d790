//! Kernel ridge regression with an RBF kernel on standardized predictors.
//!
//! Stands in for Gaussian-process regression: the kernel-ridge mean equals
//! the GP posterior mean, with cross-validation replacing marginal-likelihood
//! optimization. Bandwidth starts at the median pairwise distance, then a
//! multiplier and the ridge are chosen by seeded 5-fold CV over a fixed grid.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernels::{median_pairwise_distance, rbf_gram, rows_from_columns, standardize_columns};
use crate::regression::la::solve_spd;
use crate::regression::{check_fit_inputs, mean_fit, RegressionFit, RegressionMethod};
use crate::rng::rng_from_seed;
use crate::NodeSet;

const MULTIPLIERS: [f64; 3] = [0.5, 1.0, 2.0];
const RIDGES: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];

#[derive(Clone, Debug)]
pub struct KernelOptions {
    /// Seed for CV fold assignment (and row subsampling, when it applies).
    pub cv_seed: u64,
    /// CV runs on at most this many rows; the final fit always uses all rows.
    pub cv_row_cap: usize,
    pub folds: usize,
}

impl Default for KernelOptions {
    fn default() -> KernelOptions {
        KernelOptions { cv_seed: 0, cv_row_cap: 256, folds: 5 }
    }
}

pub fn fit_kernel(
    data: &Dataset,
    response: usize,
    predictors: NodeSet,
    opts: &KernelOptions,
) -> Result<RegressionFit> {
    let (n, pred) = check_fit_inputs(data, response, predictors)?;
    if n < 10 {
        return Err(Error::TooFewSamples { need: 9, got: n, what: "kernel regression" });
    }
    if pred.is_empty() {
        return Ok(mean_fit(data, response, RegressionMethod::Kernel, Default::default()));
    }

    let raw: Vec<&[f64]> = pred.iter().map(|&j| data.column(j)).collect();
    let (std_cols, dropped) = standardize_columns(&raw);
    let mut hyper = BTreeMap::new();
    if !dropped.is_empty() {
        hyper.insert("dropped_predictors".to_owned(), dropped.len() as f64);
    }
    if std_cols.is_empty() {
        hyper.insert("all_predictors_constant".to_owned(), 1.0);
        let mut fit = mean_fit(data, response, RegressionMethod::Kernel, hyper);
        fit.predictors = predictors;
        return Ok(fit);
    }

    let x = rows_from_columns(&std_cols);
    let Some(sigma0) = median_pairwise_distance(&x, 500) else {
        hyper.insert("degenerate_predictors".to_owned(), 1.0);
        let mut fit = mean_fit(data, response, RegressionMethod::Kernel, hyper);
        fit.predictors = predictors;
        return Ok(fit);
    };
    let y = data.column(response);

    // Seeded CV over (bandwidth multiplier, ridge); ties break toward the
    // first grid entry so the choice is deterministic.
    let mut rng = rng_from_seed(opts.cv_seed);
    let mut cv_rows: Vec<usize> = (0..n).collect();
    cv_rows.shuffle(&mut rng);
    if n > opts.cv_row_cap {
        cv_rows.truncate(opts.cv_row_cap);
        hyper.insert("cv_rows".to_owned(), opts.cv_row_cap as f64);
    }
    let m = cv_rows.len();
    let x_cv = DMatrix::from_fn(m, x.ncols(), |i, j| x[(cv_rows[i], j)]);
    let y_cv: Vec<f64> = cv_rows.iter().map(|&r| y[r]).collect();
    let bounds: Vec<usize> = (0..=opts.folds).map(|f| f * m / opts.folds).collect();

    let mut best = (f64::INFINITY, MULTIPLIERS[0], RIDGES[0]);
    for mult in MULTIPLIERS {
        let k_cv = rbf_gram(&x_cv, mult * sigma0);
        for ridge in RIDGES {
            let mut sse = 0.0;
            for f in 0..opts.folds {
                let (lo, hi) = (bounds[f], bounds[f + 1]);
                let train: Vec<usize> = (0..m).filter(|i| *i < lo || *i >= hi).collect();
                let t = train.len();
                let mut k_tr = DMatrix::from_fn(t, t, |a, b| k_cv[(train[a], train[b])]);
                for d in 0..t {
                    k_tr[(d, d)] += ridge * t as f64;
                }
                let y_bar = train.iter().map(|&i| y_cv[i]).sum::<f64>() / t as f64;
                let y_tr = DVector::from_iterator(t, train.iter().map(|&i| y_cv[i] - y_bar));
                let Ok((alpha, _)) = solve_spd(&k_tr, &y_tr) else {
                    sse = f64::INFINITY;
                    break;
                };
                for v in lo..hi {
                    let pred_v: f64 =
                        train.iter().enumerate().map(|(a, &i)| k_cv[(v, i)] * alpha[a]).sum();
                    let err = y_cv[v] - (pred_v + y_bar);
                    sse += err * err;
                }
            }
            if sse < best.0 {
                best = (sse, mult, ridge);
            }
        }
    }
    let (cv_sse, mult, ridge) = best;
    if !cv_sse.is_finite() {
        return Err(Error::SingularSystem);
    }

    // Final exact fit on all rows at the selected hyperparameters.
    let sigma = mult * sigma0;
    let mut k = rbf_gram(&x, sigma);
    for d in 0..n {
        k[(d, d)] += ridge * n as f64;
    }
    let y_bar = y.iter().sum::<f64>() / n as f64;
    let y_c = DVector::from_iterator(n, y.iter().map(|v| v - y_bar));
    let (alpha, jitter) = solve_spd(&k, &y_c)?;
    for d in 0..n {
        k[(d, d)] -= ridge * n as f64;
    }
    let fitted_v = &k * &alpha;
    let fitted: Vec<f64> = fitted_v.iter().map(|v| v + y_bar).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(v, f)| v - f).collect();

    hyper.insert("sigma0".to_owned(), sigma0);
    hyper.insert("sigma_multiplier".to_owned(), mult);
    hyper.insert("sigma".to_owned(), sigma);
    hyper.insert("ridge".to_owned(), ridge);
    hyper.insert("cv_mse".to_owned(), cv_sse / m as f64);
    if jitter > 0.0 {
        hyper.insert("ridge_jitter".to_owned(), jitter);
    }

    Ok(RegressionFit {
        method: RegressionMethod::Kernel,
        response,
        predictors,
        fitted,
        residuals,
        hyperparameters: hyper,
    })
}
