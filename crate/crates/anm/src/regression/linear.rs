//! Ordinary least squares with intercept via the normal equations.

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::Result;
use crate::regression::la::solve_spd;
use crate::regression::{check_fit_inputs, mean_fit, RegressionFit, RegressionMethod};
use crate::NodeSet;

pub fn fit_linear(data: &Dataset, response: usize, predictors: NodeSet) -> Result<RegressionFit> {
    let (n, pred) = check_fit_inputs(data, response, predictors)?;
    if pred.is_empty() {
        return Ok(mean_fit(data, response, RegressionMethod::Linear, Default::default()));
    }

    let k = pred.len();
    let x = DMatrix::from_fn(n, k + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            data.value(i, pred[j - 1])
        }
    });
    let y = DVector::from_column_slice(data.column(response));

    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &y;
    let (beta, jitter) = solve_spd(&xtx, &xty)?;

    let fitted = &x * &beta;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();

    let mut hyper = std::collections::BTreeMap::new();
    hyper.insert("intercept".to_owned(), beta[0]);
    for (slot, &node) in pred.iter().enumerate() {
        hyper.insert(format!("beta_{node}"), beta[slot + 1]);
    }
    if jitter > 0.0 {
        hyper.insert("ridge_jitter".to_owned(), jitter);
    }

    Ok(RegressionFit {
        method: RegressionMethod::Linear,
        response,
        predictors,
        fitted: fitted.iter().copied().collect(),
        residuals,
        hyperparameters: hyper,
    })
}
