//! Regression backends: fit a response on predictors, keep the residuals.
//!
//! Both backends return in-sample residuals; discovery methods consume
//! nothing else. Cross-fitting is deliberately out of scope.

mod kernel;
pub(crate) mod la;
mod linear;

use std::collections::BTreeMap;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::NodeSet;

pub use kernel::{fit_kernel, KernelOptions};
pub use linear::fit_linear;

/// Which regression backend fills the RM slot of a discovery method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegressionMethod {
    Linear,
    Kernel,
}

impl RegressionMethod {
    pub fn name(self) -> &'static str {
        match self {
            RegressionMethod::Linear => "linear",
            RegressionMethod::Kernel => "kernel",
        }
    }

    pub fn parse(s: &str) -> Result<RegressionMethod> {
        match s {
            "linear" => Ok(RegressionMethod::Linear),
            "kernel" => Ok(RegressionMethod::Kernel),
            other => Err(Error::InvalidParam(format!("unknown regression method `{other}`"))),
        }
    }
}

/// One completed fit. `residuals[i] = data[i, response] - fitted[i]` always
/// holds; for an empty predictor set `fitted` is the constant sample mean.
#[derive(Clone, Debug)]
pub struct RegressionFit {
    pub method: RegressionMethod,
    pub response: usize,
    pub predictors: NodeSet,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Chosen hyperparameters plus numeric warning flags.
    pub hyperparameters: BTreeMap<String, f64>,
}

impl RegressionFit {
    pub fn mse(&self) -> f64 {
        let n = self.residuals.len() as f64;
        self.residuals.iter().map(|r| r * r).sum::<f64>() / n
    }
}

/// Dispatch on the method. Kernel fits seed their CV fold assignment from
/// (response, predictor set) so repeated fits are bit-identical and
/// discovery methods stay deterministic without threading a seed through.
pub fn fit(
    data: &Dataset,
    response: usize,
    predictors: NodeSet,
    method: RegressionMethod,
) -> Result<RegressionFit> {
    match method {
        RegressionMethod::Linear => fit_linear(data, response, predictors),
        RegressionMethod::Kernel => {
            let opts = KernelOptions {
                cv_seed: derive_seed(0, &[response as u64, predictors.bits()]),
                ..KernelOptions::default()
            };
            fit_kernel(data, response, predictors, &opts)
        }
    }
}

/// Shared precondition checks. Returns (n, sorted predictor indices).
fn check_fit_inputs(
    data: &Dataset,
    response: usize,
    predictors: NodeSet,
) -> Result<(usize, Vec<usize>)> {
    let p = data.p();
    if response >= p {
        return Err(Error::NodeOutOfRange { node: response, p });
    }
    if let Some(bad) = predictors.iter().find(|&j| j >= p) {
        return Err(Error::NodeOutOfRange { node: bad, p });
    }
    if predictors.contains(response) {
        return Err(Error::ResponseInPredictors(response));
    }
    let n = data.n();
    if n <= predictors.len() + 1 {
        return Err(Error::TooFewSamples {
            need: predictors.len() + 1,
            got: n,
            what: "regression",
        });
    }
    Ok((n, predictors.to_vec()))
}

/// Mean-only fit used by both backends for an empty predictor set.
fn mean_fit(
    data: &Dataset,
    response: usize,
    method: RegressionMethod,
    hyperparameters: BTreeMap<String, f64>,
) -> RegressionFit {
    let y = data.column(response);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    RegressionFit {
        method,
        response,
        predictors: NodeSet::EMPTY,
        fitted: vec![mean; y.len()],
        residuals: y.iter().map(|v| v - mean).collect(),
        hyperparameters,
    }
}
