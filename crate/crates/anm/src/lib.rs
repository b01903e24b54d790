//! Causal structure discovery for additive noise models.
//!
//! The crate covers the full pipeline from data to evaluated structure
//! estimates:
//!
//! - [`graph`]: DAGs/PDAGs with positional node identity, d-separation,
//!   CPDAG construction, exhaustive DAG enumeration, and a text format.
//! - [`regression`]: linear least squares and kernel ridge regression, the
//!   pluggable "RM" slot of the discovery methods.
//! - [`hsic`]: the HSIC independence statistic with gamma-approximated and
//!   permutation p-values, plus the `-log10 p` dependence measure.
//! - [`score`]: the penalized independence score of a candidate DAG.
//! - [`discovery`]: RESIT, exhaustive score minimization, greedy DAG search,
//!   and bivariate direction inference.
//! - [`metrics`]: SHD and SID, with a discrete-SEM interventional oracle.
//! - [`sim`]: random DAGs and linear / nonlinear SEM samplers.
//! - [`identifiability`]: numerical evaluator for the third-order ODE that
//!   separates identifiable from non-identifiable bivariate models.
//! - [`pairs`]: cause-effect-pairs benchmark (ranking, accuracy curve).
//! - [`bench`]: batch benchmark harness over simulated regimes.
//!
//! All randomized routines take explicit 64-bit seeds and are bit-identical
//! across runs and platforms.

pub mod bench;
mod bits;
pub mod data;
pub mod discovery;
mod error;
pub mod graph;
pub mod hsic;
pub mod identifiability;
mod kernels;
pub mod metrics;
pub mod pairs;
pub mod regression;
pub mod rng;
pub mod score;
pub mod sim;

pub use bits::NodeSet;
pub use error::{Error, Result};
