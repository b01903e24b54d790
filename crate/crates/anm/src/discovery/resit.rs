//! Regression with subsequent independence test.
//!
//! Phase 1 builds a causal order sink-first: among the remaining variables,
//! the one whose residual (after regressing on all other remaining ones) is
//! least dependent on them is the current sink; it keeps the remaining set
//! as candidate parents. Phase 2 prunes: a candidate parent is dropped iff
//! the residual stays independent of all variables earlier in the order.

use std::collections::BTreeMap;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{Dag, TopologicalOrder};
use crate::hsic::{hsic_pvalue, HsicOptions};
use crate::regression::{self, RegressionMethod};
use crate::NodeSet;

use super::DiscoveryResult;

#[derive(Clone, Copy, Debug)]
pub struct ResitOptions {
    /// Significance level of the phase-2 pruning test.
    pub alpha: f64,
    /// Test the residual against earlier variables jointly (one test) or
    /// against each earlier variable separately, pruning only if every
    /// pairwise test passes.
    pub joint_phase2: bool,
}

impl Default for ResitOptions {
    fn default() -> ResitOptions {
        ResitOptions { alpha: 0.05, joint_phase2: true }
    }
}

fn residuals_of(
    data: &Dataset,
    response: usize,
    predictors: NodeSet,
    rm: RegressionMethod,
) -> Result<Vec<f64>> {
    regression::fit(data, response, predictors, rm)
        .map(|f| f.residuals)
        .map_err(|e| Error::RegressionFailed {
            response,
            predictors: predictors.to_vec(),
            source: Box::new(e),
        })
}

/// P-value of independence between a residual and a set of columns.
fn independence_p(data: &Dataset, residual: &[f64], against: NodeSet) -> Result<f64> {
    let cols: Vec<&[f64]> = against.iter().map(|j| data.column(j)).collect();
    let r = hsic_pvalue(&[residual], &cols, &HsicOptions::default())?;
    Ok(r.p_value)
}

pub fn resit(data: &Dataset, rm: RegressionMethod, alpha: f64) -> Result<DiscoveryResult> {
    resit_with(data, rm, &ResitOptions { alpha, ..Default::default() })
}

pub fn resit_with(
    data: &Dataset,
    rm: RegressionMethod,
    opts: &ResitOptions,
) -> Result<DiscoveryResult> {
    let p = data.p();
    let n = data.n();
    if p < 2 {
        return Err(Error::InvalidParam(format!("need p >= 2 variables, got {p}")));
    }
    if n < 20 {
        return Err(Error::TooFewSamples { need: 19, got: n, what: "resit" });
    }
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::InvalidParam(format!("alpha must be in (0,1), got {}", opts.alpha)));
    }

    let mut diagnostics = BTreeMap::new();

    // Phase 1: peel off sinks. pi is built back to front.
    let mut remaining = NodeSet::full(p);
    let mut pi = vec![0usize; p];
    let mut parents = vec![NodeSet::EMPTY; p];
    let mut slot = p;
    while remaining.len() > 1 {
        let mut best: Option<(f64, usize)> = None;
        for k in remaining.iter() {
            let others = remaining.without(k);
            let res = residuals_of(data, k, others, rm)?;
            let pv = independence_p(data, &res, others)?;
            // Ties break toward the smaller index: strict > keeps the first.
            if best.map_or(true, |(b, _)| pv > b) {
                best = Some((pv, k));
            }
        }
        let (pv, sink) = best.expect("remaining nonempty");
        slot -= 1;
        pi[slot] = sink;
        parents[sink] = remaining.without(sink);
        remaining.remove(sink);
        diagnostics.insert(format!("phase1_p_node{sink}"), pv);
    }
    pi[0] = remaining.iter().next().expect("one source left");

    // Phase 2: prune candidate parents, earliest nodes first.
    let mut removed = 0usize;
    let mut kept = 0usize;
    for k in 1..p {
        let node = pi[k];
        let earlier: NodeSet = pi[..k].iter().copied().collect();
        for cand in parents[node].to_vec() {
            let trial = parents[node].without(cand);
            let res = residuals_of(data, node, trial, rm)?;
            let independent = if opts.joint_phase2 {
                independence_p(data, &res, earlier)? > opts.alpha
            } else {
                let mut all_pass = true;
                for v in earlier.iter() {
                    if independence_p(data, &res, NodeSet::singleton(v))? <= opts.alpha {
                        all_pass = false;
                        break;
                    }
                }
                all_pass
            };
            if independent {
                parents[node] = trial;
                removed += 1;
            } else {
                kept += 1;
            }
        }
    }
    diagnostics.insert("phase2_removed".to_owned(), removed as f64);
    diagnostics.insert("phase2_kept".to_owned(), kept as f64);

    let edges: Vec<(usize, usize)> = (0..p)
        .flat_map(|j| parents[j].iter().map(move |i| (i, j)))
        .collect();
    let graph = Dag::from_edges(p, &edges)?;
    let order = TopologicalOrder::new(pi);
    debug_assert!(order.is_topological_for(&graph));

    Ok(DiscoveryResult { graph, order: Some(order), score: None, diagnostics })
}
