//! Greedy DAG search over the penalized independence score.
//!
//! Starts from the empty graph. Each step scores single-edit neighbors,
//! visiting edits grouped by the node whose parent set they modify, in a
//! random node order biased toward nodes with dependent residuals (sampling
//! without replacement with probability proportional to 1 / DM). The first
//! strictly better neighbor is accepted, but at least p neighbors are scored
//! before accepting; at most p(p-1) per step. At a local minimum the search
//! looks one step ahead through the best neighbor H and moves on to H's best
//! neighbor K only if K beats the current graph; otherwise it stops. The
//! immediately preceding graph is excluded from each scan.

use std::collections::BTreeMap;

use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::regression::RegressionMethod;
use crate::rng::rng_from_seed;
use crate::score::{ScoreOptions, ScoreReport, Scorer};

use super::DiscoveryResult;

fn sample_order(weights: &[f64], rng: &mut impl Rng) -> Vec<usize> {
    let mut remaining: Vec<(usize, f64)> = weights.iter().copied().enumerate().collect();
    let mut out = Vec::with_capacity(weights.len());
    while !remaining.is_empty() {
        let total: f64 = remaining.iter().map(|&(_, w)| w).sum();
        let mut u = rng.gen::<f64>() * total;
        let mut pick = remaining.len() - 1;
        for (idx, &(_, w)) in remaining.iter().enumerate() {
            u -= w;
            if u <= 0.0 {
                pick = idx;
                break;
            }
        }
        out.push(remaining.remove(pick).0);
    }
    out
}

struct Scan {
    first_improver: Option<ScoreReport>,
    best: Option<ScoreReport>,
    scored: usize,
}

fn scan_neighbors(
    scorer: &Scorer,
    g: &Dag,
    g_rep: &ScoreReport,
    tabu: Option<&Dag>,
    accept_first: bool,
    rng: &mut impl Rng,
) -> Result<Scan> {
    let p = g.p();
    let cap = p * (p - 1);
    // Nodes with strongly dependent residuals get edited first. The weight is
    // the reciprocal of the residual p-value, i.e. 10^dm; the exponent cap only
    // keeps the weight finite.
    let weights: Vec<f64> =
        g_rep.per_node_dm.iter().map(|dm| 10f64.powf(dm.min(300.0))).collect();
    let order = sample_order(&weights, rng);

    let mut scan = Scan { first_improver: None, best: None, scored: 0 };
    'nodes: for &j in &order {
        for i in 0..p {
            if i == j {
                continue;
            }
            // Edits that modify pa(j): remove or reverse an in-edge, or add one.
            let mut candidates: Vec<Dag> = Vec::with_capacity(2);
            if g.has_edge(i, j) {
                candidates.push(g.without_edge(i, j)?);
                if let Ok(rev) = g.with_reversed(i, j) {
                    candidates.push(rev);
                }
            } else if !g.has_edge(j, i) {
                if let Ok(add) = g.with_edge(i, j) {
                    candidates.push(add);
                }
            }
            for cand in candidates {
                if tabu == Some(&cand) {
                    continue;
                }
                let rep = scorer.score(&cand)?;
                scan.scored += 1;
                if rep.total < g_rep.total && scan.first_improver.is_none() {
                    scan.first_improver = Some(rep.clone());
                }
                if scan.best.as_ref().map_or(true, |b| rep.total < b.total) {
                    scan.best = Some(rep);
                }
                if scan.scored >= cap
                    || (accept_first && scan.first_improver.is_some() && scan.scored >= p)
                {
                    break 'nodes;
                }
            }
        }
    }
    Ok(scan)
}

pub fn gds(
    data: &Dataset,
    rm: RegressionMethod,
    lambda: f64,
    seed: u64,
) -> Result<DiscoveryResult> {
    let p = data.p();
    if p < 2 {
        return Err(Error::InvalidParam(format!("need p >= 2 variables, got {p}")));
    }
    let scorer = Scorer::new(data, rm, ScoreOptions { lambda, ..Default::default() });
    let mut rng = rng_from_seed(seed);

    let mut current = scorer.score(&Dag::new(p)?)?;
    let mut prev: Option<Dag> = None;
    let mut steps = 0usize;
    let mut scored_total = 0usize;
    let mut tabu_moves = 0usize;
    // Every accepted move strictly lowers the score, so this cannot loop;
    // the cap only guards against pathological float behavior.
    let max_steps = 50 * p * p;

    while steps < max_steps {
        steps += 1;
        let scan = scan_neighbors(&scorer, &current.graph, &current, prev.as_ref(), true, &mut rng)?;
        scored_total += scan.scored;
        if let Some(next) = scan.first_improver {
            prev = Some(std::mem::replace(&mut current, next).graph);
            continue;
        }
        // Local minimum: single look-ahead through the best neighbor. The
        // escape condition is existential over H's whole neighborhood, so
        // this scan must not stop at the first improvement over H.
        let Some(h) = scan.best else { break };
        let scan2 =
            scan_neighbors(&scorer, &h.graph, &h, Some(&current.graph), false, &mut rng)?;
        scored_total += scan2.scored;
        match scan2.best {
            Some(k) if k.total < current.total => {
                prev = Some(h.graph);
                current = k;
                tabu_moves += 1;
            }
            _ => break,
        }
    }

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("steps".to_owned(), steps as f64);
    diagnostics.insert("graphs_scored".to_owned(), scored_total as f64);
    diagnostics.insert("tabu_moves".to_owned(), tabu_moves as f64);
    diagnostics.insert("fits".to_owned(), scorer.fit_count() as f64);

    Ok(DiscoveryResult {
        graph: current.graph.clone(),
        order: Some(current.graph.topological_order()),
        score: Some(current),
        diagnostics,
    })
}
