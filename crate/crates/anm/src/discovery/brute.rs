//! Exhaustive score minimization over every DAG.

use std::collections::BTreeMap;

use crate::data::Dataset;
use crate::error::Result;
use crate::graph::enumerate_dags_capped;
use crate::regression::RegressionMethod;
use crate::score::{ScoreOptions, Scorer};

use super::DiscoveryResult;

/// Exact search, p <= 4 (543 graphs). Use [`brute_force_capped`] to unlock
/// p = 5 (29,281 graphs) when the cost is acceptable.
pub fn brute_force(data: &Dataset, rm: RegressionMethod, lambda: f64) -> Result<DiscoveryResult> {
    brute_force_capped(data, rm, lambda, 4)
}

pub fn brute_force_capped(
    data: &Dataset,
    rm: RegressionMethod,
    lambda: f64,
    max_p: usize,
) -> Result<DiscoveryResult> {
    let graphs = enumerate_dags_capped(data.p(), max_p)?;
    let scorer = Scorer::new(data, rm, ScoreOptions { lambda, ..Default::default() });
    let mut best: Option<crate::score::ScoreReport> = None;
    for g in &graphs {
        let report = scorer.score(g)?;
        let better = match &best {
            None => true,
            Some(b) => {
                report.total < b.total
                    || (report.total == b.total && g.edges() < b.graph.edges())
            }
        };
        if better {
            best = Some(report);
        }
    }
    let report = best.expect("enumeration yields at least the empty graph");
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("graphs_scored".to_owned(), graphs.len() as f64);
    diagnostics.insert("fits".to_owned(), scorer.fit_count() as f64);
    Ok(DiscoveryResult {
        graph: report.graph.clone(),
        order: Some(report.graph.topological_order()),
        score: Some(report),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::graph::Dag;
    use crate::rng::rng_from_seed;
    use crate::score::LAMBDA_DEFAULT;
    use rand::Rng;

    #[test]
    fn single_node_yields_empty_graph() {
        let d = Dataset::from_columns(vec![(0..30).map(|i| i as f64 * 0.1).collect()]).unwrap();
        let r = brute_force(&d, RegressionMethod::Linear, LAMBDA_DEFAULT).unwrap();
        assert_eq!(r.graph, Dag::new(1).unwrap());
        assert_eq!(r.score.unwrap().total, 0.0);
    }

    #[test]
    fn finds_bivariate_direction() {
        let mut hits = 0;
        for seed in 0..10u64 {
            let mut rng = rng_from_seed(200 + seed);
            let n = 300;
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            let y: Vec<f64> = x.iter().map(|v| v + 0.3 * rng.gen_range(-1.0..1.0f64)).collect();
            let d = Dataset::from_columns(vec![x, y]).unwrap();
            let r = brute_force(&d, RegressionMethod::Linear, LAMBDA_DEFAULT).unwrap();
            if r.graph.edges() == vec![(0, 1)] {
                hits += 1;
            }
        }
        assert!(hits >= 9, "correct direction in {hits}/10");
    }

    #[test]
    fn refuses_oversized_problems() {
        let cols: Vec<Vec<f64>> = (0..5).map(|j| (0..20).map(|i| (i * j) as f64).collect()).collect();
        let d = Dataset::from_columns(cols).unwrap();
        assert!(matches!(
            brute_force(&d, RegressionMethod::Linear, LAMBDA_DEFAULT),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn score_is_global_minimum() {
        let mut rng = rng_from_seed(33);
        let n = 80;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v + 0.2 * rng.gen_range(-1.0..1.0f64)).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let d = Dataset::from_columns(vec![x, y, z]).unwrap();
        let r = brute_force(&d, RegressionMethod::Linear, LAMBDA_DEFAULT).unwrap();
        let best = r.score.unwrap().total;
        // Spot-check against a few specific graphs.
        for edges in [vec![], vec![(0usize, 1usize)], vec![(1, 0)], vec![(0, 1), (2, 1)]] {
            let g = Dag::from_edges(3, &edges).unwrap();
            let s = crate::score::score_graph(&d, &g, RegressionMethod::Linear, LAMBDA_DEFAULT)
                .unwrap();
            assert!(best <= s.total + 1e-12);
        }
    }
}
