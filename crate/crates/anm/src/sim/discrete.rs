//! Binary discrete SEM with exact joint and interventional distributions.
//!
//! Backs the interventional oracle of the metrics module: p stays small, so
//! the full 2^p joint is enumerated and every distribution is exact up to
//! float rounding.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Dag;

use super::{Mechanism, NoiseLaw, SemSpec};

/// Largest p for exact enumeration of the 2^p state space.
const MAX_EXACT_P: usize = 20;

/// One binary variable per node; cpts[j] holds P(X_j = 1 | parent config),
/// indexed by the parent bitmask (bit 0 = smallest parent).
#[derive(Clone, Debug)]
pub struct DiscreteSem {
    graph: Dag,
    cpts: Vec<Vec<f64>>,
}

impl DiscreteSem {
    pub fn new(graph: Dag, cpts: Vec<Vec<f64>>) -> Result<DiscreteSem> {
        if cpts.len() != graph.p() {
            return Err(Error::NodeCountMismatch(cpts.len(), graph.p()));
        }
        for (j, table) in cpts.iter().enumerate() {
            let want = 1usize << graph.parents_of(j).len();
            if table.len() != want {
                return Err(Error::InvalidParam(format!(
                    "node {j}: CPT length {} for {} parents",
                    table.len(),
                    graph.parents_of(j).len()
                )));
            }
            if table.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
                return Err(Error::InvalidParam(format!(
                    "node {j}: CPT entries must lie strictly inside (0, 1)"
                )));
            }
        }
        Ok(DiscreteSem { graph, cpts })
    }

    /// CPT entries uniform in (0.1, 0.9): bounded away from determinism so
    /// generic random instances cannot produce non-faithful coincidences.
    pub fn random(g: &Dag, rng: &mut impl Rng) -> DiscreteSem {
        let cpts = (0..g.p())
            .map(|j| {
                (0..1usize << g.parents_of(j).len())
                    .map(|_| rng.gen_range(0.1..0.9))
                    .collect()
            })
            .collect();
        DiscreteSem { graph: g.clone(), cpts }
    }

    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    fn factor(&self, j: usize, state: usize) -> f64 {
        let mut cfg = 0usize;
        for (pos, k) in self.graph.parents_of(j).iter().enumerate() {
            cfg |= ((state >> k) & 1) << pos;
        }
        let q = self.cpts[j][cfg];
        if (state >> j) & 1 == 1 {
            q
        } else {
            1.0 - q
        }
    }

    fn check_scale(&self) -> Result<usize> {
        let p = self.graph.p();
        if p > MAX_EXACT_P {
            return Err(Error::ScaleCap {
                what: "exact joint over binary states",
                max: MAX_EXACT_P,
                got: p,
            });
        }
        Ok(p)
    }

    /// Exact joint over all 2^p states; index bit j carries node j's value.
    pub fn joint(&self) -> Result<Vec<f64>> {
        let p = self.check_scale()?;
        Ok((0..1usize << p).map(|s| (0..p).map(|j| self.factor(j, s)).product()).collect())
    }

    /// Interventional joint under do(X_node = value) by truncated
    /// factorization: the intervened node's factor is dropped and states
    /// disagreeing with the set value get probability zero.
    pub fn do_joint(&self, node: usize, value: bool) -> Result<Vec<f64>> {
        let p = self.check_scale()?;
        if node >= p {
            return Err(Error::NodeOutOfRange { node, p });
        }
        Ok((0..1usize << p)
            .map(|s| {
                if ((s >> node) & 1 == 1) != value {
                    return 0.0;
                }
                (0..p).filter(|&j| j != node).map(|j| self.factor(j, s)).product()
            })
            .collect())
    }

    pub fn to_spec(&self) -> SemSpec {
        let p = self.graph.p();
        SemSpec {
            graph: self.graph.clone(),
            mechanisms: self.cpts.iter().map(|t| Mechanism::Cpt(t.clone())).collect(),
            noises: vec![NoiseLaw::BernoulliTable; p],
            noise_draws: vec![Vec::new(); p],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::sim::{random_dag, sample_from_spec};

    #[test]
    fn joint_is_a_distribution() {
        let mut rng = rng_from_seed(4);
        for seed in 0..5 {
            let g = random_dag(4, seed).unwrap();
            let sem = DiscreteSem::random(&g, &mut rng);
            let joint = sem.joint().unwrap();
            assert!((joint.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(joint.iter().all(|&q| q > 0.0));
        }
    }

    #[test]
    fn empty_graph_joint_factorizes() {
        let mut rng = rng_from_seed(1);
        let sem = DiscreteSem::random(&Dag::new(3).unwrap(), &mut rng);
        let joint = sem.joint().unwrap();
        for s in 0..8usize {
            let product: f64 = (0..3).map(|j| sem.factor(j, s)).product();
            assert!((joint[s] - product).abs() < 1e-15);
        }
    }

    #[test]
    fn intervening_on_a_source_equals_conditioning() {
        let g = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut rng = rng_from_seed(2);
        let sem = DiscreteSem::random(&g, &mut rng);
        let joint = sem.joint().unwrap();
        for value in [false, true] {
            let bit = usize::from(value);
            let mass: f64 =
                (0..8).filter(|s| (s >> 0) & 1 == bit).map(|s| joint[s]).sum();
            let doj = sem.do_joint(0, value).unwrap();
            for s in 0..8usize {
                let cond = if (s >> 0) & 1 == bit { joint[s] / mass } else { 0.0 };
                assert!((doj[s] - cond).abs() < 1e-12, "state {s}");
            }
        }
    }

    #[test]
    fn intervening_on_a_sink_preserves_the_rest() {
        let g = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut rng = rng_from_seed(3);
        let sem = DiscreteSem::random(&g, &mut rng);
        let joint = sem.joint().unwrap();
        let doj = sem.do_joint(2, true).unwrap();
        for rest in 0..4usize {
            let before: f64 = [rest, rest | 4].iter().map(|&s| joint[s]).sum();
            let after: f64 = [rest, rest | 4].iter().map(|&s| doj[s]).sum();
            assert!((before - after).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_matches_the_exact_joint() {
        let g = Dag::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let mut rng = rng_from_seed(8);
        let sem = DiscreteSem::random(&g, &mut rng);
        let joint = sem.joint().unwrap();
        let n = 20_000;
        let d = sample_from_spec(&sem.to_spec(), n, 11).unwrap();
        let mut freq = vec![0usize; 8];
        for r in 0..n {
            let s = (0..3).fold(0usize, |acc, j| acc | ((d.value(r, j) as usize) << j));
            freq[s] += 1;
        }
        for s in 0..8 {
            let emp = freq[s] as f64 / n as f64;
            assert!((emp - joint[s]).abs() < 0.015, "state {s}: {emp} vs {}", joint[s]);
        }
    }

    #[test]
    fn rejects_malformed_tables() {
        let g = Dag::from_edges(2, &[(0, 1)]).unwrap();
        assert!(DiscreteSem::new(g.clone(), vec![vec![0.5], vec![0.5]]).is_err());
        assert!(DiscreteSem::new(g.clone(), vec![vec![0.5], vec![0.2, 1.0]]).is_err());
        assert!(DiscreteSem::new(g, vec![vec![0.5], vec![0.2, 0.8]]).is_ok());
    }
}
