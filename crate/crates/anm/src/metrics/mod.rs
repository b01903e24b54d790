//! Structural distances between graphs: SHD and SID.
//!
//! SHD counts node pairs whose edge type differs. SID counts ordered pairs
//! (i, j) whose intervention distribution, estimated by adjusting for the
//! estimated graph's parent set PA_h(i), is wrong under the true graph. Two
//! independent routes compute SID: a graphical adjustment criterion and an
//! exact interventional oracle over random discrete SEMs; they must agree.

mod oracle;
mod sid;

pub use oracle::sid_oracle;
pub use sid::{sid, sid_bounds};

use crate::error::{Error, Result};
use crate::graph::Pdag;

/// SID outcome. For a DAG estimate, `lower == upper == bad_pairs`. For a
/// CPDAG estimate, lower/upper are min/max over the represented class and
/// `good_matrix` marks pairs good under every member, with `bad_pairs`
/// counting its false off-diagonal entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidResult {
    pub bad_pairs: usize,
    /// good_matrix[i][j] for the ordered pair (i, j); diagonal fixed true.
    pub good_matrix: Vec<Vec<bool>>,
    pub lower: usize,
    pub upper: usize,
}

impl SidResult {
    pub(crate) fn from_matrix(good_matrix: Vec<Vec<bool>>) -> SidResult {
        let bad_pairs = count_bad(&good_matrix);
        SidResult { bad_pairs, good_matrix, lower: bad_pairs, upper: bad_pairs }
    }
}

pub(crate) fn count_bad(good_matrix: &[Vec<bool>]) -> usize {
    good_matrix
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().filter(|&(j, &g)| i != j && !g).count())
        .sum()
}

/// Structural Hamming distance: the number of node pairs {i, j} whose edge
/// type (none, i->j, j->i, undirected) differs. Replacing an undirected edge
/// by a directed one or by a non-edge both count one.
pub fn shd(a: &Pdag, b: &Pdag) -> Result<usize> {
    if a.p() != b.p() {
        return Err(Error::NodeCountMismatch(a.p(), b.p()));
    }
    let mut count = 0;
    for i in 0..a.p() {
        for j in i + 1..a.p() {
            if a.edge_type(i, j) != b.edge_type(i, j) {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cpdag, Dag};
    use crate::sim::random_dag;

    fn pdag(p: usize, directed: &[(usize, usize)], undirected: &[(usize, usize)]) -> Pdag {
        Pdag::from_parts(p, directed, undirected).unwrap()
    }

    #[test]
    fn counts_differing_edge_types() {
        let chain = pdag(3, &[(0, 1), (1, 2)], &[]);
        assert_eq!(shd(&chain, &chain).unwrap(), 0);
        assert_eq!(shd(&pdag(3, &[], &[]), &chain).unwrap(), 2);
        // Orientation flip and directed-vs-undirected both cost one.
        assert_eq!(shd(&pdag(2, &[(0, 1)], &[]), &pdag(2, &[(1, 0)], &[])).unwrap(), 1);
        assert_eq!(shd(&pdag(2, &[(0, 1)], &[]), &pdag(2, &[], &[(0, 1)])).unwrap(), 1);
        assert!(shd(&pdag(2, &[], &[]), &pdag(3, &[], &[])).is_err());
    }

    #[test]
    fn is_a_metric_on_random_triples() {
        for seed in 0..30u64 {
            let a = Pdag::from(&random_dag(5, 3 * seed).unwrap());
            let b = Pdag::from(&random_dag(5, 3 * seed + 1).unwrap());
            let c = Pdag::from(&random_dag(5, 3 * seed + 2).unwrap());
            let (ab, ba) = (shd(&a, &b).unwrap(), shd(&b, &a).unwrap());
            assert_eq!(ab, ba);
            assert_eq!(shd(&a, &a).unwrap(), 0);
            assert!(ab <= shd(&a, &c).unwrap() + shd(&c, &b).unwrap());
            if ab == 0 {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn cpdag_distance_differs_from_dag_distance() {
        // Chain vs reversed chain: as DAGs every edge flips, as CPDAGs both
        // collapse to the same undirected chain.
        let g = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let h = Dag::from_edges(3, &[(2, 1), (1, 0)]).unwrap();
        assert_eq!(shd(&Pdag::from(&g), &Pdag::from(&h)).unwrap(), 2);
        assert_eq!(shd(&cpdag(&g), &cpdag(&h)).unwrap(), 0);
    }
}
