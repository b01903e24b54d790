use crate::bits::NodeSet;
use crate::error::{Error, Result};
use crate::graph::Dag;

/// Edge type between an ordered node pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeType {
    None,
    /// i -> j for the queried (i, j).
    Forward,
    /// j -> i for the queried (i, j).
    Backward,
    Undirected,
}

/// Partially directed graph: a mix of directed and undirected edges with
/// disjoint skeletons. CPDAGs are the main instance.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pdag {
    p: usize,
    /// dir_parents[j] = tails of directed edges into j.
    dir_parents: Vec<NodeSet>,
    /// und_adj[i] = undirected neighbors of i (symmetric).
    und_adj: Vec<NodeSet>,
}

impl Pdag {
    pub fn new(p: usize) -> Result<Pdag> {
        if p == 0 {
            return Err(Error::InvalidParam("node count must be >= 1".into()));
        }
        if p > NodeSet::MAX_NODES {
            return Err(Error::TooManyNodes { p, max: NodeSet::MAX_NODES });
        }
        Ok(Pdag { p, dir_parents: vec![NodeSet::EMPTY; p], und_adj: vec![NodeSet::EMPTY; p] })
    }

    pub fn from_parts(
        p: usize,
        directed: &[(usize, usize)],
        undirected: &[(usize, usize)],
    ) -> Result<Pdag> {
        let mut g = Pdag::new(p)?;
        for &(i, j) in directed {
            g.check_pair(i, j)?;
            if g.edge_type(i, j) != EdgeType::None {
                return Err(Error::DuplicateEdge(i, j));
            }
            g.dir_parents[j].insert(i);
        }
        for &(i, j) in undirected {
            g.check_pair(i, j)?;
            if g.edge_type(i, j) != EdgeType::None {
                return Err(Error::DuplicateEdge(i, j));
            }
            g.und_adj[i].insert(j);
            g.und_adj[j].insert(i);
        }
        Ok(g)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for node in [i, j] {
            if node >= self.p {
                return Err(Error::NodeOutOfRange { node, p: self.p });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edge_type(&self, i: usize, j: usize) -> EdgeType {
        if self.dir_parents[j].contains(i) {
            EdgeType::Forward
        } else if self.dir_parents[i].contains(j) {
            EdgeType::Backward
        } else if self.und_adj[i].contains(j) {
            EdgeType::Undirected
        } else {
            EdgeType::None
        }
    }

    pub fn directed_parents_of(&self, j: usize) -> NodeSet {
        self.dir_parents[j]
    }

    pub fn undirected_neighbors_of(&self, i: usize) -> NodeSet {
        self.und_adj[i]
    }

    /// Directed edges sorted by (tail, head).
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = (0..self.p)
            .flat_map(|j| self.dir_parents[j].iter().map(move |i| (i, j)))
            .collect();
        e.sort_unstable();
        e
    }

    /// Undirected edges as (i, j) with i < j.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = (0..self.p)
            .flat_map(|i| self.und_adj[i].iter().filter(move |&j| i < j).map(move |j| (i, j)))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.directed_edges().len() + self.undirected_edges().len()
    }

    pub(crate) fn orient(&mut self, i: usize, j: usize) {
        debug_assert!(self.und_adj[i].contains(j));
        self.und_adj[i].remove(j);
        self.und_adj[j].remove(i);
        self.dir_parents[j].insert(i);
    }

    pub(crate) fn add_undirected(&mut self, i: usize, j: usize) {
        self.und_adj[i].insert(j);
        self.und_adj[j].insert(i);
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.edge_type(i, j) != EdgeType::None
    }
}

impl From<&Dag> for Pdag {
    /// Fully directed view of a DAG (not its CPDAG).
    fn from(g: &Dag) -> Pdag {
        let mut pdag = Pdag::new(g.p()).expect("valid Dag node count");
        for j in 0..g.p() {
            pdag.dir_parents[j] = g.parents_of(j);
        }
        pdag
    }
}

impl std::fmt::Debug for Pdag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Pdag(p={}, directed {:?}, undirected {:?})",
            self.p,
            self.directed_edges(),
            self.undirected_edges()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_types_cover_all_cases() {
        let g = Pdag::from_parts(3, &[(0, 1)], &[(1, 2)]).unwrap();
        assert_eq!(g.edge_type(0, 1), EdgeType::Forward);
        assert_eq!(g.edge_type(1, 0), EdgeType::Backward);
        assert_eq!(g.edge_type(1, 2), EdgeType::Undirected);
        assert_eq!(g.edge_type(2, 1), EdgeType::Undirected);
        assert_eq!(g.edge_type(0, 2), EdgeType::None);
    }

    #[test]
    fn skeletons_must_be_disjoint() {
        assert!(matches!(
            Pdag::from_parts(2, &[(0, 1)], &[(0, 1)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Pdag::from_parts(2, &[(0, 1), (1, 0)], &[]),
            Err(Error::DuplicateEdge(1, 0))
        ));
    }

    #[test]
    fn dag_view_is_fully_directed() {
        let d = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = Pdag::from(&d);
        assert_eq!(p.directed_edges(), vec![(0, 1), (1, 2)]);
        assert!(p.undirected_edges().is_empty());
    }
}
