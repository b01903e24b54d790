use crate::bits::NodeSet;
use crate::error::{Error, Result};

/// Directed acyclic graph over nodes `0..p`, stored as per-node parent sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    p: usize,
    parents: Vec<NodeSet>,
}

/// Permutation of `0..p` ranking every edge's tail before its head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologicalOrder {
    pi: Vec<usize>,
}

impl TopologicalOrder {
    pub fn new(pi: Vec<usize>) -> TopologicalOrder {
        TopologicalOrder { pi }
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    /// position[v] = rank of node v in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.pi.len()];
        for (rank, &v) in self.pi.iter().enumerate() {
            pos[v] = rank;
        }
        pos
    }

    pub fn is_topological_for(&self, g: &Dag) -> bool {
        if self.pi.len() != g.p() {
            return false;
        }
        let mut seen = NodeSet::EMPTY;
        for &v in &self.pi {
            if v >= g.p() || seen.contains(v) {
                return false;
            }
            seen.insert(v);
        }
        let pos = self.positions();
        g.edges().iter().all(|&(i, j)| pos[i] < pos[j])
    }
}

fn check_node(node: usize, p: usize) -> Result<()> {
    if node >= p {
        return Err(Error::NodeOutOfRange { node, p });
    }
    Ok(())
}

/// True iff the edge list over nodes `0..p` admits a topological order.
pub fn is_acyclic(p: usize, edges: &[(usize, usize)]) -> Result<bool> {
    if p > NodeSet::MAX_NODES {
        return Err(Error::TooManyNodes { p, max: NodeSet::MAX_NODES });
    }
    let mut parents = vec![NodeSet::EMPTY; p];
    for &(i, j) in edges {
        check_node(i, p)?;
        check_node(j, p)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        parents[j].insert(i);
    }
    Ok(kahn(p, &parents).is_some())
}

/// Kahn's algorithm; smallest-index-first for a deterministic order.
fn kahn(p: usize, parents: &[NodeSet]) -> Option<Vec<usize>> {
    let mut remaining = NodeSet::full(p);
    let mut placed = NodeSet::EMPTY;
    let mut order = Vec::with_capacity(p);
    while !remaining.is_empty() {
        let next = remaining.iter().find(|&v| parents[v].minus(placed).is_empty())?;
        remaining.remove(next);
        placed.insert(next);
        order.push(next);
    }
    Some(order)
}

impl Dag {
    /// Empty graph on p nodes.
    pub fn new(p: usize) -> Result<Dag> {
        if p == 0 {
            return Err(Error::InvalidParam("node count must be >= 1".into()));
        }
        if p > NodeSet::MAX_NODES {
            return Err(Error::TooManyNodes { p, max: NodeSet::MAX_NODES });
        }
        Ok(Dag { p, parents: vec![NodeSet::EMPTY; p] })
    }

    pub fn from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Dag> {
        let mut g = Dag::new(p)?;
        for &(i, j) in edges {
            check_node(i, p)?;
            check_node(j, p)?;
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if g.parents[j].contains(i) {
                return Err(Error::DuplicateEdge(i, j));
            }
            g.parents[j].insert(i);
        }
        if kahn(p, &g.parents).is_none() {
            return Err(Error::Cyclic);
        }
        Ok(g)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn parents_of(&self, j: usize) -> NodeSet {
        self.parents[j]
    }

    pub fn children_of(&self, i: usize) -> NodeSet {
        (0..self.p).filter(|&j| self.parents[j].contains(i)).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        j < self.p && self.parents[j].contains(i)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|s| s.len()).sum()
    }

    /// Edges sorted lexicographically by (tail, head).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = (0..self.p)
            .flat_map(|j| self.parents[j].iter().map(move |i| (i, j)))
            .collect();
        e.sort_unstable();
        e
    }

    /// Copy with edge i->j added; errors if it already exists or creates a cycle.
    pub fn with_edge(&self, i: usize, j: usize) -> Result<Dag> {
        check_node(i, self.p)?;
        check_node(j, self.p)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if self.has_edge(i, j) {
            return Err(Error::DuplicateEdge(i, j));
        }
        // i->j is safe iff i is not a descendant of j.
        if self.descendants(j).contains(i) {
            return Err(Error::Cyclic);
        }
        let mut g = self.clone();
        g.parents[j].insert(i);
        Ok(g)
    }

    pub fn without_edge(&self, i: usize, j: usize) -> Result<Dag> {
        if !self.has_edge(i, j) {
            return Err(Error::InvalidParam(format!("edge {i} -> {j} not present")));
        }
        let mut g = self.clone();
        g.parents[j].remove(i);
        Ok(g)
    }

    pub fn with_reversed(&self, i: usize, j: usize) -> Result<Dag> {
        self.without_edge(i, j)?.with_edge(j, i)
    }

    pub fn topological_order(&self) -> TopologicalOrder {
        // Constructors guarantee acyclicity.
        TopologicalOrder::new(kahn(self.p, &self.parents).expect("constructed Dag is acyclic"))
    }

    /// Strict descendants of i (excluding i).
    pub fn descendants(&self, i: usize) -> NodeSet {
        let mut seen = NodeSet::singleton(i);
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for c in self.children_of(v).iter() {
                if !seen.contains(c) {
                    seen.insert(c);
                    stack.push(c);
                }
            }
        }
        seen.without(i)
    }

    /// Strict ancestors of i (excluding i).
    pub fn ancestors(&self, i: usize) -> NodeSet {
        let mut seen = NodeSet::singleton(i);
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for a in self.parents[v].iter() {
                if !seen.contains(a) {
                    seen.insert(a);
                    stack.push(a);
                }
            }
        }
        seen.without(i)
    }

    /// Ancestors of every node in `s`, including `s` itself.
    pub fn ancestral_closure(&self, s: NodeSet) -> NodeSet {
        let mut seen = s;
        let mut stack: Vec<usize> = s.iter().collect();
        while let Some(v) = stack.pop() {
            for a in self.parents[v].iter() {
                if !seen.contains(a) {
                    seen.insert(a);
                    stack.push(a);
                }
            }
        }
        seen
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_edge(i, j) || self.has_edge(j, i)
    }

    /// Unordered skeleton pairs (i, j) with i < j.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .map(|(i, j)| if i < j { (i, j) } else { (j, i) })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Immoralities as (a, b, c) with a < c, a->b<-c, a and c non-adjacent.
    pub fn immoralities(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.p {
            let pa: Vec<usize> = self.parents[b].iter().collect();
            for (x, &a) in pa.iter().enumerate() {
                for &c in &pa[x + 1..] {
                    if !self.adjacent(a, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

impl std::fmt::Debug for Dag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Dag(p={}, {:?})", self.p, self.edges())
    }
}

/// All acyclic graphs one edge addition, removal, or reversal away from g.
/// g itself is excluded; the three edit kinds change the edge count by
/// +1/-1/0, so results are distinct without deduplication.
pub fn neighbors(g: &Dag) -> Vec<Dag> {
    let mut out = Vec::new();
    for j in 0..g.p() {
        for i in 0..g.p() {
            if i == j {
                continue;
            }
            if g.has_edge(i, j) {
                out.push(g.without_edge(i, j).expect("edge present"));
                if let Ok(h) = g.with_reversed(i, j) {
                    out.push(h);
                }
            } else if !g.has_edge(j, i) {
                if let Ok(h) = g.with_edge(i, j) {
                    out.push(h);
                }
            }
        }
    }
    out
}
