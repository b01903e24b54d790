/// Set of node indices backed by a 64-bit mask.
///
/// Graph code stores parent sets as `NodeSet`s; the 64-node ceiling is far
/// above the enumeration and search scales this crate targets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);
    pub const MAX_NODES: usize = 64;

    pub fn singleton(i: usize) -> NodeSet {
        debug_assert!(i < Self::MAX_NODES);
        NodeSet(1 << i)
    }

    /// All nodes 0..p.
    pub fn full(p: usize) -> NodeSet {
        debug_assert!(p <= Self::MAX_NODES);
        if p == 64 { NodeSet(!0) } else { NodeSet((1u64 << p) - 1) }
    }

    pub fn contains(self, i: usize) -> bool {
        i < Self::MAX_NODES && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < Self::MAX_NODES);
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    pub fn with(self, i: usize) -> NodeSet {
        let mut s = self;
        s.insert(i);
        s
    }

    pub fn without(self, i: usize) -> NodeSet {
        let mut s = self;
        s.remove(i);
        s
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersect(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn minus(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn intersects(self, other: NodeSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Ascending iterator over member indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Raw mask, stable across runs; used for seed derivation and caching.
    pub fn bits(self) -> u64 {
        self.0
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> NodeSet {
        let mut s = NodeSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl std::fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
