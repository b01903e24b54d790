use crate::bits::NodeSet;
use crate::error::{Error, Result};
use crate::graph::Dag;

/// True iff every path between A and B is blocked by S: non-colliders block
/// when in S, colliders block unless they or a descendant are in S.
///
/// Reachability ("Bayes-ball") formulation: walk (node, entry direction)
/// states from A and test whether any B node is reached by an active trail.
pub fn d_separated(g: &Dag, a: NodeSet, b: NodeSet, s: NodeSet) -> Result<bool> {
    let p = g.p();
    let all = NodeSet::full(p);
    for set in [a, b, s] {
        if !set.minus(all).is_empty() {
            let node = set.minus(all).iter().next().unwrap();
            return Err(Error::NodeOutOfRange { node, p });
        }
    }
    if a.intersects(b) || a.intersects(s) || b.intersects(s) {
        return Err(Error::OverlappingSets);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }

    // Colliders are opened by S or any descendant in S, i.e. by membership
    // in the ancestral closure of S.
    let s_closure = g.ancestral_closure(s);

    // Entry direction: Down = entered along an edge from a parent,
    // Up = entered from a child (or a walk origin).
    let mut visited_up = NodeSet::EMPTY;
    let mut visited_down = NodeSet::EMPTY;
    let mut stack: Vec<(usize, bool)> = a.iter().map(|v| (v, true)).collect();

    while let Some((v, up)) = stack.pop() {
        let seen = if up { &mut visited_up } else { &mut visited_down };
        if seen.contains(v) {
            continue;
        }
        seen.insert(v);
        if b.contains(v) {
            return Ok(false);
        }
        if up {
            if !s.contains(v) {
                for parent in g.parents_of(v).iter() {
                    stack.push((parent, true));
                }
                for child in g.children_of(v).iter() {
                    stack.push((child, false));
                }
            }
        } else {
            if !s.contains(v) {
                for child in g.children_of(v).iter() {
                    stack.push((child, false));
                }
            }
            if s_closure.contains(v) {
                for parent in g.parents_of(v).iter() {
                    stack.push((parent, true));
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    #[test]
    fn collider_blocks_marginally_opens_conditionally() {
        let g = Dag::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        assert!(d_separated(&g, set(&[0]), set(&[1]), set(&[])).unwrap());
        assert!(!d_separated(&g, set(&[0]), set(&[1]), set(&[2])).unwrap());
    }

    #[test]
    fn chain_blocked_by_middle() {
        let g = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(!d_separated(&g, set(&[0]), set(&[2]), set(&[])).unwrap());
        assert!(d_separated(&g, set(&[0]), set(&[2]), set(&[1])).unwrap());
    }

    #[test]
    fn collider_opened_by_descendant() {
        // 0 -> 2 <- 1, 2 -> 3; conditioning on 3 opens the collider at 2.
        let g = Dag::from_edges(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(d_separated(&g, set(&[0]), set(&[1]), set(&[])).unwrap());
        assert!(!d_separated(&g, set(&[0]), set(&[1]), set(&[3])).unwrap());
    }

    #[test]
    fn fork_blocked_by_root() {
        let g = Dag::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(!d_separated(&g, set(&[1]), set(&[2]), set(&[])).unwrap());
        assert!(d_separated(&g, set(&[1]), set(&[2]), set(&[0])).unwrap());
    }

    #[test]
    fn overlap_rejected() {
        let g = Dag::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            d_separated(&g, set(&[0]), set(&[0]), set(&[])),
            Err(Error::OverlappingSets)
        ));
        assert!(matches!(
            d_separated(&g, set(&[0]), set(&[1]), set(&[1])),
            Err(Error::OverlappingSets)
        ));
    }

    #[test]
    fn out_of_range_rejected() {
        let g = Dag::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            d_separated(&g, set(&[0]), set(&[5]), set(&[])),
            Err(Error::NodeOutOfRange { node: 5, p: 2 })
        ));
    }
}
