//! Graphical SID: adjustment-validity check per ordered pair.

use crate::bits::NodeSet;
use crate::error::{Error, Result};
use crate::graph::{d_separated, dag_extensions, Dag, Pdag};

use super::{count_bad, SidResult};

/// Structural intervention distance between the true DAG and an estimated
/// DAG: ordered pair (i, j) is good iff adjusting for Z = PA_h(i) recovers
/// p(x_j | do(x_i)) for every distribution Markov w.r.t. `g_true`.
///
/// Validity of Z is decided by the complete adjustment criterion. With
/// cpn = nodes other than i on directed paths from i to j:
/// - j in Z: the adjusted estimate collapses to the marginal p(x_j), which
///   is correct iff j is not a descendant of i;
/// - Z must avoid cpn and its descendants (the forbidden set);
/// - Z must d-separate i from j in the proper back-door graph, obtained by
///   deleting the first edge of every directed path from i to j.
pub fn sid(g_true: &Dag, h: &Dag) -> Result<SidResult> {
    if g_true.p() != h.p() {
        return Err(Error::NodeCountMismatch(g_true.p(), h.p()));
    }
    let p = g_true.p();
    let mut good = vec![vec![true; p]; p];
    for i in 0..p {
        let z = h.parents_of(i);
        for j in 0..p {
            if j != i {
                good[i][j] = pair_good(g_true, i, j, z)?;
            }
        }
    }
    Ok(SidResult::from_matrix(good))
}

fn pair_good(g: &Dag, i: usize, j: usize, z: NodeSet) -> Result<bool> {
    let de_i = g.descendants(i);
    if z.contains(j) {
        return Ok(!de_i.contains(j));
    }
    // Nodes other than i on directed i -> ... -> j paths.
    let cpn: NodeSet =
        de_i.iter().filter(|&w| w == j || g.descendants(w).contains(j)).collect();
    let mut forbidden = cpn;
    for w in cpn.iter() {
        forbidden = forbidden.union(g.descendants(w));
    }
    if z.intersects(forbidden) {
        return Ok(false);
    }
    let removed: Vec<(usize, usize)> = g
        .children_of(i)
        .iter()
        .filter(|&c| cpn.contains(c))
        .map(|c| (i, c))
        .collect();
    let pbd = if removed.is_empty() {
        g.clone()
    } else {
        let edges: Vec<(usize, usize)> =
            g.edges().into_iter().filter(|e| !removed.contains(e)).collect();
        Dag::from_edges(g.p(), &edges)?
    };
    d_separated(&pbd, NodeSet::singleton(i), NodeSet::singleton(j), z)
}

/// SID range over the Markov equivalence class represented by a CPDAG:
/// min/max of sid(g_true, d) over all consistent DAG extensions d. The
/// good matrix keeps pairs good under every extension.
pub fn sid_bounds(g_true: &Dag, c: &Pdag) -> Result<SidResult> {
    if g_true.p() != c.p() {
        return Err(Error::NodeCountMismatch(g_true.p(), c.p()));
    }
    let p = g_true.p();
    let mut lower = usize::MAX;
    let mut upper = 0;
    let mut good = vec![vec![true; p]; p];
    for d in dag_extensions(c)? {
        let r = sid(g_true, &d)?;
        lower = lower.min(r.bad_pairs);
        upper = upper.max(r.bad_pairs);
        for i in 0..p {
            for j in 0..p {
                good[i][j] &= r.good_matrix[i][j];
            }
        }
    }
    let bad_pairs = count_bad(&good);
    Ok(SidResult { bad_pairs, good_matrix: good, lower, upper })
}
