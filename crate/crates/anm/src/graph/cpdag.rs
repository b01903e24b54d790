use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeType, Pdag};

/// Completed PDAG of g's Markov equivalence class: two DAGs are equivalent
/// iff they share skeleton and immoralities, so the class representative
/// keeps exactly the orientations all members agree on.
///
/// Construction: copy the skeleton, orient immoralities from g, then close
/// under the Meek orientation rules until fixpoint.
pub fn cpdag(g: &Dag) -> Pdag {
    let p = g.p();
    let mut c = Pdag::new(p).expect("valid Dag node count");
    for (i, j) in g.skeleton() {
        c.add_undirected(i, j);
    }
    for (a, b, cc) in g.immoralities() {
        if c.edge_type(a, b) == EdgeType::Undirected {
            c.orient(a, b);
        }
        if c.edge_type(cc, b) == EdgeType::Undirected {
            c.orient(cc, b);
        }
    }
    meek_closure(&mut c);
    c
}

fn orient_checked(c: &mut Pdag, i: usize, j: usize, changed: &mut bool) {
    if c.edge_type(i, j) == EdgeType::Undirected {
        c.orient(i, j);
        *changed = true;
    }
}

fn has_directed_path(c: &Pdag, from: usize, to: usize) -> bool {
    let mut seen = crate::NodeSet::singleton(from);
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for w in 0..c.p() {
            if c.edge_type(v, w) == EdgeType::Forward && !seen.contains(w) {
                if w == to {
                    return true;
                }
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    false
}

fn meek_closure(c: &mut Pdag) {
    let p = c.p();
    loop {
        let mut changed = false;

        // R1: a->b, b--c, a not adjacent to c  =>  b->c.
        for b in 0..p {
            for a in c.directed_parents_of(b).iter() {
                for cc in c.undirected_neighbors_of(b).to_vec() {
                    if !c.adjacent(a, cc) {
                        orient_checked(c, b, cc, &mut changed);
                    }
                }
            }
        }

        // R2: a--b with a->w->b  =>  a->b.
        for a in 0..p {
            for b in c.undirected_neighbors_of(a).to_vec() {
                let has_two_step =
                    c.directed_parents_of(b).iter().any(|w| c.directed_parents_of(w).contains(a));
                if has_two_step {
                    orient_checked(c, a, b, &mut changed);
                }
            }
        }

        // R3: a--b, a--c, a--d, c->b, d->b, c not adjacent to d  =>  a->b.
        for a in 0..p {
            for b in c.undirected_neighbors_of(a).to_vec() {
                let candidates: Vec<usize> = c
                    .directed_parents_of(b)
                    .intersect(c.undirected_neighbors_of(a))
                    .to_vec();
                let found = candidates.iter().enumerate().any(|(x, &cc)| {
                    candidates[x + 1..].iter().any(|&d| !c.adjacent(cc, d))
                });
                if found {
                    orient_checked(c, a, b, &mut changed);
                }
            }
        }

        // Path rule: a--b with a directed path a => b must orient a->b,
        // otherwise every extension orienting b->a is cyclic.
        for a in 0..p {
            for b in c.undirected_neighbors_of(a).to_vec() {
                if has_directed_path(c, a, b) {
                    orient_checked(c, a, b, &mut changed);
                } else if has_directed_path(c, b, a) {
                    orient_checked(c, b, a, &mut changed);
                }
            }
        }

        if !changed {
            return;
        }
    }
}

/// All DAGs in the class represented by the CPDAG `c`, i.e. every acyclic
/// orientation of its undirected edges whose CPDAG is `c` again.
pub fn dag_extensions(c: &Pdag) -> Result<Vec<Dag>> {
    if c.p() > 5 {
        return Err(Error::ScaleCap { what: "dag_extensions", max: 5, got: c.p() });
    }
    let directed = c.directed_edges();
    let undirected = c.undirected_edges();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << undirected.len()) {
        let mut edges = directed.clone();
        for (bit, &(i, j)) in undirected.iter().enumerate() {
            edges.push(if mask & (1 << bit) == 0 { (i, j) } else { (j, i) });
        }
        if let Ok(d) = Dag::from_edges(c.p(), &edges) {
            if cpdag(&d) == *c {
                out.push(d);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NotExtendable);
    }
    Ok(out)
}
