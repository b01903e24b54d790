use crate::error::{Error, Result};
use crate::graph::Dag;

/// Largest p for which exhaustive DAG enumeration is allowed (29,281 graphs).
pub const ENUM_MAX_P: usize = 5;

/// Number of labeled DAGs on p nodes, by the inclusion-exclusion recurrence
/// a(n) = sum_{k=1..n} (-1)^(k+1) C(n,k) 2^(k(n-k)) a(n-k), a(0) = 1.
///
/// Independent of [`enumerate_dags`]; each checks the other in tests.
pub fn count_dags(p: usize) -> Result<u128> {
    let mut a: Vec<u128> = vec![1];
    for n in 1..=p {
        let mut total: i128 = 0;
        for k in 1..=n {
            let term = binomial(n, k)
                .checked_mul(pow2(k * (n - k)).ok_or(Error::CountOverflow(p))?)
                .and_then(|t| t.checked_mul(a[n - k]))
                .ok_or(Error::CountOverflow(p))?;
            let term = i128::try_from(term).map_err(|_| Error::CountOverflow(p))?;
            if k % 2 == 1 {
                total = total.checked_add(term).ok_or(Error::CountOverflow(p))?;
            } else {
                total = total.checked_sub(term).ok_or(Error::CountOverflow(p))?;
            }
        }
        a.push(u128::try_from(total).map_err(|_| Error::CountOverflow(p))?);
    }
    Ok(a[p])
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn pow2(e: usize) -> Option<u128> {
    if e < 128 { Some(1u128 << e) } else { None }
}

/// Every labeled DAG on p nodes, exactly once, in a deterministic order.
/// Refuses p > [`ENUM_MAX_P`]; use [`count_dags`] beyond that.
pub fn enumerate_dags(p: usize) -> Result<Vec<Dag>> {
    enumerate_dags_capped(p, ENUM_MAX_P)
}

/// As [`enumerate_dags`] with an explicit cap; the cap itself cannot exceed
/// [`ENUM_MAX_P`] (the growth is hyper-exponential: p=7 already has
/// 1,138,779,265 graphs).
pub fn enumerate_dags_capped(p: usize, cap: usize) -> Result<Vec<Dag>> {
    let cap = cap.min(ENUM_MAX_P);
    if p == 0 {
        return Err(Error::InvalidParam("node count must be >= 1".into()));
    }
    if p > cap {
        let count = count_dags(p).unwrap_or(u128::MAX);
        return Err(Error::EnumerationCap { p, cap, count });
    }
    // All ordered pairs; subsets of them are candidate edge sets.
    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &e)| e)
            .collect();
        // Both orientations of a pair present means a 2-cycle; from_edges
        // would also catch it, this just skips the work early.
        if let Ok(g) = Dag::from_edges(p, &edges) {
            out.push(g);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_known_sequence() {
        let expect: [u128; 8] = [1, 1, 3, 25, 543, 29281, 3781503, 1138779265];
        for (p, &want) in expect.iter().enumerate() {
            assert_eq!(count_dags(p).unwrap(), want, "p={p}");
        }
    }

    #[test]
    fn enumeration_agrees_with_recurrence() {
        for p in 1..=5 {
            let dags = enumerate_dags(p).unwrap();
            assert_eq!(dags.len() as u128, count_dags(p).unwrap(), "p={p}");
        }
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let dags = enumerate_dags(4).unwrap();
        let set: HashSet<Vec<(usize, usize)>> = dags.iter().map(|g| g.edges()).collect();
        assert_eq!(set.len(), dags.len());
    }

    #[test]
    fn cap_refusal_names_count() {
        match enumerate_dags(6) {
            Err(Error::EnumerationCap { p: 6, cap: 5, count }) => {
                assert_eq!(count, 3781503);
            }
            other => panic!("expected cap refusal, got {other:?}"),
        }
    }

    #[test]
    fn count_overflow_is_reported() {
        assert!(count_dags(10).is_ok());
        assert!(matches!(count_dags(40), Err(Error::CountOverflow(40))));
    }
}
