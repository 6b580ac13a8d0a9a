//! Isomorphism-free enumeration of small uniform hypergraphs.
//!
//! Classes with `k` edges are grown from classes with `k - 1` edges by adding
//! one edge in every possible position and deduplicating canonical forms.
//! Every class with `k` edges arises this way (delete any edge), so nothing
//! is missed, and the canonical-form set guarantees nothing is repeated.

use std::collections::HashSet;

use super::canon::{canonical_masks, MAX_CANON_VERTICES};
use super::{binomial, Hypergraph};
use crate::error::{Error, Result};

/// Default ceiling on labeled candidates examined by one enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Upper bound on the number of labeled candidates a naive generator would
/// visit: `C(C(N, r), m)` with `N = min(n_max, r * m)`. Saturates at `f64`
/// range instead of overflowing.
pub fn estimate_candidates(r: usize, m: usize, n_max: usize) -> f64 {
    let big_n = n_max.min(r * m) as f64;
    let slots = ln_binomial(big_n, r as f64).exp().round();
    ln_binomial(slots, m as f64).exp()
}

fn ln_binomial(n: f64, k: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    (1..=k as u64)
        .map(|i| ((n - k + i as f64) / i as f64).ln())
        .sum()
}

/// The classes produced by [`enumerate`], in deterministic canonical order.
#[derive(Debug, Clone)]
pub struct Enumeration {
    items: std::vec::IntoIter<Hypergraph>,
    /// Labeled candidates examined while building the classes.
    pub examined: u64,
}

impl Iterator for Enumeration {
    type Item = Hypergraph;

    fn next(&mut self) -> Option<Hypergraph> {
        self.items.next()
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.items.size_hint()
    }
}

impl ExactSizeIterator for Enumeration {}

/// All r-uniform hypergraphs with exactly `m` edges and at most `n_max`
/// non-isolated vertices, one canonical representative per isomorphism
/// class (isolated vertices stripped).
pub fn enumerate(r: usize, m: usize, n_max: usize) -> Result<Enumeration> {
    enumerate_with_budget(r, m, n_max, DEFAULT_BUDGET)
}

pub fn enumerate_with_budget(r: usize, m: usize, n_max: usize, budget: u64) -> Result<Enumeration> {
    let (levels, examined) = grow(r, m, n_max, budget)?;
    let last = levels.into_iter().last().unwrap();
    Ok(Enumeration {
        items: to_hypergraphs(r, last).into_iter(),
        examined,
    })
}

/// Every class with `1..=m_max` edges, ordered by edge count then canonical form.
pub fn enumerate_up_to(r: usize, m_max: usize, n_max: usize, budget: u64) -> Result<Vec<Hypergraph>> {
    let (levels, _) = grow(r, m_max, n_max, budget)?;
    Ok(levels
        .into_iter()
        .skip(1)
        .flat_map(|level| to_hypergraphs(r, level))
        .collect())
}

fn to_hypergraphs(r: usize, mut level: Vec<Vec<u64>>) -> Vec<Hypergraph> {
    level.sort_unstable();
    level.iter().map(|masks| Hypergraph::from_masks(r, masks)).collect()
}

fn grow(r: usize, m: usize, n_max: usize, budget: u64) -> Result<(Vec<Vec<Vec<u64>>>, u64)> {
    if r == 0 {
        return Err(Error::InvalidArgument("edge arity r must be >= 1".into()));
    }
    if n_max < r {
        return Err(Error::InvalidArgument(format!("n_max ({n_max}) must be >= r ({r})")));
    }
    let big_n = n_max.min(r * m.max(1));
    if big_n > MAX_CANON_VERTICES {
        return Err(Error::TooManyVertices {
            n: big_n,
            max: MAX_CANON_VERTICES,
        });
    }
    // no class can have more edges than C(n_max, r)
    let max_edges = binomial(n_max as u64, r as u64).unwrap_or(u64::MAX);

    let mut levels: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new()]];
    let mut examined = 0u64;
    for _ in 0..m {
        let prev = levels.last().unwrap();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        if (prev.first().map_or(0, Vec::len) as u64) < max_edges {
            for class in prev {
                let used = class.iter().fold(0u64, |a, &b| a | b);
                let k = used.count_ones() as usize;
                // isolated vertices are interchangeable: only the lowest ones
                // are offered to the new edge
                let span = big_n.min(k + r);
                for cand in r_subsets(span, r) {
                    if class.binary_search(&cand).is_ok() {
                        continue;
                    }
                    examined += 1;
                    if examined > budget {
                        return Err(Error::BudgetExceeded { examined, budget });
                    }
                    let mut next = class.clone();
                    next.push(cand);
                    seen.insert(canonical_masks(big_n, &next));
                }
            }
        }
        let mut level: Vec<Vec<u64>> = seen.into_iter().collect();
        level.sort_unstable();
        levels.push(level);
    }
    Ok((levels, examined))
}

fn r_subsets(n: usize, r: usize) -> impl Iterator<Item = u64> {
    let mut current: Option<u64> = if r <= n { Some((1u64 << r) - 1) } else { None };
    let limit: u128 = 1u128 << n;
    std::iter::from_fn(move || {
        let c = current?;
        // Gosper's hack: next mask with the same popcount, in colex order
        let lowest = c & c.wrapping_neg();
        let ripple = c as u128 + lowest as u128;
        let next = (((ripple ^ c as u128) >> 2) / lowest as u128) | ripple;
        current = if next < limit { Some(next as u64) } else { None };
        Some(c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_colex_order() {
        let v: Vec<u64> = r_subsets(4, 2).collect();
        assert_eq!(v, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(r_subsets(7, 3).count(), 35);
        assert_eq!(r_subsets(2, 3).count(), 0);
    }

    #[test]
    fn small_class_counts() {
        assert_eq!(enumerate(2, 1, 4).unwrap().count(), 1);
        assert_eq!(enumerate(2, 3, 6).unwrap().count(), 5);
        assert_eq!(enumerate(3, 2, 6).unwrap().count(), 3);
        // two shared-vertex triples need 5 vertices, disjoint ones need 6
        assert_eq!(enumerate(3, 2, 5).unwrap().count(), 2);
        assert_eq!(enumerate(2, 0, 3).unwrap().count(), 1);
    }

    #[test]
    fn budget_guard_trips() {
        assert!(matches!(
            enumerate_with_budget(2, 4, 8, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn estimate_is_naive_count() {
        // C(C(7,3), 6) = C(35, 6)
        let e = estimate_candidates(3, 6, 7);
        assert!((e - 1_623_160.0).abs() < 1.0, "{e}");
    }
}
