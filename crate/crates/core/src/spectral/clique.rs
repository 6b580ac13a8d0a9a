use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Exact clique number of a graph (`r = 2`) on at most 64 vertices.
///
/// Branch and bound over bitmask candidate sets, pruning when the current
/// clique plus every remaining candidate cannot beat the incumbent.
/// An edgeless graph on `n >= 1` vertices has clique number 1.
pub fn clique_number(h: &Hypergraph) -> Result<usize> {
    if h.r() != 2 {
        return Err(Error::InvalidArgument(format!(
            "clique number needs a graph (r = 2), got r = {}",
            h.r()
        )));
    }
    let n = h.n();
    if n > 64 {
        return Err(Error::TooManyVertices { n, max: 64 });
    }
    if n == 0 {
        return Ok(0);
    }
    let mut adj = vec![0u64; n];
    for e in h.edges() {
        let (a, b) = (e.vertices()[0] as usize - 1, e.vertices()[1] as usize - 1);
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 1;
    expand(&adj, 0, all, &mut best);
    Ok(best)
}

fn expand(adj: &[u64], size: usize, mut cand: u64, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    while cand != 0 {
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= !(1u64 << v);
        expand(adj, size + 1, cand & adj[v], best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(clique_number(&Hypergraph::complete(4, 2).unwrap()).unwrap(), 4);
        let c5 = Hypergraph::new(5, 2, (0..5u32).map(|i| vec![i + 1, (i + 1) % 5 + 1])).unwrap();
        assert_eq!(clique_number(&c5).unwrap(), 2);
        let mut edges = Vec::new();
        for i in 0..5u32 {
            edges.push(vec![i + 1, (i + 1) % 5 + 1]);
            edges.push(vec![i + 1, i + 6]);
            edges.push(vec![i + 6, (i + 2) % 5 + 6]);
        }
        let petersen = Hypergraph::new(10, 2, edges).unwrap();
        assert_eq!(clique_number(&petersen).unwrap(), 2);
        assert_eq!(clique_number(&Hypergraph::empty(3, 2).unwrap()).unwrap(), 1);
        assert_eq!(clique_number(&Hypergraph::empty(0, 2).unwrap()).unwrap(), 0);
        assert!(clique_number(&Hypergraph::complete(4, 3).unwrap()).is_err());
    }

    #[test]
    fn k7_minus_matching() {
        let mut edges = Vec::new();
        for a in 1..=7u32 {
            for b in a + 1..=7 {
                if !matches!((a, b), (1, 2) | (3, 4) | (5, 6)) {
                    edges.push(vec![a, b]);
                }
            }
        }
        let h = Hypergraph::new(7, 2, edges).unwrap();
        assert_eq!(clique_number(&h).unwrap(), 4);
    }
}
