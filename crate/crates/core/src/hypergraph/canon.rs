//! Canonical labeling of small hypergraphs given as vertex bitmasks.
//!
//! Individualization-refinement: vertices are coloured by degree and the
//! colouring is refined until stable (each vertex's signature is its colour
//! plus the multiset, over incident edges, of the other endpoints' colours).
//! While a colour class of non-isolated vertices has several members, each
//! member in turn is given its own colour and the refinement is repeated.
//! Every discrete colouring reached is a labeling; the canonical form is the
//! least sorted edge-mask list among them. All choices depend only on the
//! colouring, so isomorphic inputs reach the same set of leaves.

use std::collections::BTreeMap;

/// Largest vertex count representable with `u64` masks.
pub const MAX_CANON_VERTICES: usize = 64;

struct Canon {
    n: usize,
    edge_vertices: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    scratch: Vec<u64>,
    best: Option<Vec<u64>>,
}

impl Canon {
    /// Ranks vertices by `key`, preserving the order of the keys.
    fn rank<K: Ord + Clone>(keys: &[K]) -> (Vec<u32>, usize) {
        let mut ranks: BTreeMap<K, u32> = keys.iter().cloned().map(|k| (k, 0)).collect();
        for (i, slot) in ranks.values_mut().enumerate() {
            *slot = i as u32;
        }
        (keys.iter().map(|k| ranks[k]).collect(), ranks.len())
    }

    fn refine(&self, mut color: Vec<u32>) -> Vec<u32> {
        let mut classes = {
            let mut c = color.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let sigs: Vec<(u32, Vec<Vec<u32>>)> = (0..self.n)
                .map(|v| {
                    let mut per_edge: Vec<Vec<u32>> = self.incident[v]
                        .iter()
                        .map(|&e| {
                            let mut cs: Vec<u32> = self.edge_vertices[e]
                                .iter()
                                .filter(|&&w| w != v)
                                .map(|&w| color[w])
                                .collect();
                            cs.sort_unstable();
                            cs
                        })
                        .collect();
                    per_edge.sort_unstable();
                    (color[v], per_edge)
                })
                .collect();
            let (next, count) = Self::rank(&sigs);
            color = next;
            if count == classes {
                return color;
            }
            classes = count;
        }
    }

    fn search(&mut self, color: Vec<u32>) {
        // first colour class with two or more non-isolated members
        let mut members: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, edges) in self.incident.iter().enumerate() {
            if !edges.is_empty() {
                members.entry(color[v]).or_default().push(v);
            }
        }
        let Some(cell) = members.into_values().find(|vs| vs.len() > 1) else {
            self.evaluate(&color);
            return;
        };
        for &v in &cell {
            let keys: Vec<(u32, bool)> = (0..self.n).map(|w| (color[w], w != v)).collect();
            let (individualized, _) = Self::rank(&keys);
            let refined = self.refine(individualized);
            self.search(refined);
        }
    }

    fn evaluate(&mut self, color: &[u32]) {
        for (slot, vs) in self.scratch.iter_mut().zip(&self.edge_vertices) {
            *slot = vs.iter().fold(0u64, |acc, &v| acc | 1u64 << color[v]);
        }
        self.scratch.sort_unstable();
        match &mut self.best {
            Some(b) if *b <= self.scratch => {}
            Some(b) => b.copy_from_slice(&self.scratch),
            None => self.best = Some(self.scratch.clone()),
        }
    }
}

/// Canonical sorted edge masks. Isolated vertices end up above every
/// non-isolated label, so the result uses labels `0..k` for the `k`
/// non-isolated vertices.
pub(crate) fn canonical_masks(n: usize, edges: &[u64]) -> Vec<u64> {
    assert!(n <= MAX_CANON_VERTICES);
    if edges.is_empty() {
        return Vec::new();
    }
    let edge_vertices: Vec<Vec<usize>> = edges
        .iter()
        .map(|&e| (0..n).filter(|&v| e >> v & 1 == 1).collect())
        .collect();
    let mut incident = vec![Vec::new(); n];
    for (i, vs) in edge_vertices.iter().enumerate() {
        for &v in vs {
            incident[v].push(i);
        }
    }
    // colour 0 is the highest degree; isolated vertices sort last
    let keys: Vec<std::cmp::Reverse<usize>> = incident.iter().map(|e| std::cmp::Reverse(e.len())).collect();
    let (initial, _) = Canon::rank(&keys);
    let mut canon = Canon {
        n,
        edge_vertices,
        incident,
        scratch: vec![0; edges.len()],
        best: None,
    };
    let color = canon.refine(initial);
    canon.search(color);
    canon.best.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn masks(edges: &[&[u32]]) -> Vec<u64> {
        edges
            .iter()
            .map(|e| e.iter().fold(0u64, |a, &v| a | 1 << v))
            .collect()
    }

    #[test]
    fn triangle_relabelings_agree() {
        let a = canonical_masks(5, &masks(&[&[0, 1], &[1, 2], &[0, 2]]));
        let b = canonical_masks(5, &masks(&[&[4, 3], &[3, 1], &[1, 4]]));
        assert_eq!(a, b);
        assert_eq!(a, masks(&[&[0, 1], &[0, 2], &[1, 2]]));
    }

    #[test]
    fn path_and_star_differ() {
        let path = canonical_masks(4, &masks(&[&[0, 1], &[1, 2], &[2, 3]]));
        let star = canonical_masks(4, &masks(&[&[0, 1], &[0, 2], &[0, 3]]));
        assert_ne!(path, star);
    }

    #[test]
    fn regular_structures_are_fast_and_consistent() {
        // a perfect matching on 12 vertices defeats plain refinement
        let a = canonical_masks(12, &masks(&[&[0, 1], &[2, 3], &[4, 5], &[6, 7], &[8, 9], &[10, 11]]));
        let b = canonical_masks(12, &masks(&[&[0, 11], &[1, 10], &[2, 9], &[3, 8], &[4, 7], &[5, 6]]));
        assert_eq!(a, b);
        let c6 = canonical_masks(6, &masks(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[0, 5]]));
        let two_triangles = canonical_masks(6, &masks(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4], &[4, 5], &[3, 5]]));
        assert_ne!(c6, two_triangles);
    }

    #[test]
    fn isolated_vertices_sorted_last() {
        let c = canonical_masks(6, &masks(&[&[5, 3, 4]]));
        assert_eq!(c, masks(&[&[0, 1, 2]]));
    }
}
