//! Uniform hypergraphs and set families.
//!
//! Vertices are 1-based `u32` labels. Edges are kept sorted ascending
//! internally and ordered colexicographically (`A < B` iff the largest
//! element of the symmetric difference lies in `B`), so two hypergraphs
//! with the same vertex count and edge set compare equal structurally.

mod canon;
mod enumerate;
mod io;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canon::MAX_CANON_VERTICES;
pub use enumerate::{
    enumerate, enumerate_up_to, enumerate_with_budget, estimate_candidates, Enumeration,
    DEFAULT_BUDGET,
};
pub use io::{parse_hypergraph, parse_json, parse_text};

/// A finite set of vertices, stored sorted ascending.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Edge(Vec<u32>);

impl Edge {
    /// Builds an edge from arbitrary-order vertices. Duplicates are rejected.
    pub fn new(vertices: impl Into<Vec<u32>>) -> Result<Self> {
        let mut v = vertices.into();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidEdge {
                edge: v,
                reason: "repeated vertex".into(),
            });
        }
        Ok(Edge(v))
    }

    fn from_sorted(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Edge(v)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    fn without(&self, v: u32) -> Edge {
        Edge(self.0.iter().copied().filter(|&w| w != v).collect())
    }

    fn with(&self, v: u32) -> Edge {
        let mut out = self.0.clone();
        let pos = out.binary_search(&v).unwrap_or_else(|p| p);
        out.insert(pos, v);
        Edge(out)
    }

    fn is_subset_of(&self, other: &Edge) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub(crate) fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &v| acc | 1u64 << (v - 1))
    }

    pub(crate) fn from_mask(mask: u64) -> Edge {
        let mut v = Vec::with_capacity(mask.count_ones() as usize);
        let mut bits = mask;
        while bits != 0 {
            v.push(bits.trailing_zeros() + 1);
            bits &= bits - 1;
        }
        Edge(v)
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A uniform family of sets without a vertex bound.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetFamily {
    k: usize,
    members: Vec<Edge>,
}

impl SetFamily {
    pub fn new<I, E>(k: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Vec<u32>>,
    {
        let mut set = BTreeSet::new();
        for m in members {
            let e = Edge::new(m)?;
            if e.len() != k {
                return Err(Error::InvalidEdge {
                    edge: e.0,
                    reason: format!("expected {k} elements"),
                });
            }
            if let Some(&0) = e.0.first() {
                return Err(Error::InvalidEdge {
                    edge: e.0,
                    reason: "vertices are 1-based".into(),
                });
            }
            set.insert(e);
        }
        Ok(SetFamily {
            k,
            members: set.into_iter().collect(),
        })
    }

    fn from_set(k: usize, set: BTreeSet<Edge>) -> Self {
        SetFamily {
            k,
            members: set.into_iter().collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[Edge] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.members.binary_search(e).is_ok()
    }

    pub fn is_subset_of(&self, other: &SetFamily) -> bool {
        self.members.iter().all(|e| other.contains(e))
    }

    /// The family of all sets obtained by deleting one element from a member.
    pub fn shadow(&self) -> SetFamily {
        let mut out = BTreeSet::new();
        for e in &self.members {
            for &v in &e.0 {
                out.insert(e.without(v));
            }
        }
        SetFamily::from_set(self.k.saturating_sub(1), out)
    }
}

/// See [`SetFamily::shadow`].
pub fn shadow(family: &SetFamily) -> SetFamily {
    family.shadow()
}

/// An r-uniform hypergraph on vertices `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<Edge>,
}

/// Result of an operation that removes a vertex and compacts labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeled {
    pub hypergraph: Hypergraph,
    /// `labels[i]` is the original label of new vertex `i + 1`.
    pub labels: Vec<u32>,
}

/// Outcome of a single edge shift towards a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftOutcome {
    /// `shadow(H - v)` is already contained in the link of `v`.
    Unchanged,
    Shifted {
        hypergraph: Hypergraph,
        removed: Edge,
        added: Edge,
    },
}

impl Hypergraph {
    pub fn new<I, E>(n: usize, r: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Vec<u32>>,
    {
        if r == 0 {
            return Err(Error::InvalidArgument("edge arity r must be >= 1".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidArgument("vertex count too large".into()));
        }
        let mut out = Vec::new();
        for e in edges {
            let e = Edge::new(e)?;
            if e.len() != r {
                return Err(Error::InvalidEdge {
                    edge: e.0,
                    reason: format!("expected {r} vertices"),
                });
            }
            if let Some(&bad) = e.0.iter().find(|&&v| v == 0 || v as usize > n) {
                return Err(Error::VertexOutOfRange { vertex: bad, n });
            }
            out.push(e);
        }
        out.sort_unstable();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0.clone()));
        }
        Ok(Hypergraph { n, r, edges: out })
    }

    pub fn empty(n: usize, r: usize) -> Result<Self> {
        Hypergraph::new(n, r, Vec::<Vec<u32>>::new())
    }

    fn from_sorted_edges(n: usize, r: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Hypergraph { n, r, edges }
    }

    fn from_edge_set(n: usize, r: usize, edges: BTreeSet<Edge>) -> Self {
        Hypergraph {
            n,
            r,
            edges: edges.into_iter().collect(),
        }
    }

    /// The complete r-uniform hypergraph on `s` vertices.
    pub fn complete(s: usize, r: usize) -> Result<Self> {
        if r == 0 || s < r {
            return Err(Error::InvalidArgument(format!(
                "complete hypergraph needs s >= r >= 1, got s={s}, r={r}"
            )));
        }
        let edges: Vec<Edge> = ColexSets::new(r)
            .take_while(|e| e.max().unwrap() as usize <= s)
            .collect();
        Ok(Hypergraph::from_sorted_edges(s, r, edges))
    }

    /// The first `m` r-subsets of the positive integers in colex order.
    pub fn colex_prefix(m: usize, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("edge arity r must be >= 1".into()));
        }
        let edges: Vec<Edge> = ColexSets::new(r).take(m).collect();
        let n = edges.last().map_or(0, |e| e.max().unwrap() as usize);
        Ok(Hypergraph::from_sorted_edges(n, r, edges))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if v == 0 || v as usize > self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn degree(&self, v: u32) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.edges.iter().filter(|e| e.contains(v)).count())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in &e.0 {
                d[v as usize - 1] += 1;
            }
        }
        d
    }

    pub fn edge_family(&self) -> SetFamily {
        SetFamily {
            k: self.r,
            members: self.edges.clone(),
        }
    }

    /// The link `H_v` on the original labels.
    pub fn link_family(&self, v: u32) -> Result<SetFamily> {
        self.check_vertex(v)?;
        let set = self
            .edges
            .iter()
            .filter(|e| e.contains(v))
            .map(|e| e.without(v))
            .collect();
        Ok(SetFamily::from_set(self.r - 1, set))
    }

    /// The edges of `H - v` on the original labels.
    pub fn avoiding_family(&self, v: u32) -> Result<SetFamily> {
        self.check_vertex(v)?;
        Ok(SetFamily {
            k: self.r,
            members: self.edges.iter().filter(|e| !e.contains(v)).cloned().collect(),
        })
    }

    fn relabel_without(&self, v: u32, r: usize, edges: impl Iterator<Item = Edge>) -> Relabeled {
        let down = |w: u32| if w > v { w - 1 } else { w };
        let set: BTreeSet<Edge> = edges
            .map(|e| Edge::from_sorted(e.0.iter().map(|&w| down(w)).collect()))
            .collect();
        let labels = (1..=self.n as u32).filter(|&w| w != v).collect();
        Relabeled {
            hypergraph: Hypergraph::from_edge_set(self.n - 1, r, set),
            labels,
        }
    }

    /// The (r-1)-uniform link of `v`, relabeled onto `1..=n-1`.
    pub fn link(&self, v: u32) -> Result<Relabeled> {
        self.check_vertex(v)?;
        if self.r < 2 {
            return Err(Error::InvalidArgument("link requires r >= 2".into()));
        }
        Ok(self.relabel_without(
            v,
            self.r - 1,
            self.edges.iter().filter(|e| e.contains(v)).map(|e| e.without(v)),
        ))
    }

    /// `H - v`: removes `v` and its incident edges, relabeled onto `1..=n-1`.
    pub fn delete_vertex(&self, v: u32) -> Result<Relabeled> {
        self.check_vertex(v)?;
        Ok(self.relabel_without(
            v,
            self.r,
            self.edges.iter().filter(|e| !e.contains(v)).cloned(),
        ))
    }

    /// One step of the edge-shift towards `v`.
    ///
    /// Picks the colex-least `f` in `shadow(H - v)` missing from the link of
    /// `v`, then the least `u` with `f + u` an edge of `H - v`, and replaces
    /// that edge by `f + v`.
    pub fn shift_edge(&self, v: u32) -> Result<ShiftOutcome> {
        self.check_vertex(v)?;
        let link: HashSet<Edge> = self
            .edges
            .iter()
            .filter(|e| e.contains(v))
            .map(|e| e.without(v))
            .collect();
        let rest = self.avoiding_family(v)?;
        let f = match rest
            .shadow()
            .members
            .into_iter()
            .find(|f| !link.contains(f))
        {
            Some(f) => f,
            None => return Ok(ShiftOutcome::Unchanged),
        };
        let (u, removed) = rest
            .members
            .iter()
            .filter(|e| f.is_subset_of(e))
            .map(|e| {
                let u = *e.0.iter().find(|w| !f.contains(**w)).unwrap();
                (u, e.clone())
            })
            .min_by_key(|(u, _)| *u)
            .expect("shadow member has a witness edge");
        debug_assert_ne!(u, v);
        let added = f.with(v);
        let mut set: BTreeSet<Edge> = self.edges.iter().cloned().collect();
        set.remove(&removed);
        set.insert(added.clone());
        Ok(ShiftOutcome::Shifted {
            hypergraph: Hypergraph::from_edge_set(self.n, self.r, set),
            removed,
            added,
        })
    }

    /// Iterates [`Hypergraph::shift_edge`] at fixed `v` until no shift applies.
    /// Returns the terminal hypergraph and every intermediate shift.
    pub fn shift_to_fixpoint(&self, v: u32) -> Result<(Hypergraph, Vec<(Edge, Edge)>)> {
        let mut current = self.clone();
        let mut steps = Vec::new();
        loop {
            match current.shift_edge(v)? {
                ShiftOutcome::Unchanged => return Ok((current, steps)),
                ShiftOutcome::Shifted {
                    hypergraph,
                    removed,
                    added,
                } => {
                    current = hypergraph;
                    steps.push((removed, added));
                }
            }
        }
    }

    /// Vertices with at least one incident edge.
    pub fn non_isolated(&self) -> Vec<u32> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(i, _)| i as u32 + 1)
            .collect()
    }

    /// Drops isolated vertices, relabeling the rest order-preservingly.
    pub fn strip_isolated(&self) -> Hypergraph {
        let keep = self.non_isolated();
        let mut map = vec![0u32; self.n + 1];
        for (i, &v) in keep.iter().enumerate() {
            map[v as usize] = i as u32 + 1;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::from_sorted(e.0.iter().map(|&w| map[w as usize]).collect()))
            .collect::<BTreeSet<_>>();
        Hypergraph::from_edge_set(keep.len(), self.r, edges)
    }

    pub fn with_isolated(&self, extra: usize) -> Hypergraph {
        Hypergraph {
            n: self.n + extra,
            r: self.r,
            edges: self.edges.clone(),
        }
    }

    /// Canonical representative of the isomorphism class with isolated
    /// vertices removed. Requires at most [`MAX_CANON_VERTICES`] vertices.
    pub fn canonical(&self) -> Result<Hypergraph> {
        if self.n > MAX_CANON_VERTICES {
            return Err(Error::TooManyVertices {
                n: self.n,
                max: MAX_CANON_VERTICES,
            });
        }
        let masks: Vec<u64> = self.edges.iter().map(Edge::mask).collect();
        let canon = canon::canonical_masks(self.n, &masks);
        Ok(Hypergraph::from_masks(self.r, &canon))
    }

    pub(crate) fn from_masks(r: usize, masks: &[u64]) -> Hypergraph {
        let union = masks.iter().fold(0u64, |a, &b| a | b);
        let n = 64 - union.leading_zeros() as usize;
        let mut edges: Vec<Edge> = masks.iter().map(|&m| Edge::from_mask(m)).collect();
        edges.sort_unstable();
        Hypergraph::from_sorted_edges(n, r, edges)
    }

    /// Isomorphism up to isolated vertices.
    pub fn is_isomorphic(&self, other: &Hypergraph) -> Result<bool> {
        if self.r != other.r || self.m() != other.m() {
            return Ok(false);
        }
        Ok(self.canonical()? == other.canonical()?)
    }

    /// True when, after stripping isolated vertices, this is `K_s^r` for some `s`.
    pub fn is_complete_up_to_isolated(&self) -> bool {
        let stripped = self.strip_isolated();
        let s = stripped.n;
        s >= self.r && binomial(s as u64, self.r as u64) == Some(stripped.m() as u64)
    }
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypergraph(n={}, r={}, {:?})", self.n, self.r, self.edges)
    }
}

/// Exact `C(n, k)`, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Infinite iterator over the r-subsets of `{1, 2, ...}` in colex order.
struct ColexSets {
    current: Vec<u32>,
}

impl ColexSets {
    fn new(r: usize) -> Self {
        ColexSets {
            current: (1..=r as u32).collect(),
        }
    }
}

impl Iterator for ColexSets {
    type Item = Edge;

    fn next(&mut self) -> Option<Edge> {
        let out = Edge(self.current.clone());
        let a = &mut self.current;
        let r = a.len();
        // first position whose successor leaves a gap
        let i = (0..r)
            .find(|&i| i + 1 == r || a[i] + 1 < a[i + 1])
            .unwrap_or(0);
        if r > 0 {
            a[i] += 1;
            for (j, slot) in a.iter_mut().enumerate().take(i) {
                *slot = j as u32 + 1;
            }
        }
        Some(out)
    }
}
