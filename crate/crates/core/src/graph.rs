//! Small simple graphs: construction, connectivity, canonical forms,
//! isomorphism search and the catalog of connected graphs on `n` vertices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..n`, `n <= 64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleGraph {
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub const MAX_VERTICES: usize = 64;

    pub fn empty(n: usize) -> Self {
        assert!(n <= Self::MAX_VERTICES, "at most {} vertices", Self::MAX_VERTICES);
        SimpleGraph { adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > Self::MAX_VERTICES {
            return Err(Error::InvalidTarget(format!("{n} vertices exceeds the limit of {}", Self::MAX_VERTICES)));
        }
        let mut g = SimpleGraph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidTarget(format!("edge ({u}, {v}) leaves the vertex range 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidTarget(format!("loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidTarget(format!("repeated edge ({u}, {v})")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn star(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for v in 1..n {
            g.add_edge(0, v);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = SimpleGraph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.adj[v])
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for u in 0..self.num_vertices() {
            for v in bits(self.adj[u] >> (u + 1)) {
                out.push((u, u + 1 + v));
            }
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut seen = 0u64;
        let mut out = Vec::new();
        for s in 0..n {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << s;
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v];
                }
                frontier = next & !comp;
                comp |= next;
            }
            seen |= comp;
            out.push(bits(comp).collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> SimpleGraph {
        let mut g = SimpleGraph::empty(self.num_vertices());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Stable vertex coloring from iterated degree refinement. Colors are
    /// isomorphism invariant and numbered from 0.
    fn refined_colors(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut colors: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut classes = usize::MAX;
        loop {
            let sigs: Vec<(usize, Vec<usize>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<usize> = self.neighbors(v).map(|w| colors[w]).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let ranks: BTreeMap<&(usize, Vec<usize>), usize> =
                sigs.iter().collect::<BTreeSet<_>>().into_iter().enumerate().map(|(i, s)| (s, i)).collect();
            colors = sigs.iter().map(|s| ranks[s]).collect();
            if ranks.len() == classes {
                return colors;
            }
            classes = ranks.len();
        }
    }

    /// Canonical representative of the isomorphism class: the relabeling,
    /// among those listing refined color classes in order, whose adjacency
    /// rows are lexicographically least.
    pub fn canonical_form(&self) -> SimpleGraph {
        let n = self.num_vertices();
        let colors = self.refined_colors();
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        let cells: Vec<Vec<usize>> = cells.into_values().collect();
        let mut best: Option<SimpleGraph> = None;
        let mut order = Vec::with_capacity(n);
        canonical_search(self, &cells, 0, &mut order, &mut best);
        best.expect("at least one ordering")
    }

    pub fn is_isomorphic(&self, other: &SimpleGraph) -> bool {
        self.num_vertices() == other.num_vertices()
            && self.num_edges() == other.num_edges()
            && self.canonical_form() == other.canonical_form()
    }

    /// Some bijection `f` with `u ~ v` iff `f(u) ~ f(v)` in `other`.
    pub fn find_isomorphism(&self, other: &SimpleGraph) -> Option<Vec<usize>> {
        let n = self.num_vertices();
        if n != other.num_vertices() || self.num_edges() != other.num_edges() {
            return None;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = 0u64;
        iso_search(self, other, 0, &mut map, &mut used).then_some(map)
    }
}

fn canonical_search(
    g: &SimpleGraph,
    cells: &[Vec<usize>],
    cell: usize,
    order: &mut Vec<usize>,
    best: &mut Option<SimpleGraph>,
) {
    if cell == cells.len() {
        let mut perm = vec![0; order.len()];
        for (pos, &v) in order.iter().enumerate() {
            perm[v] = pos;
        }
        let cand = g.relabel(&perm);
        if best.as_ref().is_none_or(|b| cand.adj < b.adj) {
            *best = Some(cand);
        }
        return;
    }
    permute_cell(g, cells, cell, &cells[cell].clone(), order, best);
}

fn permute_cell(
    g: &SimpleGraph,
    cells: &[Vec<usize>],
    cell: usize,
    remaining: &[usize],
    order: &mut Vec<usize>,
    best: &mut Option<SimpleGraph>,
) {
    if remaining.is_empty() {
        canonical_search(g, cells, cell + 1, order, best);
        return;
    }
    for i in 0..remaining.len() {
        let mut rest = remaining.to_vec();
        let v = rest.remove(i);
        order.push(v);
        permute_cell(g, cells, cell, &rest, order, best);
        order.pop();
    }
}

fn iso_search(a: &SimpleGraph, b: &SimpleGraph, v: usize, map: &mut [usize], used: &mut u64) -> bool {
    if v == a.num_vertices() {
        return true;
    }
    for w in 0..b.num_vertices() {
        if *used >> w & 1 == 1 || a.degree(v) != b.degree(w) {
            continue;
        }
        let consistent = (0..v).all(|u| a.has_edge(u, v) == b.has_edge(map[u], w));
        if !consistent {
            continue;
        }
        map[v] = w;
        *used |= 1 << w;
        if iso_search(a, b, v + 1, map, used) {
            return true;
        }
        *used &= !(1 << w);
    }
    map[v] = usize::MAX;
    false
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// Connected simple graphs on `n` vertices up to isomorphism, in canonical
/// form, ordered by edge count and then by canonical adjacency.
pub fn connected_catalog(n: usize) -> Vec<SimpleGraph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: BTreeSet<SimpleGraph> = BTreeSet::from([SimpleGraph::empty(n).canonical_form()]);
    let mut out: Vec<SimpleGraph> = Vec::new();
    let max_edges = n * (n - 1) / 2;
    for _ in 0..=max_edges {
        let mut connected: Vec<_> = level.iter().filter(|g| g.is_connected()).cloned().collect();
        connected.sort_by(|a, b| b.adj.cmp(&a.adj));
        out.extend(connected);
        let mut next = BTreeSet::new();
        for g in &level {
            for u in 0..n {
                for v in u + 1..n {
                    if !g.has_edge(u, v) {
                        let mut h = g.clone();
                        h.add_edge(u, v);
                        next.insert(h.canonical_form());
                    }
                }
            }
        }
        level = next;
    }
    out
}

/// JSON form: `{ "vertices": 5, "edges": [[0, 1], ...] }`.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for SimpleGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr { vertices: self.num_vertices(), edges: self.edges() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        SimpleGraph::from_edges(repr.vertices, &repr.edges).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute force over all `n!` labelings.
    fn brute_canonical(g: &SimpleGraph) -> Vec<(usize, usize)> {
        let n = g.num_vertices();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<(usize, usize)>> = None;
        loop {
            let e = g.relabel(&perm).edges();
            if best.as_ref().is_none_or(|b| &e < b) {
                best = Some(e);
            }
            if !next_permutation(&mut perm) {
                return best.unwrap();
            }
        }
    }

    fn next_permutation(p: &mut [usize]) -> bool {
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }

    #[test]
    fn builders() {
        assert_eq!(SimpleGraph::star(5).num_edges(), 4);
        assert_eq!(SimpleGraph::cycle(5).num_edges(), 5);
        assert_eq!(SimpleGraph::complete(5).num_edges(), 10);
        assert!(SimpleGraph::path(4).is_connected());
        assert_eq!(SimpleGraph::empty(3).components().len(), 3);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(SimpleGraph::from_edges(3, &[(0, 0)]).is_err());
        assert!(SimpleGraph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(SimpleGraph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn catalog_counts() {
        // Known counts of connected graphs: 1, 1, 2, 6, 21, 112.
        let counts: Vec<usize> = (1..=6).map(|n| connected_catalog(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn catalog_is_pairwise_non_isomorphic() {
        let cat = connected_catalog(5);
        let brute: BTreeSet<_> = cat.iter().map(brute_canonical).collect();
        assert_eq!(brute.len(), cat.len());
        assert_eq!(cat[0].num_edges(), 4);
        assert_eq!(cat.last().unwrap(), &SimpleGraph::complete(5).canonical_form());
    }

    #[test]
    fn json_round_trip() {
        let g = SimpleGraph::cycle(4);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"vertices":4,"edges":[[0,1],[0,3],[1,2],[2,3]]}"#);
        assert_eq!(serde_json::from_str::<SimpleGraph>(&s).unwrap(), g);
        assert!(serde_json::from_str::<SimpleGraph>(r#"{"vertices":2,"edges":[[0,0]]}"#).is_err());
    }

    fn arb_graph(n: usize) -> impl Strategy<Value = SimpleGraph> {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = SimpleGraph::empty(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    }

    proptest! {
        #[test]
        fn canonical_form_is_invariant(g in arb_graph(6), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
            let h = g.relabel(&perm);
            prop_assert_eq!(g.canonical_form(), h.canonical_form());
            let f = g.find_isomorphism(&h).unwrap();
            for (u, v) in g.edges() {
                prop_assert!(h.has_edge(f[u], f[v]));
            }
        }

        #[test]
        fn canonical_form_separates(a in arb_graph(5), b in arb_graph(5)) {
            prop_assert_eq!(a.is_isomorphic(&b), brute_canonical(&a) == brute_canonical(&b));
            prop_assert_eq!(a.find_isomorphism(&b).is_some(), a.is_isomorphic(&b));
        }
    }
}
