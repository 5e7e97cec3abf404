//! Local, stable and ideal Whitehead graphs of a train track rose map.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::Serialize;

use super::RoseMap;
use crate::error::Result;
use crate::graph::SimpleGraph;
use crate::rose::{Direction, Turn};

/// Graph whose vertices are directions and whose edges are turns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteheadGraph {
    pub vertices: BTreeSet<Direction>,
    pub edges: BTreeSet<Turn>,
}

impl WhiteheadGraph {
    /// Directions met by a taken turn, joined by the taken turns.
    pub fn local(map: &RoseMap) -> Result<Self> {
        let edges = map.turns_taken_closure()?;
        let vertices = edges.iter().flat_map(|t| [t.first(), t.second()]).collect();
        Ok(WhiteheadGraph { vertices, edges })
    }

    /// The local graph restricted to periodic directions.
    pub fn stable(map: &RoseMap) -> Result<Self> {
        let local = Self::local(map)?;
        let periodic = map.direction_map().periodic();
        Ok(local.restrict(&periodic))
    }

    /// For a rose map without periodic Nielsen paths the ideal Whitehead
    /// graph coincides with the stable one; that hypothesis is not checked.
    pub fn ideal(map: &RoseMap) -> Result<Self> {
        Self::stable(map)
    }

    pub fn restrict(&self, keep: &BTreeSet<Direction>) -> Self {
        WhiteheadGraph {
            vertices: self.vertices.intersection(keep).copied().collect(),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|t| keep.contains(&t.first()) && keep.contains(&t.second()))
                .collect(),
        }
    }

    /// Vertex order used by [`to_simple_graph`](Self::to_simple_graph).
    pub fn vertex_order(&self) -> Vec<Direction> {
        self.vertices.iter().copied().collect()
    }

    pub fn to_simple_graph(&self) -> SimpleGraph {
        let order = self.vertex_order();
        let idx = |d: Direction| order.binary_search(&d).expect("edge endpoint is a vertex");
        let edges: Vec<_> = self.edges.iter().map(|t| (idx(t.first()), idx(t.second()))).collect();
        SimpleGraph::from_edges(order.len(), &edges).expect("turns are simple edges")
    }

    pub fn components(&self) -> Vec<BTreeSet<Direction>> {
        let order = self.vertex_order();
        self.to_simple_graph().components().into_iter().map(|c| c.into_iter().map(|i| order[i]).collect()).collect()
    }
}

/// `1 - k/2` for each component with `k` vertices, in decreasing order.
pub fn index_list(graph: &WhiteheadGraph) -> Vec<Ratio<i64>> {
    let mut out: Vec<Ratio<i64>> =
        graph.components().iter().map(|c| Ratio::from_integer(1) - Ratio::new(c.len() as i64, 2)).collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_maps::tests::example_map;
    use crate::rose::dir;

    #[test]
    fn example_graphs() {
        let g = example_map();
        let lw = WhiteheadGraph::local(&g).unwrap();
        assert_eq!(lw.vertices.len(), 6);
        assert_eq!(lw.edges.len(), 6);
        let sw = WhiteheadGraph::stable(&g).unwrap();
        assert!(!sw.vertices.contains(&dir("b'")));
        assert_eq!(sw.vertices.len(), 5);
        assert_eq!(sw.edges.len(), 5);
        assert!(sw.to_simple_graph().is_connected());
        assert_eq!(WhiteheadGraph::ideal(&g).unwrap(), sw);
        assert_eq!(index_list(&sw), vec![Ratio::new(-3, 2)]);
    }

    #[test]
    fn index_list_of_split_graph() {
        let w = WhiteheadGraph {
            vertices: [dir("a"), dir("b"), dir("c"), dir("a'"), dir("b'")].into(),
            edges: [Turn::new(dir("a"), dir("b")), Turn::new(dir("a'"), dir("b'"))].into(),
        };
        let list = index_list(&w);
        assert_eq!(list, vec![Ratio::new(1, 2), Ratio::from_integer(0), Ratio::from_integer(0)]);
    }
}
