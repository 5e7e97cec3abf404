//! Structures for a target graph, the diagram of admissible moves between
//! them, and the tests run on it.
//!
//! Nodes are birecurrent structures whose purple subgraph is a labeled copy
//! of the target. Edges are extensions and switches between nodes. The
//! diagram proper keeps the strongly connected components with at least one
//! edge; every ideal decomposition of a candidate automorphism traces a loop
//! in one of them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::epp::{canonical_triples, epp_group};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{connected_catalog, SimpleGraph};
use crate::graph_maps::{
    validate_ideal_decomposition, EdgePermutation, FoldDecomposition, Generator, IdealDecompositionReport, RoseMap,
};
use crate::ltt::{ltt_of_map, LttStructure};
use crate::moves::{apply_move, determining_edges, GeneratingTriple, MoveKind};
use crate::rose::{BarStyle, Direction, Rank, Turn};

/// A connected simple graph on `2r - 1` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetGraph {
    rank: Rank,
    graph: SimpleGraph,
}

impl TargetGraph {
    /// Labeled copies are kept as edge bitmasks over at most 64 vertex pairs.
    pub const MAX_RANK: usize = 6;

    pub fn new(graph: SimpleGraph, rank: Rank) -> Result<Self> {
        if rank.get() > Self::MAX_RANK {
            return Err(Error::InvalidTarget(format!("ranks above {} are not supported", Self::MAX_RANK)));
        }
        let want = 2 * rank.get() - 1;
        if graph.num_vertices() != want {
            return Err(Error::InvalidTarget(format!(
                "rank {rank} needs {want} vertices, the graph has {}",
                graph.num_vertices()
            )));
        }
        if !graph.is_connected() {
            return Err(Error::InvalidTarget("graph is not connected".into()));
        }
        Ok(TargetGraph { rank, graph })
    }

    /// The star with `2r - 2` edges. Panics above [`Self::MAX_RANK`].
    pub fn star(rank: Rank) -> Self {
        TargetGraph::new(SimpleGraph::star(2 * rank.get() - 1), rank).expect("rank within range")
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn edge_mask(g: &SimpleGraph) -> u64 {
    let n = g.num_vertices();
    g.edges().iter().fold(0, |m, &(i, j)| m | 1 << pair_index(n, i, j))
}

/// Every labeled copy of `g` on its own vertex set, as edge masks.
fn labeled_copies(g: &SimpleGraph) -> Vec<u64> {
    let n = g.num_vertices();
    let swap = |mask: u64, k: usize| {
        let mut out = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> pair_index(n, i, j) & 1 == 1 {
                    let t = |v: usize| {
                        if v == k {
                            k + 1
                        } else if v == k + 1 {
                            k
                        } else {
                            v
                        }
                    };
                    out |= 1 << pair_index(n, t(i), t(j));
                }
            }
        }
        out
    };
    let start = edge_mask(g);
    let mut seen = BTreeSet::from([start]);
    let mut frontier = vec![start];
    while let Some(m) = frontier.pop() {
        for k in 0..n.saturating_sub(1) {
            let next = swap(m, k);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// All structures whose purple subgraph is a labeled copy of the target,
/// sorted; only birecurrent ones when `admissible_only` is set.
pub fn enumerate_structures(target: &TargetGraph, admissible_only: bool, exec: Exec) -> Vec<LttStructure> {
    let rank = target.rank;
    let n = target.graph.num_vertices();
    let copies = labeled_copies(&target.graph);
    let work: Vec<(Direction, u64)> = rank.directions().flat_map(|red| copies.iter().map(move |&m| (red, m))).collect();
    let chunks = exec.map(&work, |&(red, mask)| {
        let purple: Vec<Direction> = rank.directions().filter(|&d| d != red).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if mask >> pair_index(n, i, j) & 1 == 1 {
                    edges.push(Turn::new(purple[i], purple[j]));
                }
            }
        }
        purple
            .iter()
            .filter(|&&p| p != red.bar())
            .map(|&p| LttStructure::from_purple(rank, red, edges.iter().copied(), p))
            .filter(|s| !admissible_only || s.is_birecurrent())
            .collect::<Vec<_>>()
    });
    let mut all: Vec<LttStructure> = chunks.into_iter().flatten().collect();
    all.sort();
    all.dedup();
    all
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiagramEdge {
    pub source: usize,
    pub dest: usize,
    pub kind: MoveKind,
    pub det: Turn,
    pub gen: Generator,
}

/// Nodes are admissible structures, edges the admissible moves between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub rank: Rank,
    pub nodes: Vec<LttStructure>,
    pub edges: Vec<DiagramEdge>,
}

impl Diagram {
    pub fn triple(&self, e: &DiagramEdge) -> GeneratingTriple {
        GeneratingTriple { gen: e.gen, source: self.nodes[e.source].clone(), dest: self.nodes[e.dest].clone() }
    }

    /// Checks that every edge indexes existing nodes and is the move it
    /// claims to be; used when a diagram is read back from disk.
    pub fn check(&self) -> Result<()> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.rank() != self.rank {
                return Err(Error::RankMismatch(self.rank.get(), n.rank().get()));
            }
            if !n.is_valid() {
                return Err(Error::InvalidStructure(format!("node {i}: {:?}", n.validate())));
            }
        }
        for e in &self.edges {
            let (Some(source), Some(dest)) = (self.nodes.get(e.source), self.nodes.get(e.dest)) else {
                return Err(Error::InvalidMove(format!("edge {} -> {} leaves the node list", e.source, e.dest)));
            };
            let t = apply_move(e.kind, dest, e.det)?;
            if t.gen != e.gen || &t.source != source {
                return Err(Error::InvalidMove(format!("edge {} -> {} is not the move it records", e.source, e.dest)));
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  node [shape=box, fontname=monospace];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", n.label(BarStyle::Prime));
        }
        for e in &self.edges {
            let kind = match e.kind {
                MoveKind::Extension => "ext",
                MoveKind::Switch => "sw",
            };
            let _ = writeln!(s, "  n{} -> n{} [label=\"{kind} {}\"];", e.source, e.dest, e.gen);
        }
        s.push_str("}\n");
        s
    }
}

/// Preliminary diagram on the given nodes: from each destination and each
/// determining edge, both moves, kept when the source is also a node.
pub fn build_preliminary(rank: Rank, nodes: Vec<LttStructure>, exec: Exec) -> Diagram {
    let index: HashMap<&LttStructure, usize> = nodes.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let ids: Vec<usize> = (0..nodes.len()).collect();
    let per_node = exec.map(&ids, |&dest| {
        let mut out = Vec::new();
        for det in determining_edges(&nodes[dest]) {
            for kind in [MoveKind::Extension, MoveKind::Switch] {
                if let Ok(t) = apply_move(kind, &nodes[dest], det) {
                    if let Some(&source) = index.get(&t.source) {
                        out.push(DiagramEdge { source, dest, kind, det, gen: t.gen });
                    }
                }
            }
        }
        out
    });
    let mut edges: Vec<DiagramEdge> = per_node.into_iter().flatten().collect();
    edges.sort();
    Diagram { rank, nodes, edges }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Indices into the diagram's nodes, sorted.
    pub nodes: Vec<usize>,
    /// Indices into the diagram's edges, sorted.
    pub edges: Vec<usize>,
    /// Directions labeling a red vertex somewhere in the component.
    pub red_census: BTreeSet<Direction>,
}

impl Component {
    /// Every edge pair contributes a red vertex somewhere in the component.
    pub fn has_irreducibility_potential(&self, rank: Rank) -> bool {
        let edges: BTreeSet<usize> = self.red_census.iter().map(|d| d.edge()).collect();
        edges.len() == rank.get()
    }
}

/// The strongly connected components of a preliminary diagram that carry
/// at least one edge, over the full node and edge lists.
#[derive(Clone, Debug, Serialize)]
pub struct IdDiagram {
    pub diagram: Diagram,
    pub components: Vec<Component>,
}

pub fn id_diagram(diagram: Diagram) -> IdDiagram {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(diagram.nodes.len(), diagram.edges.len());
    let ids: Vec<_> = (0..diagram.nodes.len()).map(|_| g.add_node(())).collect();
    for e in &diagram.edges {
        g.add_edge(ids[e.source], ids[e.dest], ());
    }
    let mut comp_of = vec![usize::MAX; diagram.nodes.len()];
    let sccs = kosaraju_scc(&g);
    for (c, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp_of[n.index()] = c;
        }
    }
    let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in diagram.edges.iter().enumerate() {
        if comp_of[e.source] == comp_of[e.dest] {
            by_comp.entry(comp_of[e.source]).or_default().push(i);
        }
    }
    let mut components: Vec<Component> = by_comp
        .into_iter()
        .map(|(c, edges)| {
            let mut nodes: Vec<usize> = sccs[c].iter().map(|n| n.index()).collect();
            nodes.sort_unstable();
            let red_census = nodes.iter().map(|&n| diagram.nodes[n].red_vertex()).collect();
            Component { nodes, edges, red_census }
        })
        .collect();
    components.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    IdDiagram { diagram, components }
}

impl IdDiagram {
    /// Components grouped into classes under relabelings preserving edge
    /// pairs; each class lists component indices, classes in order of
    /// their least member.
    pub fn epp_classes(&self) -> Vec<Vec<usize>> {
        let group = epp_group(self.diagram.rank);
        let mut classes: BTreeMap<Vec<GeneratingTriple>, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.components.iter().enumerate() {
            let triples: Vec<_> = c.edges.iter().map(|&e| self.diagram.triple(&self.diagram.edges[e])).collect();
            classes.entry(canonical_triples(&triples, &group)).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = classes.into_values().collect();
        out.sort();
        out
    }

    /// Closed walks from `base` back to `base` that visit no node twice,
    /// as edge index sequences, at most `cap` of them with length at most
    /// `max_len`, in depth-first order.
    pub fn find_loops(&self, base: usize, max_len: usize, cap: usize) -> Vec<Vec<usize>> {
        let mut out_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in &self.components {
            for &e in &c.edges {
                out_edges.entry(self.diagram.edges[e].source).or_default().push(e);
            }
        }
        let mut loops = Vec::new();
        let mut path = Vec::new();
        let mut on_path = BTreeSet::from([base]);
        walk(self, &out_edges, base, base, max_len, cap, &mut path, &mut on_path, &mut loops);
        loops
    }

    /// Composes the generators along `edges` and checks the composite.
    pub fn verify_loop(&self, edges: &[usize]) -> Result<LoopReport> {
        let d = &self.diagram;
        if edges.is_empty() {
            return Err(Error::InvalidLoop("empty loop".into()));
        }
        for w in edges.windows(2) {
            if d.edges[w[0]].dest != d.edges[w[1]].source {
                return Err(Error::InvalidLoop(format!("edges {} and {} are not consecutive", w[0], w[1])));
            }
        }
        let (first, last) = (&d.edges[edges[0]], &d.edges[*edges.last().expect("nonempty")]);
        if first.source != last.dest {
            return Err(Error::InvalidLoop("walk is not closed".into()));
        }
        let decomposition = FoldDecomposition {
            rank: d.rank,
            generators: edges.iter().map(|&e| d.edges[e].gen).collect(),
            permutation: EdgePermutation::identity(d.rank),
        };
        let composite = decomposition.compose()?;
        let structure = ltt_of_map(&composite).ok();
        let base = &d.nodes[first.source];
        Ok(LoopReport {
            train_track: composite.is_train_track(),
            ideal: validate_ideal_decomposition(&decomposition),
            structure_matches: structure.as_ref() == Some(base),
            structure_contained: structure.as_ref().is_some_and(|s| {
                s.red_vertex() == base.red_vertex()
                    && s.colored_edges().iter().all(|e| base.colored_edges().contains(e))
            }),
            composite,
            decomposition,
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let d = &self.diagram;
        let mut s = format!("digraph \"{name}\" {{\n  node [shape=box, fontname=monospace];\n");
        for (c, comp) in self.components.iter().enumerate() {
            let _ = writeln!(s, "  subgraph cluster_{c} {{\n    label=\"component {c}\";");
            for &n in &comp.nodes {
                let _ = writeln!(s, "    n{n} [label=\"{}\"];", d.nodes[n].label(BarStyle::Prime));
            }
            s.push_str("  }\n");
            for &e in &comp.edges {
                let e = &d.edges[e];
                let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", e.source, e.dest, e.gen);
            }
        }
        s.push_str("}\n");
        s
    }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    d: &IdDiagram,
    out_edges: &BTreeMap<usize, Vec<usize>>,
    base: usize,
    at: usize,
    max_len: usize,
    cap: usize,
    path: &mut Vec<usize>,
    on_path: &mut BTreeSet<usize>,
    loops: &mut Vec<Vec<usize>>,
) {
    if path.len() == max_len || loops.len() >= cap {
        return;
    }
    for &e in out_edges.get(&at).map(Vec::as_slice).unwrap_or(&[]) {
        if loops.len() >= cap {
            return;
        }
        let next = d.diagram.edges[e].dest;
        path.push(e);
        if next == base {
            loops.push(path.clone());
        } else if on_path.insert(next) {
            walk(d, out_edges, base, next, max_len, cap, path, on_path, loops);
            on_path.remove(&next);
        }
        path.pop();
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopReport {
    pub decomposition: FoldDecomposition,
    pub composite: RoseMap,
    pub train_track: bool,
    pub ideal: IdealDecompositionReport,
    /// The composite's structure equals the base node.
    pub structure_matches: bool,
    /// The composite's structure has the base node's red vertex and only
    /// colored edges of the base node.
    pub structure_contained: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No birecurrent structure exists for the target.
    UnachievedByBirecurrency,
    /// No diagram component has red vertices in every edge pair.
    UnachievedByIrreducibilityPotential,
    /// Both necessary conditions hold; nothing is concluded.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub rank: Rank,
    pub structures: usize,
    pub admissible: usize,
    pub preliminary_edges: usize,
    pub verdict: Verdict,
    /// Per component: whether it passes the red vertex census.
    pub component_passes: Vec<bool>,
    #[serde(skip)]
    pub id: IdDiagram,
}

pub fn analyze(target: &TargetGraph, exec: Exec) -> Analysis {
    let rank = target.rank;
    let all = enumerate_structures(target, false, exec);
    let flags = exec.map(&all, |s| s.is_birecurrent());
    let nodes: Vec<LttStructure> = all.iter().zip(&flags).filter(|(_, &b)| b).map(|(s, _)| s.clone()).collect();
    let admissible = nodes.len();
    let prelim = build_preliminary(rank, nodes, exec);
    let preliminary_edges = prelim.edges.len();
    let id = id_diagram(prelim);
    let component_passes: Vec<bool> = id.components.iter().map(|c| c.has_irreducibility_potential(rank)).collect();
    let verdict = if admissible == 0 {
        Verdict::UnachievedByBirecurrency
    } else if !component_passes.iter().any(|&p| p) {
        Verdict::UnachievedByIrreducibilityPotential
    } else {
        Verdict::Inconclusive
    };
    Analysis { rank, structures: all.len(), admissible, preliminary_edges, verdict, component_passes, id }
}

/// Catalog entries `(id, graph)` for connected graphs on `2r - 1` vertices.
pub fn catalog(rank: Rank) -> Vec<(String, SimpleGraph)> {
    connected_catalog(2 * rank.get() - 1).into_iter().enumerate().map(|(i, g)| (format!("g{i:02}"), g)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub id: String,
    pub graph: SimpleGraph,
    pub analysis: Analysis,
    /// Red vertex census of each component.
    pub censuses: Vec<BTreeSet<Direction>>,
}

/// A sweep row without the diagram, small enough to keep for large catalogs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub id: String,
    pub edges: Vec<(usize, usize)>,
    pub structures: usize,
    pub admissible: usize,
    pub preliminary_edges: usize,
    pub components: usize,
    pub passing: usize,
    pub verdict: Verdict,
    pub censuses: Vec<BTreeSet<Direction>>,
}

impl SweepRow {
    pub fn summary(&self) -> SweepSummary {
        let a = &self.analysis;
        SweepSummary {
            id: self.id.clone(),
            edges: self.graph.edges(),
            structures: a.structures,
            admissible: a.admissible,
            preliminary_edges: a.preliminary_edges,
            components: self.censuses.len(),
            passing: a.component_passes.iter().filter(|&&p| p).count(),
            verdict: a.verdict,
            censuses: self.censuses.clone(),
        }
    }
}

fn targets(rank: Rank, graphs: &[(String, SimpleGraph)]) -> Result<Vec<(String, TargetGraph)>> {
    graphs.iter().map(|(id, g)| TargetGraph::new(g.clone(), rank).map(|t| (id.clone(), t))).collect()
}

fn sweep_row(id: &str, t: &TargetGraph, exec: Exec) -> SweepRow {
    let analysis = analyze(t, exec);
    let censuses = analysis.id.components.iter().map(|c| c.red_census.clone()).collect();
    SweepRow { id: id.to_string(), graph: t.graph.clone(), analysis, censuses }
}

/// Analyzes every graph; graphs are processed in parallel under `exec`.
pub fn sweep(rank: Rank, graphs: &[(String, SimpleGraph)], exec: Exec) -> Result<Vec<SweepRow>> {
    Ok(exec.map(&targets(rank, graphs)?, |(id, t)| sweep_row(id, t, exec)))
}

/// As [`sweep`], keeping only the summary of each row.
pub fn sweep_summaries(rank: Rank, graphs: &[(String, SimpleGraph)], exec: Exec) -> Result<Vec<SweepSummary>> {
    Ok(exec.map(&targets(rank, graphs)?, |(id, t)| sweep_row(id, t, exec).summary()))
}
