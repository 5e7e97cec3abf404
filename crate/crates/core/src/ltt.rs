//! Lamination train track structures and birecurrency.
//!
//! A structure on the rose of rank `r` has one vertex per direction. Black
//! edges `{d, bar(d)}` are implicit. Colored edges are stored explicitly and
//! tagged purple or red so that malformed colorings can be reported rather
//! than silently repaired.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_maps::{RoseMap, WhiteheadGraph};
use crate::rose::{BarStyle, Direction, EdgePath, Rank, Turn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeColor {
    Purple,
    Red,
}

/// JSON form: `{ "u": 1, "v": -2, "color": "purple" }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredEdge {
    pub turn: Turn,
    pub color: EdgeColor,
}

#[derive(Serialize, Deserialize)]
struct ColoredEdgeRepr {
    u: Direction,
    v: Direction,
    color: EdgeColor,
}

impl Serialize for ColoredEdge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ColoredEdgeRepr { u: self.turn.first(), v: self.turn.second(), color: self.color }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoredEdge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ColoredEdgeRepr::deserialize(d)?;
        Ok(ColoredEdge { turn: Turn::new(r.u, r.v), color: r.color })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LttStructure {
    rank: Rank,
    red_vertex: Direction,
    #[serde(rename = "colored_edges")]
    colored: Vec<ColoredEdge>,
}

/// One failed structural requirement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum LttViolation {
    DirectionOutOfRange { direction: Direction },
    ColoredLoop { turn: Turn },
    DuplicateEdge { turn: Turn },
    PurpleAtRedVertex { turn: Turn },
    RedEdgeMissesRedVertex { turn: Turn },
    RedEdgeCount { count: usize },
    PurpleVertexCount { count: usize },
    VertexWithoutColoredEdge { direction: Direction },
    RedEdgeIsEdgePair { turn: Turn },
}

impl LttStructure {
    /// Stores the data as given, sorted; see [`validate`](Self::validate).
    pub fn from_parts(rank: Rank, red_vertex: Direction, mut colored: Vec<ColoredEdge>) -> Self {
        colored.sort();
        LttStructure { rank, red_vertex, colored }
    }

    /// Builds and validates a structure.
    pub fn new(rank: Rank, red_vertex: Direction, colored: Vec<ColoredEdge>) -> Result<Self> {
        let s = Self::from_parts(rank, red_vertex, colored);
        match s.validate().first() {
            None => Ok(s),
            Some(v) => Err(Error::InvalidStructure(format!("{v:?}"))),
        }
    }

    /// Structure with the given purple edges and red edge `{red_vertex, attach}`.
    pub fn from_purple(
        rank: Rank,
        red_vertex: Direction,
        purple: impl IntoIterator<Item = Turn>,
        attach: Direction,
    ) -> Self {
        let mut colored: Vec<ColoredEdge> =
            purple.into_iter().map(|turn| ColoredEdge { turn, color: EdgeColor::Purple }).collect();
        colored.push(ColoredEdge { turn: Turn::new(red_vertex, attach), color: EdgeColor::Red });
        Self::from_parts(rank, red_vertex, colored)
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn red_vertex(&self) -> Direction {
        self.red_vertex
    }

    pub fn colored_edges(&self) -> &[ColoredEdge] {
        &self.colored
    }

    pub fn purple_edges(&self) -> impl Iterator<Item = Turn> + '_ {
        self.colored.iter().filter(|e| e.color == EdgeColor::Purple).map(|e| e.turn)
    }

    pub fn red_edge(&self) -> Option<Turn> {
        self.colored.iter().find(|e| e.color == EdgeColor::Red).map(|e| e.turn)
    }

    /// Purple endpoint of the red edge.
    pub fn red_attachment(&self) -> Option<Direction> {
        self.red_edge().and_then(|t| t.other(self.red_vertex))
    }

    pub fn color_of(&self, t: Turn) -> Option<EdgeColor> {
        self.colored.iter().find(|e| e.turn == t).map(|e| e.color)
    }

    pub fn purple_vertices(&self) -> BTreeSet<Direction> {
        self.rank.directions().filter(|&d| d != self.red_vertex).collect()
    }

    /// Purple edges at `d`, sorted.
    pub fn purple_edges_at(&self, d: Direction) -> Vec<Turn> {
        self.purple_edges().filter(|t| t.contains(d)).collect()
    }

    /// The purple subgraph on the purple vertices.
    pub fn purple_graph(&self) -> WhiteheadGraph {
        WhiteheadGraph { vertices: self.purple_vertices(), edges: self.purple_edges().collect() }
    }

    /// Same structure with the red edge moved to `{red_vertex, attach}`.
    pub fn with_red_attachment(&self, attach: Direction) -> Self {
        Self::from_purple(self.rank, self.red_vertex, self.purple_edges(), attach)
    }

    /// Image under a relabeling of directions.
    pub fn relabel(&self, f: impl Fn(Direction) -> Direction) -> Self {
        let colored = self.colored.iter().map(|e| ColoredEdge { turn: e.turn.map(&f), color: e.color }).collect();
        Self::from_parts(self.rank, f(self.red_vertex), colored)
    }

    pub fn validate(&self) -> Vec<LttViolation> {
        use LttViolation::*;
        let mut out = Vec::new();
        let rank = self.rank;
        let mut endpoints: BTreeSet<Direction> = BTreeSet::from([self.red_vertex]);
        endpoints.extend(self.colored.iter().flat_map(|e| [e.turn.first(), e.turn.second()]));
        for &d in &endpoints {
            if !rank.contains(d) {
                out.push(DirectionOutOfRange { direction: d });
            }
        }
        let mut seen = BTreeSet::new();
        for e in &self.colored {
            if e.turn.is_degenerate() {
                out.push(ColoredLoop { turn: e.turn });
            }
            if !seen.insert(e.turn) {
                out.push(DuplicateEdge { turn: e.turn });
            }
            match e.color {
                EdgeColor::Purple if e.turn.contains(self.red_vertex) => out.push(PurpleAtRedVertex { turn: e.turn }),
                EdgeColor::Red if !e.turn.contains(self.red_vertex) => {
                    out.push(RedEdgeMissesRedVertex { turn: e.turn })
                }
                EdgeColor::Red if e.turn.is_edge_pair() => out.push(RedEdgeIsEdgePair { turn: e.turn }),
                _ => {}
            }
        }
        let reds = self.colored.iter().filter(|e| e.color == EdgeColor::Red).count();
        if reds != 1 {
            out.push(RedEdgeCount { count: reds });
        }
        let purple = rank.directions().filter(|&d| d != self.red_vertex).count();
        if purple != rank.num_directions() - 1 {
            out.push(PurpleVertexCount { count: purple });
        }
        for d in rank.directions() {
            if !self.colored.iter().any(|e| e.turn.contains(d)) {
                out.push(VertexWithoutColoredEdge { direction: d });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// True if every turn crossed by `p` is a colored edge, so that `p`
    /// traces a path alternating black and colored edges.
    pub fn realizes_smoothly(&self, p: &EdgePath) -> bool {
        p.turns().all(|t| self.color_of(t).is_some())
    }

    pub fn transition_digraph(&self) -> TransitionDigraph {
        TransitionDigraph::new(self)
    }

    pub fn is_birecurrent(&self) -> bool {
        self.transition_digraph().covering_component().is_some()
    }

    /// Text label, e.g. `red b' {a,b'}* {a',c'} ...` with the red edge starred.
    pub fn label(&self, style: BarStyle) -> String {
        let mut s = format!("red {}", self.red_vertex.label(style));
        for e in &self.colored {
            s.push(' ');
            s.push_str(&e.turn.label(style));
            if e.color == EdgeColor::Red {
                s.push('*');
            }
        }
        s
    }

    /// Graphviz rendering: black edge pairs, purple and red colored edges.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n  node [shape=circle];\n");
        for line in self.dot_statements("") {
            let _ = writeln!(s, "  {line}");
        }
        s.push_str("}\n");
        s
    }

    /// Node and edge statements with node ids prefixed by `prefix`.
    pub(crate) fn dot_statements(&self, prefix: &str) -> Vec<String> {
        let mut out = Vec::new();
        for d in self.rank.directions() {
            let style = if d == self.red_vertex { "color=red, fontcolor=red" } else { "color=purple" };
            out.push(format!("\"{prefix}{d}\" [label=\"{d}\", {style}];"));
        }
        for i in 0..self.rank.get() {
            let (f, b) = (Direction::of_edge(i, true), Direction::of_edge(i, false));
            out.push(format!("\"{prefix}{f}\" -- \"{prefix}{b}\" [color=black, penwidth=2];"));
        }
        for e in &self.colored {
            let color = match e.color {
                EdgeColor::Purple => "purple",
                EdgeColor::Red => "red",
            };
            out.push(format!("\"{prefix}{}\" -- \"{prefix}{}\" [color={color}];", e.turn.first(), e.turn.second()));
        }
        out
    }
}

/// Structure determined by a train track map with exactly one nonperiodic
/// direction: taken turns become colored edges, purple when both ends are
/// periodic.
pub fn ltt_of_map(map: &RoseMap) -> Result<LttStructure> {
    let rank = map.rank();
    let periodic = map.direction_map().periodic();
    let nonperiodic: Vec<Direction> = rank.directions().filter(|d| !periodic.contains(d)).collect();
    let [red] = nonperiodic[..] else {
        return Err(Error::WrongRegime(nonperiodic.len()));
    };
    let colored = map
        .turns_taken_closure()?
        .into_iter()
        .map(|turn| ColoredEdge { turn, color: if turn.contains(red) { EdgeColor::Red } else { EdgeColor::Purple } })
        .collect();
    Ok(LttStructure::from_parts(rank, red, colored))
}

/// A traversal of an edge of the structure's full graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedEdge {
    /// Index into the undirected edge list: black edges first, then colored.
    pub edge: usize,
    pub tail: Direction,
    pub head: Direction,
    pub black: bool,
}

/// Nodes are directed edges; an arc `e -> f` means `f` may follow `e` in a
/// path alternating black and colored edges.
#[derive(Clone, Debug)]
pub struct TransitionDigraph {
    pub undirected: Vec<Turn>,
    pub nodes: Vec<DirectedEdge>,
    pub graph: DiGraph<usize, ()>,
}

impl TransitionDigraph {
    pub fn new(s: &LttStructure) -> Self {
        let rank = s.rank();
        let mut undirected: Vec<Turn> =
            (0..rank.get()).map(|i| Turn::new(Direction::of_edge(i, true), Direction::of_edge(i, false))).collect();
        undirected.extend(s.colored_edges().iter().map(|e| e.turn));
        let mut nodes = Vec::with_capacity(2 * undirected.len());
        for (i, t) in undirected.iter().enumerate() {
            let black = i < rank.get();
            nodes.push(DirectedEdge { edge: i, tail: t.first(), head: t.second(), black });
            if !t.is_degenerate() {
                nodes.push(DirectedEdge { edge: i, tail: t.second(), head: t.first(), black });
            }
        }
        let mut graph = DiGraph::with_capacity(nodes.len(), 0);
        let idx: Vec<_> = (0..nodes.len()).map(|i| graph.add_node(i)).collect();
        let mut out_of: BTreeMap<Direction, Vec<usize>> = BTreeMap::new();
        for (j, f) in nodes.iter().enumerate() {
            out_of.entry(f.tail).or_default().push(j);
        }
        for (i, e) in nodes.iter().enumerate() {
            for &j in out_of.get(&e.head).map(Vec::as_slice).unwrap_or(&[]) {
                let f = nodes[j];
                let reverses = f.edge == e.edge && f.tail == e.head && f.head == e.tail;
                if e.black != f.black && !reverses {
                    graph.add_edge(idx[i], idx[j], ());
                }
            }
        }
        TransitionDigraph { undirected, nodes, graph }
    }

    /// A strongly connected component with at least one arc whose nodes
    /// cover every undirected edge, as sorted node indices.
    pub fn covering_component(&self) -> Option<Vec<usize>> {
        let all = self.undirected.len();
        tarjan_scc(&self.graph).into_iter().find_map(|comp| {
            let nontrivial = comp.len() > 1 || self.graph.contains_edge(comp[0], comp[0]);
            let covered: BTreeSet<usize> = comp.iter().map(|&n| self.nodes[self.graph[n]].edge).collect();
            (nontrivial && covered.len() == all).then(|| {
                let mut v: Vec<usize> = comp.iter().map(|&n| self.graph[n]).collect();
                v.sort_unstable();
                v
            })
        })
    }
}

/// Search for a closed path alternating black and colored edges, crossing
/// every edge and of length at most `bound`, by breadth-first search over
/// (current traversal, covered edge set). Independent of the component
/// computation in [`TransitionDigraph`]. Supports up to 32 edges.
pub fn brute_force_birecurrent(s: &LttStructure, bound: usize) -> bool {
    let rank = s.rank();
    // Traversals as (tail, head, black, edge index).
    let mut edges: Vec<(Direction, Direction, bool)> =
        (0..rank.get()).map(|i| (Direction::of_edge(i, true), Direction::of_edge(i, false), true)).collect();
    edges.extend(s.colored_edges().iter().map(|e| (e.turn.first(), e.turn.second(), false)));
    let m = edges.len();
    assert!(m <= 32, "brute force supports at most 32 edges");
    let mut trav = Vec::with_capacity(2 * m);
    for (i, &(x, y, black)) in edges.iter().enumerate() {
        trav.push((x, y, black, i));
        trav.push((y, x, black, i));
    }
    let follows = |a: usize, b: usize| {
        let (_, ah, ab, ai) = trav[a];
        let (bt, _, bb, bi) = trav[b];
        ah == bt && ab != bb && !(ai == bi)
    };
    let full: u64 = (1u64 << m) - 1;
    // Any covering closed path crosses black edge 0; rotate it to start there.
    for start in [0usize, 1] {
        let states = trav.len() << m;
        let mut seen = vec![0u64; states.div_ceil(64)];
        let key = |t: usize, mask: u64| (t << m) | mask as usize;
        let mut frontier = vec![(start, 1u64 << trav[start].3)];
        seen[key(start, 1 << trav[start].3) / 64] |= 1 << (key(start, 1 << trav[start].3) % 64);
        for _len in 1..=bound {
            let mut next = Vec::new();
            for &(t, mask) in &frontier {
                if mask == full && follows(t, start) {
                    return true;
                }
                for (u, &(_, _, _, edge)) in trav.iter().enumerate() {
                    if follows(t, u) {
                        let nm = mask | 1 << edge;
                        let k = key(u, nm);
                        if seen[k / 64] >> (k % 64) & 1 == 0 {
                            seen[k / 64] |= 1 << (k % 64);
                            next.push((u, nm));
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_maps::tests::example_map;
    use crate::rose::{dir, path};

    fn t(a: &str, b: &str) -> Turn {
        Turn::new(dir(a), dir(b))
    }

    fn r3() -> Rank {
        Rank::new(3).unwrap()
    }

    #[test]
    fn structure_of_example_map() {
        let s = ltt_of_map(&example_map()).unwrap();
        assert_eq!(s.red_vertex(), dir("b'"));
        assert_eq!(s.red_edge(), Some(t("a", "b'")));
        assert_eq!(s.red_attachment(), Some(dir("a")));
        assert!(s.is_valid(), "{:?}", s.validate());
        assert_eq!(s.purple_edges_at(dir("a'")), vec![t("a'", "b"), t("a'", "c"), t("a'", "c'")]);
        assert!(s.is_birecurrent());
        for img in example_map().images() {
            assert!(s.realizes_smoothly(img));
        }
        assert!(!s.realizes_smoothly(&path("bb")));
    }

    #[test]
    fn wrong_regime() {
        assert!(matches!(ltt_of_map(&RoseMap::identity(r3())), Err(Error::WrongRegime(0))));
    }

    #[test]
    fn validation_reports() {
        use LttViolation::*;
        let ok = LttStructure::from_purple(
            r3(),
            dir("b'"),
            [t("a'", "c'"), t("a", "b"), t("a'", "c"), t("a", "c")],
            dir("a"),
        );
        assert!(ok.is_valid(), "{:?}", ok.validate());
        assert!(LttStructure::new(r3(), dir("b'"), ok.colored_edges().to_vec()).is_ok());

        let bad = LttStructure::from_purple(r3(), dir("b'"), [t("a", "b'")], dir("b"));
        let v = bad.validate();
        assert!(v.contains(&PurpleAtRedVertex { turn: t("a", "b'") }));
        assert!(v.contains(&RedEdgeIsEdgePair { turn: t("b", "b'") }));
        assert!(v.contains(&VertexWithoutColoredEdge { direction: dir("c") }));

        let dup = LttStructure::from_parts(
            r3(),
            dir("a"),
            vec![
                ColoredEdge { turn: t("b", "c"), color: EdgeColor::Purple },
                ColoredEdge { turn: t("b", "c"), color: EdgeColor::Purple },
                ColoredEdge { turn: t("c", "c"), color: EdgeColor::Purple },
                ColoredEdge { turn: t("b", "c"), color: EdgeColor::Red },
            ],
        );
        let v = dup.validate();
        assert!(v.contains(&DuplicateEdge { turn: t("b", "c") }));
        assert!(v.contains(&ColoredLoop { turn: t("c", "c") }));
        assert!(v.contains(&RedEdgeMissesRedVertex { turn: t("b", "c") }));
        let none = LttStructure::from_parts(r3(), dir("a"), vec![]);
        assert!(none.validate().contains(&RedEdgeCount { count: 0 }));
    }

    #[test]
    fn json_round_trip() {
        let s = ltt_of_map(&example_map()).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains(r#""red_vertex":-2"#));
        assert!(json.contains(r#"{"u":1,"v":-2,"color":"red"}"#));
        assert_eq!(serde_json::from_str::<LttStructure>(&json).unwrap(), s);
    }

    #[test]
    fn dot_is_deterministic() {
        let s = ltt_of_map(&example_map()).unwrap();
        let dot = s.to_dot("g");
        assert_eq!(dot, s.clone().to_dot("g"));
        assert_eq!(dot.matches("color=purple];").count(), 5 + 5);
        assert_eq!(dot.matches("[color=red];").count(), 1);
    }

    #[test]
    fn birecurrency_matches_brute_force_on_small_cases() {
        // Dead end: a leaf purple vertex forces a backtrack.
        let dead = LttStructure::from_purple(
            r3(),
            dir("c'"),
            [t("a", "b"), t("a", "c"), t("a", "a'"), t("a", "b'")],
            dir("b"),
        );
        let ex = ltt_of_map(&example_map()).unwrap();
        for s in [dead, ex] {
            let bound = 2 * (2 * (s.rank().get() + s.colored_edges().len()));
            assert_eq!(s.is_birecurrent(), brute_force_birecurrent(&s, bound), "{}", s.label(BarStyle::Prime));
        }
    }
}
