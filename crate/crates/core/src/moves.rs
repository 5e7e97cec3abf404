//! Generating triples and the two moves producing them.
//!
//! A triple `(g, source, dest)` records a generator `g` carrying the rose
//! with structure `source` onto the rose with structure `dest`. Given `dest`
//! and a purple edge at the folded direction, an extension moves only the red
//! edge; a switch also swaps the roles of the moved and folded directions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_maps::Generator;
use crate::ltt::{EdgeColor, LttStructure};
use crate::rose::{Direction, Turn};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratingTriple {
    pub gen: Generator,
    pub source: LttStructure,
    pub dest: LttStructure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Extension,
    Switch,
}

/// The generator a triple into `dest` must use: it moves the red vertex and
/// folds it with the bar of the red edge's purple endpoint.
pub fn entering_generator(dest: &LttStructure) -> Result<Generator> {
    let attach =
        dest.red_attachment().ok_or_else(|| Error::InvalidStructure("no red edge at the red vertex".into()))?;
    Generator::new(dest.red_vertex(), attach.bar())
}

/// Purple edges at the folded direction, in sorted order.
pub fn determining_edges(dest: &LttStructure) -> Vec<Turn> {
    match dest.red_attachment() {
        Some(attach) => dest.purple_edges_at(attach.bar()),
        None => Vec::new(),
    }
}

fn check_determining(dest: &LttStructure, det: Turn) -> Result<(Generator, Direction)> {
    let gen = entering_generator(dest)?;
    if dest.color_of(det) != Some(EdgeColor::Purple) {
        return Err(Error::InvalidMove(format!("{det} is not a purple edge")));
    }
    let l = det
        .other(gen.a)
        .ok_or_else(|| Error::InvalidMove(format!("{det} does not contain the folded direction {}", gen.a)))?;
    Ok((gen, l))
}

/// Source keeps every purple edge; the red edge becomes `{u, l}`.
pub fn extension(dest: &LttStructure, det: Turn) -> Result<GeneratingTriple> {
    let (gen, l) = check_determining(dest, det)?;
    if l == gen.u.bar() {
        return Err(Error::InvalidMove(format!("extension along {det} would join the red vertex to its own pair")));
    }
    let source = dest.with_red_attachment(l);
    Ok(GeneratingTriple { gen, source, dest: dest.clone() })
}

/// Purple edges at `a` move to `u`; `a` becomes the red vertex with red edge `{a, l}`.
pub fn switch(dest: &LttStructure, det: Turn) -> Result<GeneratingTriple> {
    let (gen, l) = check_determining(dest, det)?;
    if l == gen.a.bar() {
        return Err(Error::InvalidMove(format!("switch along {det} would join the red vertex to its own pair")));
    }
    let (u, a) = (gen.u, gen.a);
    let swap = |d: Direction| if d == a { u } else { d };
    let purple: Vec<Turn> = dest.purple_edges().map(|t| t.map(swap)).collect();
    let source = LttStructure::from_purple(dest.rank(), a, purple, l);
    Ok(GeneratingTriple { gen, source, dest: dest.clone() })
}

pub fn apply_move(kind: MoveKind, dest: &LttStructure, det: Turn) -> Result<GeneratingTriple> {
    match kind {
        MoveKind::Extension => extension(dest, det),
        MoveKind::Switch => switch(dest, det),
    }
}

/// Vertex and colored edge maps induced by the generator's direction map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedMap {
    pub vertices: BTreeMap<Direction, Direction>,
    pub edges: BTreeMap<Turn, Turn>,
}

fn direction_map(gen: Generator) -> impl Fn(Direction) -> Direction {
    move |d| if d == gen.u { gen.a } else { d }
}

pub fn induced_colored_map(t: &GeneratingTriple) -> Result<InducedMap> {
    let dg = direction_map(t.gen);
    let vertices = t.source.rank().directions().map(|d| (d, dg(d))).collect();
    let mut edges = BTreeMap::new();
    for e in t.source.colored_edges() {
        let img = e.turn.map(&dg);
        if img.is_degenerate() || t.dest.color_of(img).is_none() {
            return Err(Error::MissingImageEdge(e.turn));
        }
        edges.insert(e.turn, img);
    }
    if !purple_isomorphism(t) {
        return Err(Error::InvalidMove("purple subgraphs are not carried isomorphically".into()));
    }
    Ok(InducedMap { vertices, edges })
}

/// The direction map restricts to a bijection of purple vertices carrying
/// purple edges bijectively onto purple edges.
fn purple_isomorphism(t: &GeneratingTriple) -> bool {
    let dg = direction_map(t.gen);
    let src_v = t.source.purple_vertices();
    let img_v: BTreeSet<Direction> = src_v.iter().map(|&d| dg(d)).collect();
    if img_v.len() != src_v.len() || img_v != t.dest.purple_vertices() {
        return false;
    }
    let src_e: Vec<Turn> = t.source.purple_edges().collect();
    let img_e: BTreeSet<Turn> = src_e.iter().map(|e| e.map(&dg)).collect();
    let dest_e: BTreeSet<Turn> = t.dest.purple_edges().collect();
    img_e.len() == src_e.len() && img_e == dest_e
}

/// Which of the seven triple-level admissibility conditions hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AmReport {
    /// Both structures birecurrent.
    pub i: bool,
    /// The source red vertex lies in the generator's illegal turn.
    pub ii: bool,
    /// Red vertex and red edge present in both; the dest red edge is `{u, bar(a)}`.
    pub iii: bool,
    /// Every colored source edge maps to a purple dest edge.
    pub iv: bool,
    /// In each structure the red edge is the only colored edge at the red vertex.
    pub v: bool,
    /// Generator shape, matched to the dest red vertex and red edge.
    pub vi: bool,
    /// Purple subgraphs correspond isomorphically under the direction map.
    pub vii: bool,
}

impl AmReport {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii && self.iv && self.v && self.vi && self.vii
    }
}

pub fn check_am(t: &GeneratingTriple) -> AmReport {
    let (u, a) = (t.gen.u, t.gen.a);
    let dg = direction_map(t.gen);
    let structures = [&t.source, &t.dest];
    let red_ok = |s: &LttStructure| {
        s.red_edge().is_some_and(|e| e.contains(s.red_vertex()))
            && !s.purple_edges().any(|e| e.contains(s.red_vertex()))
    };
    let only_red_at_red = |s: &LttStructure| {
        let at: Vec<_> = s.colored_edges().iter().filter(|e| e.turn.contains(s.red_vertex())).collect();
        at.len() == 1 && at[0].color == EdgeColor::Red
    };
    let vi = a.edge() != u.edge() && t.dest.red_vertex() == u && t.dest.red_attachment() == Some(a.bar());
    AmReport {
        i: structures.iter().all(|s| s.is_birecurrent()),
        ii: t.source.red_vertex() == u || t.source.red_vertex() == a,
        iii: structures.iter().all(|s| red_ok(s)) && t.dest.red_edge() == Some(Turn::new(u, a.bar())),
        iv: t.source.colored_edges().iter().all(|e| {
            let img = e.turn.map(&dg);
            !img.is_degenerate() && t.dest.color_of(img) == Some(EdgeColor::Purple)
        }),
        v: structures.iter().all(|s| only_red_at_red(s)),
        vi,
        vii: purple_isomorphism(t),
    }
}

/// Both structures birecurrent and the triple produced by an extension or
/// switch along some determining edge of its destination.
pub fn is_admissible(t: &GeneratingTriple) -> bool {
    if !t.source.is_birecurrent() || !t.dest.is_birecurrent() {
        return false;
    }
    classify(t).is_some()
}

/// The move and determining edge producing `t`, if any.
pub fn classify(t: &GeneratingTriple) -> Option<(MoveKind, Turn)> {
    determining_edges(&t.dest).into_iter().find_map(|det| {
        [MoveKind::Extension, MoveKind::Switch]
            .into_iter()
            .find(|&k| apply_move(k, &t.dest, det).is_ok_and(|m| &m == t))
            .map(|k| (k, det))
    })
}

impl GeneratingTriple {
    /// Graphviz rendering with the two structures side by side.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph triple {\n  node [shape=circle];\n");
        for name in ["source", "dest"] {
            let g = if name == "source" { &self.source } else { &self.dest };
            let _ = writeln!(s, "  subgraph cluster_{name} {{\n    label=\"{name}\";");
            for line in g.dot_statements(&format!("{name}:")) {
                let _ = writeln!(s, "    {line}");
            }
            s.push_str("  }\n");
        }
        let _ = writeln!(s, "  label=\"{}\";\n}}", self.gen);
        s
    }
}
