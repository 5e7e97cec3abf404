//! Reading maps, target graphs and diagrams from the command line.

use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};

use iwg_core::graph::SimpleGraph;
use iwg_core::graph_maps::RoseMap;
use iwg_core::id_diagram::{catalog, Diagram, TargetGraph};
use iwg_core::rose::Rank;

/// A target graph that could not be built; reported with exit status 2.
#[derive(Debug)]
pub struct InvalidGraph(pub String);

impl std::fmt::Display for InvalidGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid target graph: {}", self.0)
    }
}

impl std::error::Error for InvalidGraph {}

/// Contents of `path`, or standard input for `-`.
pub fn read_source(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

pub fn read_map(path: &str) -> Result<RoseMap> {
    let text = read_source(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing map JSON from {path}"))
}

pub fn read_diagram(path: &str) -> Result<Diagram> {
    let text = read_source(path)?;
    let d: Diagram = serde_json::from_str(&text).with_context(|| format!("parsing diagram JSON from {path}"))?;
    d.check().with_context(|| format!("checking diagram from {path}"))?;
    Ok(d)
}

/// A named target: `star`, `path`, `cycle`, `complete`, `catalog:<id>` or a
/// JSON file `{"vertices": n, "edges": [[i, j], ...]}`.
pub struct NamedTarget {
    pub name: String,
    pub target: TargetGraph,
}

pub fn read_target(spec: &str, rank: Rank) -> Result<NamedTarget> {
    let n = 2 * rank.get() - 1;
    let (name, graph) = match spec {
        "star" => (spec.to_string(), SimpleGraph::star(n)),
        "path" => (spec.to_string(), SimpleGraph::path(n)),
        "cycle" => (spec.to_string(), SimpleGraph::cycle(n)),
        "complete" => (spec.to_string(), SimpleGraph::complete(n)),
        _ => {
            if let Some(id) = spec.strip_prefix("catalog:") {
                let Some((_, g)) = catalog(rank).into_iter().find(|(cid, _)| cid == id) else {
                    return Err(InvalidGraph(format!("no catalog entry {id} at rank {rank}")).into());
                };
                (format!("catalog-{id}"), g)
            } else {
                let text = read_source(spec)?;
                let g: SimpleGraph = serde_json::from_str(&text).map_err(|e| InvalidGraph(format!("{spec}: {e}")))?;
                let stem = Path::new(spec).file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
                (stem.to_string(), g)
            }
        }
    };
    let target = TargetGraph::new(graph, rank).map_err(|e| InvalidGraph(format!("{spec}: {e}")))?;
    Ok(NamedTarget { name, target })
}

pub fn rank(r: usize) -> Result<Rank> {
    if r < 2 {
        bail!("rank must be at least 2, got {r}");
    }
    Ok(Rank::new(r)?)
}
