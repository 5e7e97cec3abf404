use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use iwg_core::graph_maps::{
    index_list, stallings_fold_decomposition, validate_ideal_decomposition, DecompositionClause, FoldDecomposition,
    RoseMap, TrainTrackVerdict, WhiteheadGraph,
};
use iwg_core::id_diagram::{
    analyze, catalog, enumerate_structures, id_diagram, sweep_summaries, IdDiagram, TargetGraph, Verdict,
};
use iwg_core::ltt::{ltt_of_map, LttStructure};
use iwg_core::rose::{BarStyle, Direction, Turn};
use iwg_core::Exec;

use crate::input::{rank as parse_rank, read_diagram, read_map, read_target};
use crate::{Artifact, Format};

const STYLE: BarStyle = BarStyle::Prime;

fn label_dirs<'a>(ds: impl IntoIterator<Item = &'a Direction>) -> Vec<String> {
    ds.into_iter().map(|d| d.label(STYLE)).collect()
}

fn label_turns<'a>(ts: impl IntoIterator<Item = &'a Turn>) -> Vec<String> {
    ts.into_iter().map(|t| t.label(STYLE)).collect()
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Serialize)]
struct MapReport {
    map: RoseMap,
    train_track: bool,
    /// An illegal turn taken by some iterate, when the map is not train track.
    illegal_turn_taken: Option<String>,
    direction_map: BTreeMap<String, String>,
    fixed: Vec<String>,
    periodic: Vec<String>,
    gates: Vec<Vec<String>>,
    local_whitehead: std::result::Result<Vec<String>, String>,
    stable_whitehead: std::result::Result<Vec<String>, String>,
    index_list: std::result::Result<Vec<String>, String>,
    ltt: std::result::Result<LttStructure, String>,
    birecurrent: Option<bool>,
    decomposition: std::result::Result<FoldDecomposition, String>,
    ideal_violations: Option<Vec<DecompositionClause>>,
}

fn map_report(m: &RoseMap) -> MapReport {
    let dg = m.direction_map();
    let (periodic, fixed) = m.periodic_and_fixed_directions();
    let verdict = m.train_track_verdict();
    let lw = WhiteheadGraph::local(m).map_err(|e| e.to_string());
    let sw = WhiteheadGraph::stable(m).map_err(|e| e.to_string());
    let ltt = ltt_of_map(m).map_err(|e| e.to_string());
    let decomposition = stallings_fold_decomposition(m).map_err(|e| e.to_string());
    MapReport {
        map: m.clone(),
        train_track: verdict == TrainTrackVerdict::TrainTrack,
        illegal_turn_taken: match verdict {
            TrainTrackVerdict::TrainTrack => None,
            TrainTrackVerdict::NotTrainTrack { witness } => Some(witness.label(STYLE)),
        },
        direction_map: m.rank().directions().map(|d| (d.label(STYLE), dg.apply(d).label(STYLE))).collect(),
        fixed: label_dirs(&fixed),
        periodic: label_dirs(&periodic),
        gates: m.gates().iter().map(label_dirs).collect(),
        local_whitehead: lw.as_ref().map(|g| label_turns(&g.edges)).map_err(Clone::clone),
        stable_whitehead: sw.as_ref().map(|g| label_turns(&g.edges)).map_err(Clone::clone),
        index_list: sw.as_ref().map(|g| index_list(g).iter().map(ToString::to_string).collect()).map_err(Clone::clone),
        birecurrent: ltt.as_ref().ok().map(LttStructure::is_birecurrent),
        ltt,
        ideal_violations: decomposition.as_ref().ok().map(|d| validate_ideal_decomposition(d).violations),
        decomposition,
    }
}

fn render_map_report(r: &MapReport) -> String {
    let mut s = String::new();
    let either = |x: &std::result::Result<Vec<String>, String>| match x {
        Ok(v) => braces(v),
        Err(e) => format!("unavailable: {e}"),
    };
    let _ = writeln!(s, "map: {}", r.map.label(STYLE));
    match &r.illegal_turn_taken {
        None => s.push_str("train track: yes\n"),
        Some(t) => {
            let _ = writeln!(s, "train track: no, illegal turn {t} is taken");
        }
    }
    let dm: Vec<String> = r.direction_map.iter().map(|(k, v)| format!("{k} -> {v}")).collect();
    let _ = writeln!(s, "direction map: {}", dm.join(", "));
    let _ = writeln!(s, "fixed directions: {}", braces(&r.fixed));
    let _ = writeln!(s, "periodic directions: {}", braces(&r.periodic));
    let gates: Vec<String> = r.gates.iter().map(|g| braces(g)).collect();
    let _ = writeln!(s, "gates: {}", gates.join(" "));
    let _ = writeln!(s, "local Whitehead graph: {}", either(&r.local_whitehead));
    let _ = writeln!(s, "stable Whitehead graph: {}", either(&r.stable_whitehead));
    let _ = writeln!(s, "index list: {}", either(&r.index_list));
    match &r.ltt {
        Ok(l) => {
            let _ = writeln!(s, "ltt structure: {}", l.label(STYLE));
            let _ = writeln!(s, "birecurrent: {}", if r.birecurrent == Some(true) { "yes" } else { "no" });
        }
        Err(e) => {
            let _ = writeln!(s, "ltt structure: unavailable: {e}");
        }
    }
    match &r.decomposition {
        Ok(d) => {
            let gens: Vec<String> = d.generators.iter().map(ToString::to_string).collect();
            let perm = label_dirs(&d.permutation.0);
            let _ = writeln!(s, "fold decomposition: {} generators: {}", gens.len(), gens.join(", "));
            let _ = writeln!(s, "edge permutation: {}", perm.join(" "));
            match r.ideal_violations.as_deref() {
                Some([]) => s.push_str("ideal decomposition: yes\n"),
                Some(v) => {
                    let _ = writeln!(s, "ideal decomposition: no, {v:?}");
                }
                None => {}
            }
        }
        Err(e) => {
            let _ = writeln!(s, "fold decomposition: failed: {e}");
        }
    }
    s
}

pub fn analyze_map(path: &str, format: Format) -> Result<()> {
    let m = read_map(path)?;
    let report = map_report(&m);
    match format {
        Format::Text => print!("{}", render_map_report(&report)),
        Format::Json => print!("{}", json(&report)?),
        Format::Dot => match &report.ltt {
            Ok(l) => print!("{}", l.to_dot("ltt")),
            Err(e) => bail!("no ltt structure to render: {e}"),
        },
    }
    Ok(())
}

fn verdict_name(v: Verdict) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn render_id(id: &IdDiagram, name: &str, format: Format) -> Result<String> {
    match format {
        Format::Json => json(id),
        Format::Dot => Ok(id.to_dot(name)),
        Format::Text => bail!("artifacts are written as json or dot"),
    }
}

pub fn check_graph(
    spec: &str,
    rank: usize,
    max_loop_len: usize,
    seed: u64,
    out: Option<&Path>,
    format: Format,
    exec: Exec,
) -> Result<()> {
    let rank = parse_rank(rank)?;
    let named = read_target(spec, rank)?;
    let a = analyze(&named.target, exec);
    let id = &a.id;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "graph {}: {} vertices, edges {:?}",
        named.name,
        named.target.graph().num_vertices(),
        named.target.graph().edges()
    );
    let _ = writeln!(
        s,
        "rank {rank}: {} structures, {} birecurrent, {} moves, {} components, {} classes up to edge-pair relabeling",
        a.structures,
        a.admissible,
        a.preliminary_edges,
        id.components.len(),
        id.epp_classes().len()
    );
    for (i, c) in id.components.iter().enumerate() {
        let pairs: BTreeSet<usize> = c.red_census.iter().map(|d| d.edge()).collect();
        let _ = writeln!(
            s,
            "component {i}: {} nodes, {} edges, red census {}, {} of {rank} edge pairs{}",
            c.nodes.len(),
            c.edges.len(),
            braces(&label_dirs(&c.red_census)),
            pairs.len(),
            if a.component_passes[i] { ", passes" } else { "" }
        );
    }
    if max_loop_len > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for class in id.epp_classes() {
            let i = class[0];
            if !a.component_passes[i] {
                continue;
            }
            let c = &id.components[i];
            let base = c.nodes[rng.random_range(0..c.nodes.len())];
            let loops = id.find_loops(base, max_loop_len, 8);
            let (mut tt, mut contained, mut matches, mut ideal) = (0, 0, 0, 0);
            for l in &loops {
                let r = id.verify_loop(l)?;
                tt += r.train_track as usize;
                contained += r.structure_contained as usize;
                matches += r.structure_matches as usize;
                ideal += r.ideal.is_ideal() as usize;
            }
            let _ = writeln!(
                s,
                "loops in component {i} from node {base}: {} found, {tt} train track, {contained} inside the base structure, {matches} equal to it, {ideal} ideal",
                loops.len()
            );
        }
    }
    let _ = writeln!(s, "verdict: {}", verdict_name(a.verdict));
    print!("{s}");
    if let Some(dir) = out {
        let ext = if format == Format::Dot { "dot" } else { "json" };
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}-r{rank}.id.{ext}", named.name));
        fs::write(&path, render_id(id, &named.name, format)?).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub fn sweep(rank: usize, full: bool, format: Format, out: Option<&Path>, exec: Exec) -> Result<()> {
    let rank = parse_rank(rank)?;
    let graphs = if rank.get() >= 5 && !full {
        vec![("star".to_string(), TargetGraph::star(rank).graph().clone())]
    } else {
        catalog(rank)
    };
    let lines = sweep_summaries(rank, &graphs, exec)?;
    let rendered = match format {
        Format::Json => json(&lines)?,
        Format::Text => {
            let mut s = format!(
                "{:<6} {:>5} {:>10} {:>10} {:>7} {:>10} {:>7}  verdict\n",
                "id", "edges", "structures", "admissible", "moves", "components", "passing"
            );
            for l in &lines {
                let _ = writeln!(
                    s,
                    "{:<6} {:>5} {:>10} {:>10} {:>7} {:>10} {:>7}  {}",
                    l.id,
                    l.edges.len(),
                    l.structures,
                    l.admissible,
                    l.preliminary_edges,
                    l.components,
                    l.passing,
                    verdict_name(l.verdict)
                );
            }
            let count = |v| lines.iter().filter(|l| l.verdict == v).count();
            let _ = writeln!(
                s,
                "{} graphs: {} unachieved by birecurrency, {} unachieved by irreducibility potential, {} inconclusive",
                lines.len(),
                count(Verdict::UnachievedByBirecurrency),
                count(Verdict::UnachievedByIrreducibilityPotential),
                count(Verdict::Inconclusive)
            );
            s
        }
        Format::Dot => bail!("sweep output is text or json"),
    };
    print!("{rendered}");
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("sweep-r{rank}.json"));
        fs::write(&path, json(&lines)?).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn export(
    what: Artifact,
    graph: Option<&str>,
    rank: usize,
    from: Option<&str>,
    admissible_only: bool,
    format: Format,
    output: Option<&Path>,
    exec: Exec,
) -> Result<()> {
    if format == Format::Text {
        bail!("export writes json or dot");
    }
    let (name, diagram, structures) = match (from, graph) {
        (Some(path), _) => {
            let d = read_diagram(path)?;
            let name = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("diagram").to_string();
            let structures = d.nodes.clone();
            (name, Some(d), structures)
        }
        (None, Some(spec)) => {
            let named = read_target(spec, parse_rank(rank)?)?;
            match what {
                Artifact::Structures => {
                    let s = enumerate_structures(&named.target, admissible_only, exec);
                    (named.name, None, s)
                }
                _ => (named.name, Some(analyze(&named.target, exec).id.diagram), Vec::new()),
            }
        }
        (None, None) => bail!("give a target graph or --from"),
    };
    let text = match (what, format) {
        (Artifact::Structures, Format::Json) => json(&structures)?,
        (Artifact::Structures, _) => {
            structures.iter().enumerate().map(|(i, s)| s.to_dot(&format!("{name}-{i}"))).collect()
        }
        (Artifact::Diagram, Format::Json) => json(&diagram.expect("diagram computed"))?,
        (Artifact::Diagram, _) => diagram.expect("diagram computed").to_dot(&name),
        (Artifact::IdDiagram, _) => render_id(&id_diagram(diagram.expect("diagram computed")), &name, format)?,
    };
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
