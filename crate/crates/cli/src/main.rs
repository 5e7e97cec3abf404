//! `iwg`: analyze train track maps on roses and test candidate ideal
//! Whitehead graphs.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use iwg_core::Exec;

#[derive(Parser)]
#[command(name = "iwg", version, about = "Ideal Whitehead graph and ID diagram tools")]
struct Cli {
    /// Schedule per-item work sequentially or on the thread pool.
    #[arg(long, global = true, value_enum, default_value_t = ExecArg::Parallel)]
    exec: ExecArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecArg {
    Sequential,
    Parallel,
}

impl From<ExecArg> for Exec {
    fn from(e: ExecArg) -> Exec {
        match e {
            ExecArg::Sequential => Exec::Sequential,
            ExecArg::Parallel => Exec::Parallel,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Artifact {
    /// Every structure on a labeled copy of the target.
    Structures,
    /// Birecurrent structures and all moves between them.
    Diagram,
    /// Strongly connected components of the diagram.
    IdDiagram,
}

#[derive(Subcommand)]
enum Command {
    /// Report train track data, Whitehead graphs, the ltt structure and a
    /// fold decomposition for a map given as JSON (`-` for stdin).
    AnalyzeMap {
        map: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the birecurrency and irreducibility potential tests on a target
    /// graph: `star`, `path`, `cycle`, `complete`, `catalog:<id>` or a JSON file.
    CheckGraph {
        graph: String,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        /// Verify loops of at most this many moves in passing components; 0 skips.
        #[arg(long, default_value_t = 4)]
        max_loop_len: usize,
        /// Selects the base nodes for loop verification.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the diagram artifact.
        #[arg(long, env = "IWG_CACHE_DIR")]
        out: Option<PathBuf>,
        /// Artifact format.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Test every connected graph on `2r - 1` vertices.
    Sweep {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        /// At rank 5 and above run the whole catalog, not only the star.
        #[arg(long)]
        full: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write `sweep-r<rank>.json` into this directory.
        #[arg(long, env = "IWG_CACHE_DIR")]
        out: Option<PathBuf>,
    },
    /// Emit structures, a diagram or an ID diagram as DOT or JSON.
    Export {
        #[arg(value_enum)]
        what: Artifact,
        /// Target graph, as for `check-graph`.
        #[arg(required_unless_present = "from")]
        graph: Option<String>,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        /// Read a diagram exported as JSON instead of recomputing it.
        #[arg(long, conflicts_with = "graph")]
        from: Option<String>,
        /// Keep only birecurrent structures.
        #[arg(long)]
        admissible_only: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = cli.exec.into();
    let result = match cli.command {
        Command::AnalyzeMap { map, format } => commands::analyze_map(&map, format),
        Command::CheckGraph { graph, rank, max_loop_len, seed, out, format } => {
            commands::check_graph(&graph, rank, max_loop_len, seed, out.as_deref(), format, exec)
        }
        Command::Sweep { rank, full, format, out } => commands::sweep(rank, full, format, out.as_deref(), exec),
        Command::Export { what, graph, rank, from, admissible_only, format, output } => commands::export(
            what,
            graph.as_deref(),
            rank,
            from.as_deref(),
            admissible_only,
            format,
            output.as_deref(),
            exec,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<input::InvalidGraph>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
