//! Ideal Whitehead graph search for fully irreducible automorphisms of free groups.
//!
//! Bottom-up layout: [`rose`] words on a rose, [`graph_maps`] train track
//! maps and fold decompositions, [`ltt`] lamination train track structures,
//! [`moves`] extensions and switches, [`id_diagram`] the admissible map
//! diagram with its sweep over candidate graphs.

pub mod epp;
pub mod error;
pub mod exec;
pub mod graph;
pub mod graph_maps;
pub mod id_diagram;
pub mod ltt;
pub mod moves;
pub mod rose;

pub use error::{Error, Result};
pub use exec::Exec;
