use thiserror::Error;

use crate::rose::Turn;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank {0} is out of range (1..=26)")]
    InvalidRank(usize),
    #[error("direction {id} is out of range for rank {rank}")]
    DirectionOutOfRange { id: i64, rank: usize },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("image of {edge} is {why}")]
    BadImage { edge: String, why: &'static str },
    #[error("iterated images cancel at turn {0}")]
    Cancellation(Turn),
    #[error("not a train track: illegal turn {0} is taken")]
    NotTrainTrack(Turn),
    #[error("map has {0} nonperiodic directions; exactly one is required")]
    WrongRegime(usize),
    #[error("fold {step} is not a proper full fold of roses: {description}")]
    NotProperFullFolds { step: usize, description: String },
    #[error("invalid target graph: {0}")]
    InvalidTarget(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("colored edge {0} has no image edge in the destination structure")]
    MissingImageEdge(Turn),
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
}
