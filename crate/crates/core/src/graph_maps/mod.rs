//! Tight self-maps of roses.
//!
//! A [`RoseMap`] stores the image word of every positively oriented petal;
//! images of reversed petals are derived by inversion. On top of it this
//! module computes direction maps, gates, the closure of taken turns and the
//! train track verdict. Whitehead graphs live in [`whitehead`], Stallings
//! fold decompositions in [`fold`].

pub mod fold;
pub mod whitehead;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rose::{BarStyle, Direction, EdgePath, Rank, Turn};

pub use fold::{
    stallings_fold_decomposition, validate_ideal_decomposition, DecompositionClause, EdgePermutation,
    FoldDecomposition, Generator, IdealDecompositionReport,
};
pub use whitehead::{index_list, WhiteheadGraph};

/// A tight graph self-map of an edge-indexed rose.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoseMap {
    rank: Rank,
    images: Vec<EdgePath>,
}

impl RoseMap {
    /// Builds a map from the images of `E_1, .., E_r`. Every image must be
    /// nonempty, tight and use only petals of the rose.
    pub fn new(rank: Rank, images: Vec<EdgePath>) -> Result<Self> {
        if images.len() != rank.get() {
            return Err(Error::RankMismatch(rank.get(), images.len()));
        }
        for (i, img) in images.iter().enumerate() {
            let edge = Direction::of_edge(i, true).to_string();
            if img.is_empty() {
                return Err(Error::BadImage { edge, why: "empty" });
            }
            if !img.is_tight() {
                return Err(Error::BadImage { edge, why: "not tight" });
            }
            if img.max_edge().is_some_and(|m| m >= rank.get()) {
                return Err(Error::BadImage { edge, why: "using a petal outside the rose" });
            }
        }
        Ok(RoseMap { rank, images })
    }

    pub fn identity(rank: Rank) -> Self {
        let images = (0..rank.get()).map(|i| EdgePath::single(Direction::of_edge(i, true))).collect();
        RoseMap { rank, images }
    }

    /// Parses text images, e.g. `["ab", "b"]`.
    pub fn from_words(rank: usize, words: &[&str]) -> Result<Self> {
        let rank = Rank::new(rank)?;
        let images = words.iter().map(|w| EdgePath::parse(w)).collect::<Result<Vec<_>>>()?;
        Self::new(rank, images)
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// Image of the oriented petal whose initial direction is `d`.
    pub fn image(&self, d: Direction) -> EdgePath {
        let img = &self.images[d.edge()];
        if d.is_forward() {
            img.clone()
        } else {
            img.inverse()
        }
    }

    pub fn images(&self) -> &[EdgePath] {
        &self.images
    }

    /// Sum of image lengths.
    pub fn total_length(&self) -> usize {
        self.images.iter().map(EdgePath::len).sum()
    }

    /// Image of a path, tightened. The flag reports cancellation.
    pub fn apply(&self, p: &EdgePath) -> (EdgePath, bool) {
        let mut raw = Vec::new();
        for &d in p.letters() {
            raw.extend(self.image(d).into_letters());
        }
        EdgePath::new(raw).tighten()
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &RoseMap, inner: &RoseMap) -> Result<RoseMap> {
        if outer.rank != inner.rank {
            return Err(Error::RankMismatch(outer.rank.get(), inner.rank.get()));
        }
        let images = inner.images.iter().map(|img| outer.apply(img).0).collect();
        RoseMap::new(outer.rank, images)
    }

    /// `self^k` for `k >= 1`; `k = 0` gives the identity.
    pub fn power(&self, k: usize) -> Result<RoseMap> {
        let mut acc = RoseMap::identity(self.rank);
        for _ in 0..k {
            acc = RoseMap::compose(self, &acc)?;
        }
        Ok(acc)
    }

    pub fn direction_map(&self) -> DirectionMap {
        DirectionMap(self.rank.directions().map(|d| self.image(d).first().expect("images are nonempty")).collect())
    }

    /// Periodic and fixed directions, in that order.
    pub fn periodic_and_fixed_directions(&self) -> (BTreeSet<Direction>, BTreeSet<Direction>) {
        let dg = self.direction_map();
        (dg.periodic(), dg.fixed())
    }

    pub fn gates(&self) -> Vec<BTreeSet<Direction>> {
        self.direction_map().gates()
    }

    /// Least set of turns containing the turns of every edge image and
    /// closed under the induced turn map. Fails with the offending turn if
    /// some iterate would cancel.
    pub fn turns_taken_closure(&self) -> Result<BTreeSet<Turn>> {
        let dg = self.direction_map();
        let mut taken: BTreeSet<Turn> = self.images.iter().flat_map(|img| img.turns()).collect();
        let mut work: Vec<Turn> = taken.iter().copied().collect();
        let cap = self.rank.num_directions() * (self.rank.num_directions() - 1) / 2 + 1;
        let mut rounds = 0;
        while !work.is_empty() {
            rounds += 1;
            debug_assert!(rounds <= cap + 1, "turn closure exceeded the turn count bound");
            let mut next = Vec::new();
            for t in work {
                let img = t.map(|d| dg.apply(d));
                if img.is_degenerate() {
                    return Err(Error::Cancellation(t));
                }
                if taken.insert(img) {
                    next.push(img);
                }
            }
            work = next;
        }
        Ok(taken)
    }

    pub fn train_track_verdict(&self) -> TrainTrackVerdict {
        match self.turns_taken_closure() {
            Err(Error::Cancellation(t)) => TrainTrackVerdict::NotTrainTrack { witness: t },
            Err(e) => unreachable!("closure only fails by cancellation: {e}"),
            Ok(taken) => {
                let gate = self.direction_map().gate_labels();
                match taken.iter().find(|t| gate[t.first().id() - 1] == gate[t.second().id() - 1]) {
                    Some(&t) => TrainTrackVerdict::NotTrainTrack { witness: t },
                    None => TrainTrackVerdict::TrainTrack,
                }
            }
        }
    }

    pub fn is_train_track(&self) -> bool {
        self.train_track_verdict() == TrainTrackVerdict::TrainTrack
    }

    pub fn label(&self, style: BarStyle) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, img)| format!("{} -> {}", Direction::of_edge(i, true).label(style), img.label(style)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for RoseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label(BarStyle::Prime))
    }
}

/// JSON form: `{ "rank": 3, "images": { "a": "ab", "b": [2, -1], ... } }`.
#[derive(Serialize, Deserialize)]
struct RoseMapRepr {
    rank: Rank,
    images: BTreeMap<String, EdgePath>,
}

impl Serialize for RoseMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(i, img)| (Direction::of_edge(i, true).to_string(), img.clone()))
            .collect();
        RoseMapRepr { rank: self.rank, images }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RoseMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = RoseMapRepr::deserialize(d)?;
        let mut images = vec![None; repr.rank.get()];
        for (key, img) in repr.images {
            let dir: Direction = key.parse().map_err(D::Error::custom)?;
            if !dir.is_forward() || dir.edge() >= repr.rank.get() {
                return Err(D::Error::custom(format!("image key {key:?} is not a petal of the rose")));
            }
            images[dir.edge()] = Some(img);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.ok_or_else(|| D::Error::custom(format!("missing image for {}", Direction::of_edge(i, true))))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        RoseMap::new(repr.rank, images).map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrainTrackVerdict {
    TrainTrack,
    NotTrainTrack { witness: Turn },
}

/// Total function on the directions of a rose.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirectionMap(Vec<Direction>);

impl DirectionMap {
    pub fn identity(rank: Rank) -> Self {
        DirectionMap(rank.directions().collect())
    }

    pub fn from_images(images: Vec<Direction>) -> Self {
        DirectionMap(images)
    }

    pub fn apply(&self, d: Direction) -> Direction {
        self.0[d.id() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[Direction] {
        &self.0
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &DirectionMap) -> DirectionMap {
        DirectionMap(inner.0.iter().map(|&d| self.apply(d)).collect())
    }

    pub fn power(&self, k: usize) -> DirectionMap {
        let mut acc = DirectionMap((1..=self.0.len()).map(|i| Direction::from_id(i).expect("valid id")).collect());
        for _ in 0..k {
            acc = self.after(&acc);
        }
        acc
    }

    fn domain(&self) -> impl Iterator<Item = Direction> + '_ {
        (1..=self.0.len()).map(|i| Direction::from_id(i).expect("valid id"))
    }

    pub fn fixed(&self) -> BTreeSet<Direction> {
        self.domain().filter(|&d| self.apply(d) == d).collect()
    }

    /// Directions on cycles of the functional graph.
    pub fn periodic(&self) -> BTreeSet<Direction> {
        let n = self.0.len();
        self.domain()
            .filter(|&d| {
                let mut x = d;
                (0..n).any(|_| {
                    x = self.apply(x);
                    x == d
                })
            })
            .collect()
    }

    /// For each direction, the image under `Dg^{2r}`; two directions share a
    /// gate iff these agree.
    fn gate_labels(&self) -> Vec<Direction> {
        self.power(self.0.len()).0
    }

    pub fn gates(&self) -> Vec<BTreeSet<Direction>> {
        let labels = self.gate_labels();
        let mut by_label: BTreeMap<Direction, BTreeSet<Direction>> = BTreeMap::new();
        for d in self.domain() {
            by_label.entry(labels[d.id() - 1]).or_default().insert(d);
        }
        let mut gates: Vec<_> = by_label.into_values().collect();
        gates.sort();
        gates
    }

    pub fn same_gate(&self, a: Direction, b: Direction) -> bool {
        let labels = self.gate_labels();
        labels[a.id() - 1] == labels[b.id() - 1]
    }
}
