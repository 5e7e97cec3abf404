//! Elementary rose automorphisms and Stallings fold decompositions.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RoseMap;
use crate::error::{Error, Result};
use crate::rose::{Direction, EdgePath, Rank, Turn};

/// The automorphism sending the oriented edge `u` to `a u` and fixing every
/// other petal. Its direction map moves only `u`, to `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Generator {
    pub a: Direction,
    pub u: Direction,
}

impl Generator {
    pub fn new(u: Direction, a: Direction) -> Result<Self> {
        if a.edge() == u.edge() {
            return Err(Error::InvalidMove(format!("generator needs distinct petals, got u = {u}, a = {a}")));
        }
        Ok(Generator { a, u })
    }

    pub fn as_map(self, rank: Rank) -> RoseMap {
        let mut images: Vec<EdgePath> =
            (0..rank.get()).map(|i| EdgePath::single(Direction::of_edge(i, true))).collect();
        let u = self.u;
        images[u.edge()] =
            if u.is_forward() { EdgePath::new(vec![self.a, u]) } else { EdgePath::new(vec![u.bar(), self.a.bar()]) };
        RoseMap::new(rank, images).expect("generator images are tight")
    }

    /// Direction whose image is moved, also the red vertex of the target structure.
    pub fn dest_u(self) -> Direction {
        self.u
    }

    /// The unique non-singleton gate `{u, a}`.
    pub fn gate(self) -> Turn {
        Turn::new(self.u, self.a)
    }

    pub fn check_rank(self, rank: Rank) -> Result<()> {
        rank.check(self.a)?;
        rank.check(self.u)?;
        Ok(())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}{}", self.u, self.a, self.u)
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            a: Direction,
            u: Direction,
        }
        let r = Repr::deserialize(d)?;
        Generator::new(r.u, r.a).map_err(serde::de::Error::custom)
    }
}

/// Signed permutation of petals: `E_i` maps to the single letter `self[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgePermutation(pub Vec<Direction>);

impl EdgePermutation {
    pub fn identity(rank: Rank) -> Self {
        EdgePermutation((0..rank.get()).map(|i| Direction::of_edge(i, true)).collect())
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().enumerate().all(|(i, d)| *d == Direction::of_edge(i, true))
    }

    pub fn as_map(&self, rank: Rank) -> Result<RoseMap> {
        let edges: BTreeSet<usize> = self.0.iter().map(|d| d.edge()).collect();
        if edges.len() != self.0.len() {
            return Err(Error::InvalidMove("permutation repeats a petal".into()));
        }
        RoseMap::new(rank, self.0.iter().map(|&d| EdgePath::single(d)).collect())
    }
}

/// `permutation ∘ g_n ∘ ... ∘ g_1` with `generators = [g_1, .., g_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldDecomposition {
    pub rank: Rank,
    #[serde(with = "pairs")]
    pub generators: Vec<Generator>,
    pub permutation: EdgePermutation,
}

/// Generators written as `[a, u]` pairs.
mod pairs {
    use super::Generator;
    use crate::rose::Direction;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(g: &[Generator], s: S) -> Result<S::Ok, S::Error> {
        g.iter().map(|g| (g.a, g.u)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Generator>, D::Error> {
        Vec::<(Direction, Direction)>::deserialize(d)?
            .into_iter()
            .map(|(a, u)| Generator::new(u, a).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl FoldDecomposition {
    /// Composite of the generators alone.
    pub fn generator_composite(&self) -> Result<RoseMap> {
        let mut acc = RoseMap::identity(self.rank);
        for g in &self.generators {
            g.check_rank(self.rank)?;
            acc = RoseMap::compose(&g.as_map(self.rank), &acc)?;
        }
        Ok(acc)
    }

    pub fn compose(&self) -> Result<RoseMap> {
        let acc = self.generator_composite()?;
        RoseMap::compose(&self.permutation.as_map(self.rank)?, &acc)
    }
}

fn common_prefix(x: &EdgePath, y: &EdgePath) -> usize {
    x.letters().iter().zip(y.letters()).take_while(|(p, q)| p == q).count()
}

enum FoldKind {
    /// `full` is folded completely into an initial segment of `other`.
    ProperFull {
        full: Direction,
        other: Direction,
        prefix: usize,
    },
    Other(String),
}

fn classify(h: &RoseMap, t: Turn) -> FoldKind {
    let (d1, d2) = (t.first(), t.second());
    let (x, y) = (h.image(d1), h.image(d2));
    let p = common_prefix(&x, &y);
    if t.is_edge_pair() {
        return FoldKind::Other(format!("turn {t} would fold petal {d1} with its own inverse"));
    }
    match (x.len() == p, y.len() == p) {
        (true, true) => FoldKind::Other(format!("turn {t}: both images equal {x}, an improper full fold")),
        (true, false) => FoldKind::ProperFull { full: d1, other: d2, prefix: p },
        (false, true) => FoldKind::ProperFull { full: d2, other: d1, prefix: p },
        (false, false) => {
            FoldKind::Other(format!("turn {t}: images {x} and {y} share only {p} letters, a partial fold"))
        }
    }
}

/// Factors `m` into generators followed by a petal permutation by repeatedly
/// folding an illegal turn. Among illegal turns the least one that admits a
/// proper full fold is chosen; if none does, the least one is reported.
pub fn stallings_fold_decomposition(m: &RoseMap) -> Result<FoldDecomposition> {
    let rank = m.rank();
    let mut h = m.clone();
    let mut generators = Vec::new();
    loop {
        let step = generators.len() + 1;
        let dh = h.direction_map();
        let illegal: Vec<Turn> =
            rank.all_turns().into_iter().filter(|t| dh.apply(t.first()) == dh.apply(t.second())).collect();
        if illegal.is_empty() {
            break;
        }
        let mut chosen = None;
        let mut first_reason = None;
        for &t in &illegal {
            match classify(&h, t) {
                FoldKind::ProperFull { full, other, prefix } => {
                    chosen = Some((full, other, prefix));
                    break;
                }
                FoldKind::Other(why) => {
                    first_reason.get_or_insert(why);
                }
            }
        }
        let Some((full, other, prefix)) = chosen else {
            return Err(Error::NotProperFullFolds { step, description: first_reason.expect("an illegal turn") });
        };
        let g = Generator::new(other, full).expect("folded directions lie on distinct petals");
        let rest = EdgePath::new(h.image(other).letters()[prefix..].to_vec());
        let mut images = h.images().to_vec();
        images[other.edge()] = if other.is_forward() { rest } else { rest.inverse() };
        h = RoseMap::new(rank, images).expect("suffix of a tight nonempty word");
        generators.push(g);
    }
    let mut perm = Vec::with_capacity(rank.get());
    for (i, img) in h.images().iter().enumerate() {
        if img.len() != 1 {
            return Err(Error::NotProperFullFolds {
                step: generators.len() + 1,
                description: format!(
                    "no illegal turn remains but petal {} still maps to {img}; the map is not a homotopy equivalence",
                    Direction::of_edge(i, true)
                ),
            });
        }
        perm.push(img.first().expect("length one"));
    }
    Ok(FoldDecomposition { rank, generators, permutation: EdgePermutation(perm) })
}

/// One failed requirement of an ideal decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum DecompositionClause {
    Empty,
    GeneratorShape {
        index: usize,
    },
    NontrivialPermutation,
    /// A direction other than the last generator's `u` is moved by the composite.
    DirectionMoved {
        direction: Direction,
    },
    /// A periodic direction of the composite is not fixed.
    NotRotationless {
        direction: Direction,
    },
    /// Some petal never occurs as the moved edge of a generator.
    PetalNeverMoved {
        edge: Direction,
    },
    /// Some petal never occurs as the folded edge of a generator.
    PetalNeverFolded {
        edge: Direction,
    },
    Composition {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealDecompositionReport {
    pub violations: Vec<DecompositionClause>,
}

impl IdealDecompositionReport {
    pub fn is_ideal(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_ideal_decomposition(d: &FoldDecomposition) -> IdealDecompositionReport {
    use DecompositionClause::*;
    let mut violations = Vec::new();
    let rank = d.rank;
    if d.generators.is_empty() {
        violations.push(Empty);
    }
    for (k, g) in d.generators.iter().enumerate() {
        if g.a.edge() == g.u.edge() || g.check_rank(rank).is_err() {
            violations.push(GeneratorShape { index: k + 1 });
        }
    }
    if !d.permutation.is_trivial() {
        violations.push(NontrivialPermutation);
    }
    if violations.iter().any(|v| matches!(v, GeneratorShape { .. })) {
        return IdealDecompositionReport { violations };
    }
    match d.compose() {
        Err(e) => violations.push(Composition { message: e.to_string() }),
        Ok(composite) => {
            let dg = composite.direction_map();
            let moved_ok = d.generators.last().map(|g| g.u);
            for dir in rank.directions() {
                if dg.apply(dir) != dir && Some(dir) != moved_ok {
                    violations.push(DirectionMoved { direction: dir });
                }
            }
            let periodic = dg.periodic();
            for &dir in &periodic {
                if dg.apply(dir) != dir {
                    violations.push(NotRotationless { direction: dir });
                }
            }
        }
    }
    let moved: BTreeSet<usize> = d.generators.iter().map(|g| g.u.edge()).collect();
    let folded: BTreeSet<usize> = d.generators.iter().map(|g| g.a.edge()).collect();
    for i in 0..rank.get() {
        if !moved.contains(&i) {
            violations.push(PetalNeverMoved { edge: Direction::of_edge(i, true) });
        }
    }
    for i in 0..rank.get() {
        if !folded.contains(&i) {
            violations.push(PetalNeverFolded { edge: Direction::of_edge(i, true) });
        }
    }
    IdealDecompositionReport { violations }
}
