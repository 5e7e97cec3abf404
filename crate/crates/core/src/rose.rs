//! Directions, turns and edge-path words on an r-petaled rose.
//!
//! The rose has a single vertex, so an oriented edge and its initial
//! direction carry the same information. Petal `E_i` (0-based `i`) read
//! forward is direction `2i + 1`; read backward it is `2i + 2`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of petals of the rose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Rank(u8);

impl TryFrom<usize> for Rank {
    type Error = Error;

    fn try_from(r: usize) -> Result<Self> {
        Rank::new(r)
    }
}

impl From<Rank> for usize {
    fn from(r: Rank) -> usize {
        r.get()
    }
}

impl Rank {
    /// Largest rank whose directions can be written with the letter alphabet.
    pub const MAX: u8 = 26;

    pub fn new(r: usize) -> Result<Self> {
        if r == 0 || r > Self::MAX as usize {
            return Err(Error::InvalidRank(r));
        }
        Ok(Rank(r as u8))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Number of directions, `2r`.
    pub fn num_directions(self) -> usize {
        2 * self.get()
    }

    pub fn directions(self) -> impl Iterator<Item = Direction> + Clone {
        (1..=self.num_directions() as u8).map(Direction)
    }

    pub fn contains(self, d: Direction) -> bool {
        (d.0 as usize) <= self.num_directions()
    }

    pub fn check(self, d: Direction) -> Result<Direction> {
        if self.contains(d) {
            Ok(d)
        } else {
            Err(Error::DirectionOutOfRange { id: d.0 as i64, rank: self.get() })
        }
    }

    /// Every turn at the vertex, degenerate ones excluded, in sorted order.
    pub fn all_turns(self) -> Vec<Turn> {
        let n = self.num_directions() as u8;
        let mut out = Vec::with_capacity(n as usize * (n as usize - 1) / 2);
        for a in 1..=n {
            for b in a + 1..=n {
                out.push(Turn::new(Direction(a), Direction(b)));
            }
        }
        out
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A direction at the rose vertex, i.e. an oriented petal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction(u8);

impl Direction {
    /// Builds a direction from its 1-based id. Fails on 0.
    pub fn from_id(id: usize) -> Result<Self> {
        if id == 0 || id > 2 * Rank::MAX as usize {
            return Err(Error::DirectionOutOfRange { id: id as i64, rank: Rank::MAX as usize });
        }
        Ok(Direction(id as u8))
    }

    /// Direction of petal `edge` (0-based), forward or backward.
    pub fn of_edge(edge: usize, forward: bool) -> Self {
        Direction((2 * edge + if forward { 1 } else { 2 }) as u8)
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    /// 0-based petal index.
    pub fn edge(self) -> usize {
        (self.0 as usize - 1) / 2
    }

    pub fn is_forward(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn bar(self) -> Self {
        if self.is_forward() {
            Direction(self.0 + 1)
        } else {
            Direction(self.0 - 1)
        }
    }

    /// Signed petal number: `+(i+1)` forward, `-(i+1)` backward.
    pub fn signed(self) -> i32 {
        let e = self.edge() as i32 + 1;
        if self.is_forward() {
            e
        } else {
            -e
        }
    }

    pub fn from_signed(s: i64) -> Result<Self> {
        if s == 0 || s.unsigned_abs() > Rank::MAX as u64 {
            return Err(Error::DirectionOutOfRange { id: s, rank: Rank::MAX as usize });
        }
        Ok(Self::of_edge(s.unsigned_abs() as usize - 1, s > 0))
    }

    /// Text form, e.g. `b` or `b'`.
    pub fn label(self, style: BarStyle) -> String {
        let letter = (b'a' + self.edge() as u8) as char;
        match (self.is_forward(), style) {
            (true, _) => letter.to_string(),
            (false, BarStyle::Prime) => format!("{letter}'"),
            (false, BarStyle::Minus) => format!("-{letter}"),
            (false, BarStyle::Upper) => letter.to_ascii_uppercase().to_string(),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label(BarStyle::Prime))
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.signed())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Signed(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Signed(s) => Direction::from_signed(s).map_err(serde::de::Error::custom),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = EdgePath::parse(s)?;
        match p.letters() {
            [d] => Ok(*d),
            _ => Err(Error::Parse { pos: 0, msg: format!("expected a single direction, got {s:?}") }),
        }
    }
}

/// How reversed petals are written in text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BarStyle {
    /// `a'`
    #[default]
    Prime,
    /// `-a`
    Minus,
    /// `A`
    Upper,
}

/// Unordered pair of directions, stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Turn(Direction, Direction);

impl Turn {
    pub fn new(a: Direction, b: Direction) -> Self {
        if a <= b {
            Turn(a, b)
        } else {
            Turn(b, a)
        }
    }

    pub fn first(self) -> Direction {
        self.0
    }

    pub fn second(self) -> Direction {
        self.1
    }

    pub fn is_degenerate(self) -> bool {
        self.0 == self.1
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 == d || self.1 == d
    }

    /// The endpoint other than `d`, if `d` is an endpoint.
    pub fn other(self, d: Direction) -> Option<Direction> {
        if self.0 == d {
            Some(self.1)
        } else if self.1 == d {
            Some(self.0)
        } else {
            None
        }
    }

    /// Image under a direction map.
    pub fn map(self, f: impl Fn(Direction) -> Direction) -> Turn {
        Turn::new(f(self.0), f(self.1))
    }

    /// True if the two endpoints form an edge pair `{d, bar(d)}`.
    pub fn is_edge_pair(self) -> bool {
        self.0.bar() == self.1
    }

    pub fn label(self, style: BarStyle) -> String {
        format!("{{{},{}}}", self.0.label(style), self.1.label(style))
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label(BarStyle::Prime))
    }
}

impl Serialize for Turn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0, self.1].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Turn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[Direction; 2]>::deserialize(d)?;
        Ok(Turn::new(a, b))
    }
}

/// A word of oriented petals.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgePath(Vec<Direction>);

impl EdgePath {
    pub fn new(letters: Vec<Direction>) -> Self {
        EdgePath(letters)
    }

    pub fn empty() -> Self {
        EdgePath(Vec::new())
    }

    pub fn single(d: Direction) -> Self {
        EdgePath(vec![d])
    }

    pub fn letters(&self) -> &[Direction] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Direction> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Direction> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Direction> {
        self.0.last().copied()
    }

    /// Inverse path: reversed, every letter barred.
    pub fn inverse(&self) -> EdgePath {
        EdgePath(self.0.iter().rev().map(|d| d.bar()).collect())
    }

    pub fn is_tight(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].bar())
    }

    /// Free reduction. The flag reports whether any letters cancelled.
    pub fn tighten(&self) -> (EdgePath, bool) {
        let mut out: Vec<Direction> = Vec::with_capacity(self.0.len());
        let mut cancelled = false;
        for &d in &self.0 {
            if out.last() == Some(&d.bar()) {
                out.pop();
                cancelled = true;
            } else {
                out.push(d);
            }
        }
        (EdgePath(out), cancelled)
    }

    pub fn concat(&self, other: &EdgePath) -> EdgePath {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        EdgePath(v)
    }

    /// Turns `{bar(e_i), e_{i+1}}` crossed by the word.
    pub fn turns(&self) -> impl Iterator<Item = Turn> + '_ {
        self.0.windows(2).map(|w| Turn::new(w[0].bar(), w[1]))
    }

    pub fn turn_set(&self) -> BTreeSet<Turn> {
        self.turns().collect()
    }

    pub fn max_edge(&self) -> Option<usize> {
        self.0.iter().map(|d| d.edge()).max()
    }

    /// Parses the text alphabet: `a`..`z` forward; `a'`, `-a` or `A` backward.
    /// Whitespace and `.` separators are ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                c if c.is_whitespace() || c == '.' || c == '*' => i += 1,
                '-' => {
                    let Some(&n) = chars.get(i + 1) else {
                        return Err(Error::Parse { pos: i, msg: "dangling '-'".into() });
                    };
                    if !n.is_ascii_lowercase() {
                        return Err(Error::Parse {
                            pos: i + 1,
                            msg: format!("expected a letter after '-', found {n:?}"),
                        });
                    }
                    out.push(Direction::of_edge((n as u8 - b'a') as usize, false));
                    i += 2;
                }
                c if c.is_ascii_lowercase() => {
                    let e = (c as u8 - b'a') as usize;
                    if chars.get(i + 1) == Some(&'\'') {
                        out.push(Direction::of_edge(e, false));
                        i += 2;
                    } else {
                        out.push(Direction::of_edge(e, true));
                        i += 1;
                    }
                }
                c if c.is_ascii_uppercase() => {
                    out.push(Direction::of_edge((c as u8 - b'A') as usize, false));
                    i += 1;
                }
                other => {
                    return Err(Error::Parse { pos: i, msg: format!("unexpected character {other:?}") });
                }
            }
        }
        Ok(EdgePath(out))
    }

    pub fn label(&self, style: BarStyle) -> String {
        self.0.iter().map(|d| d.label(style)).collect()
    }

    pub fn signed(&self) -> Vec<i32> {
        self.0.iter().map(|d| d.signed()).collect()
    }
}

impl fmt::Display for EdgePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label(BarStyle::Prime))
    }
}

impl Serialize for EdgePath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgePath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Signed(Vec<Direction>),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Signed(v) => Ok(EdgePath(v)),
            Repr::Text(t) => EdgePath::parse(&t).map_err(serde::de::Error::custom),
        }
    }
}

impl FromStr for EdgePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EdgePath::parse(s)
    }
}

impl FromIterator<Direction> for EdgePath {
    fn from_iter<I: IntoIterator<Item = Direction>>(iter: I) -> Self {
        EdgePath(iter.into_iter().collect())
    }
}

/// Shorthand used throughout the tests: `dir("b'")`.
pub fn dir(s: &str) -> Direction {
    s.parse().unwrap_or_else(|e| panic!("bad direction {s:?}: {e}"))
}

/// Shorthand used throughout the tests: `path("ba c'")`.
pub fn path(s: &str) -> EdgePath {
    EdgePath::parse(s).unwrap_or_else(|e| panic!("bad path {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bar_pairs_consecutive_ids() {
        let d = |i| Direction::from_id(i).unwrap();
        assert_eq!(d(1).bar(), d(2));
        assert_eq!(d(2).bar(), d(1));
        assert_eq!(d(5).bar().bar(), d(5));
        assert!(Direction::from_id(0).is_err());
    }

    #[test]
    fn rank_rejects_out_of_range() {
        let r = Rank::new(3).unwrap();
        assert!(r.check(Direction::from_id(6).unwrap()).is_ok());
        assert!(matches!(r.check(Direction::from_id(7).unwrap()), Err(Error::DirectionOutOfRange { id: 7, rank: 3 })));
        assert!(Rank::new(0).is_err());
    }

    #[test]
    fn tighten_examples() {
        assert_eq!(path("").tighten(), (path(""), false));
        assert_eq!(path("aa'").tighten(), (path(""), true));
        assert_eq!(path("abb'c").tighten(), (path("ac"), true));
        assert_eq!(path("abc").tighten(), (path("abc"), false));
    }

    #[test]
    fn turns_of_examples() {
        assert!(path("a").turn_set().is_empty());
        let t = path("bac'").turn_set();
        let expected: BTreeSet<Turn> =
            [Turn::new(dir("b'"), dir("a")), Turn::new(dir("a'"), dir("c'"))].into_iter().collect();
        assert_eq!(t, expected);
    }

    #[test]
    fn turns_of_long_image() {
        // Adjacent pairs of a -> abacbaba c' abacbaba, enumerated by hand.
        let t = path("abacbabac'abacbaba").turn_set();
        let expected: BTreeSet<Turn> = [("a'", "b"), ("b'", "a"), ("a'", "c"), ("c'", "b"), ("a'", "c'"), ("c", "a")]
            .iter()
            .map(|(x, y)| Turn::new(dir(x), dir(y)))
            .collect();
        assert_eq!(t, expected);
    }

    #[test]
    fn text_forms() {
        assert_eq!(path("a-bC"), path("ab'c'"));
        assert_eq!(path("ab'").label(BarStyle::Minus), "a-b");
        assert_eq!(path("ab'").label(BarStyle::Upper), "aB");
        assert!(EdgePath::parse("a?").is_err());
        assert!(EdgePath::parse("a-").is_err());
        assert_eq!(serde_json::to_string(&path("ab'")).unwrap(), "[1,-2]");
        let back: EdgePath = serde_json::from_str("\"ab'\"").unwrap();
        assert_eq!(back, path("ab'"));
    }

    fn arb_path() -> impl Strategy<Value = EdgePath> {
        proptest::collection::vec(1u8..=8, 0..30).prop_map(|v| v.into_iter().map(Direction).collect())
    }

    proptest! {
        #[test]
        fn bar_is_fixed_point_free_involution(id in 1usize..=52) {
            let d = Direction::from_id(id).unwrap();
            prop_assert_eq!(d.bar().bar(), d);
            prop_assert_ne!(d.bar(), d);
            prop_assert_eq!(Direction::from_signed(d.signed() as i64).unwrap(), d);
        }

        #[test]
        fn tighten_is_idempotent(p in arb_path()) {
            let (t, _) = p.tighten();
            prop_assert!(t.is_tight());
            prop_assert_eq!(t.tighten(), (t.clone(), false));
        }

        #[test]
        fn turns_invariant_under_reversal(p in arb_path()) {
            let (t, _) = p.tighten();
            prop_assert_eq!(t.turn_set(), t.inverse().turn_set());
        }

        #[test]
        fn text_round_trip(p in arb_path()) {
            for style in [BarStyle::Prime, BarStyle::Minus, BarStyle::Upper] {
                prop_assert_eq!(EdgePath::parse(&p.label(style)).unwrap(), p.clone());
            }
        }
    }
}
