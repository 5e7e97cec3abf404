//! Edge-pair-preserving relabelings: permutations of petals combined with
//! orientation flips. They act on directions and commute with bar.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::graph_maps::Generator;
use crate::ltt::LttStructure;
use crate::moves::GeneratingTriple;
use crate::rose::{Direction, Rank};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EppPermutation {
    /// Petal `i` goes to petal `perm[i]`.
    pub perm: Vec<usize>,
    /// Bit `i` set: petal `i` is reversed.
    pub flips: u32,
}

impl EppPermutation {
    pub fn identity(rank: Rank) -> Self {
        EppPermutation { perm: (0..rank.get()).collect(), flips: 0 }
    }

    pub fn apply(&self, d: Direction) -> Direction {
        let e = d.edge();
        let flipped = self.flips >> e & 1 == 1;
        Direction::of_edge(self.perm[e], d.is_forward() != flipped)
    }

    pub fn structure(&self, s: &LttStructure) -> LttStructure {
        s.relabel(|d| self.apply(d))
    }

    pub fn triple(&self, t: &GeneratingTriple) -> GeneratingTriple {
        GeneratingTriple {
            gen: Generator { a: self.apply(t.gen.a), u: self.apply(t.gen.u) },
            source: self.structure(&t.source),
            dest: self.structure(&t.dest),
        }
    }
}

/// All `r! 2^r` elements.
pub fn epp_group(rank: Rank) -> Vec<EppPermutation> {
    let r = rank.get();
    (0..r)
        .permutations(r)
        .flat_map(|perm| (0..1u32 << r).map(move |flips| EppPermutation { perm: perm.clone(), flips }))
        .collect()
}

/// Least image of `s` under the group.
pub fn canonical_structure(s: &LttStructure, group: &[EppPermutation]) -> LttStructure {
    group.iter().map(|g| g.structure(s)).min().expect("nonempty group")
}

/// Least sorted image of a set of triples under the group.
pub fn canonical_triples(ts: &[GeneratingTriple], group: &[EppPermutation]) -> Vec<GeneratingTriple> {
    group
        .iter()
        .map(|g| {
            let mut v: Vec<_> = ts.iter().map(|t| g.triple(t)).collect();
            v.sort();
            v
        })
        .min()
        .expect("nonempty group")
}

/// Classes of structures under the group, each given by its canonical form.
pub fn structure_classes<'a>(
    structures: impl IntoIterator<Item = &'a LttStructure>,
    group: &[EppPermutation],
) -> BTreeSet<LttStructure> {
    structures.into_iter().map(|s| canonical_structure(s, group)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rose::dir;

    #[test]
    fn group_sizes() {
        assert_eq!(epp_group(Rank::new(3).unwrap()).len(), 48);
        assert_eq!(epp_group(Rank::new(2).unwrap()).len(), 8);
    }

    #[test]
    fn elements_commute_with_bar() {
        let r = Rank::new(3).unwrap();
        for g in epp_group(r) {
            let images: BTreeSet<_> = r.directions().map(|d| g.apply(d)).collect();
            assert_eq!(images.len(), 6);
            for d in r.directions() {
                assert_eq!(g.apply(d.bar()), g.apply(d).bar());
            }
        }
        let g = EppPermutation { perm: vec![1, 0, 2], flips: 0b001 };
        assert_eq!(g.apply(dir("a")), dir("b'"));
        assert_eq!(g.apply(dir("b")), dir("a"));
    }
}
