//! Word invariants of oriented enumerated n-n free tangles and free links in
//! good condition without pure crossings.
//!
//! For a mixed crossing `c` of type `(i, j)` and another component `k`, the
//! bit `lk_c(k)` is the parity of the number of type `(i, k)` passes met on
//! component `i` before `c`, plus the number of type `(j, k)` passes met on
//! component `j` before `c`. Reading these letters along component `i` for
//! every type `(i, j)` crossing gives a word in the group of the pair.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{Basepoint, CrossingId, CrossingType, Diagram, DiagramError, DiagramKind};
use crate::words::{canonical_class_word, reduce, GroupContext, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("crossing `{0}` is pure")]
    PureCrossing(CrossingId),
    #[error("good condition fails: pair ({0},{1}) has an odd number of crossings")]
    NotGoodCondition(usize, usize),
    #[error("component {k} is one of the components ({i},{j}) of the crossing")]
    ComponentOfCrossing { k: usize, i: usize, j: usize },
    #[error("component {0} is closed; words are read on tangles")]
    ClosedComponent(usize),
    #[error("a pair of two different components is required, got ({0},{0})")]
    SamePair(usize),
    #[error("component index {index} is out of range 1..={n}")]
    ComponentOutOfRange { index: usize, n: usize },
}

/// Per-component prefix data of a tangle without pure crossings.
struct TangleView<'a> {
    d: &'a Diagram,
    types: BTreeMap<CrossingId, CrossingType>,
    /// `positions[c][x]` is the position of `x` on component `c` (0-based).
    positions: Vec<BTreeMap<&'a CrossingId, usize>>,
}

impl<'a> TangleView<'a> {
    fn new(d: &'a Diagram) -> Result<Self, InvariantError> {
        d.ensure_valid()?;
        if let Some(k) = d.components().iter().position(|c| c.closed) {
            return Err(InvariantError::ClosedComponent(k + 1));
        }
        let types = d.crossing_types();
        if let Some((x, _)) = types.iter().find(|(_, t)| t.is_pure()) {
            return Err(InvariantError::PureCrossing(x.clone()));
        }
        let positions = d
            .components()
            .iter()
            .map(|c| c.passes.iter().enumerate().map(|(p, x)| (x, p)).collect())
            .collect();
        Ok(TangleView { d, types, positions })
    }

    fn check_index(&self, k: usize) -> Result<(), InvariantError> {
        let n = self.d.num_components();
        if k == 0 || k > n {
            Err(InvariantError::ComponentOutOfRange { index: k, n })
        } else {
            Ok(())
        }
    }

    /// Bits over the other components, indexed by rank in `ctx`, of the
    /// passes on component `c` strictly before position `upto`.
    fn prefix_bits(&self, ctx: &GroupContext, c: usize, upto: usize) -> u64 {
        let mut bits = 0u64;
        for x in &self.d.components()[c - 1].passes[..upto] {
            let other = self.types[x].other(c).expect("pass lies on c");
            if let Some(r) = ctx.rank(other) {
                bits ^= 1 << r;
            }
        }
        bits
    }

    fn lk_vector(&self, ctx: &GroupContext, c: &CrossingId) -> Letter {
        let t = self.types[c];
        let pi = self.positions[t.i - 1][c];
        let pj = self.positions[t.j - 1][c];
        let bits = self.prefix_bits(ctx, t.i, pi) ^ self.prefix_bits(ctx, t.j, pj);
        Letter::from_index(ctx.width(), bits)
    }

    fn crossing(&self, c: &CrossingId) -> Result<CrossingType, InvariantError> {
        self.types.get(c).copied().ok_or_else(|| DiagramError::UnknownCrossing(c.clone()).into())
    }
}

fn check_good(d: &Diagram) -> Result<(), InvariantError> {
    match d.parity_table().first_odd() {
        Some((i, j)) => Err(InvariantError::NotGoodCondition(i, j)),
        None => Ok(()),
    }
}

/// `lk_c(k)` as 0 or 1.
pub fn lk(d: &Diagram, c: &CrossingId, k: usize) -> Result<u8, InvariantError> {
    let view = TangleView::new(d)?;
    view.check_index(k)?;
    let t = view.crossing(c)?;
    if k == t.i || k == t.j {
        return Err(InvariantError::ComponentOfCrossing { k, i: t.i, j: t.j });
    }
    let ctx = GroupContext::new(d.num_components(), t.i, t.j)?;
    let rank = ctx.rank(k).expect("k is another component");
    Ok(view.lk_vector(&ctx, c).bit(rank))
}

/// The letter `lk_c` in the group of the crossing's pair.
pub fn lk_vector(d: &Diagram, c: &CrossingId) -> Result<Letter, InvariantError> {
    let view = TangleView::new(d)?;
    let t = view.crossing(c)?;
    let ctx = GroupContext::new(d.num_components(), t.i, t.j)?;
    Ok(view.lk_vector(&ctx, c))
}

/// The reduced word read along component `i` over the crossings of type
/// `(i, j)`, in the order they are met from the lower endpoint of `i`.
pub fn word_invariant(d: &Diagram, i: usize, j: usize) -> Result<Word, InvariantError> {
    let view = TangleView::new(d)?;
    view.check_index(i)?;
    view.check_index(j)?;
    if i == j {
        return Err(InvariantError::SamePair(i));
    }
    check_good(d)?;
    let ctx = GroupContext::new(d.num_components(), i, j)?;
    let letters = d.components()[i - 1]
        .passes
        .iter()
        .filter(|x| view.types[*x].other(i) == Some(j))
        .map(|x| view.lk_vector(&ctx, x))
        .collect();
    Ok(reduce(&Word::new(ctx, letters)?))
}

/// The word of the tangle obtained by cutting the link at `basepoints`.
pub fn link_word(d: &Diagram, basepoints: &[Basepoint], i: usize, j: usize) -> Result<Word, InvariantError> {
    if d.kind() != DiagramKind::Link {
        return Err(DiagramError::NotALink.into());
    }
    d.ensure_valid()?;
    if let Some(x) = d.pure_crossings().into_iter().next() {
        return Err(InvariantError::PureCrossing(x));
    }
    check_good(d)?;
    word_invariant(&d.cut_link(basepoints)?, i, j)
}

pub fn zero_basepoints(d: &Diagram) -> Vec<Basepoint> {
    (1..=d.num_components()).map(|component| Basepoint { component, offset: 0 }).collect()
}

/// The slide-and-conjugacy class of the link word, as its normal form.
/// Any basepoints give the same class; offset 0 is used.
pub fn link_invariant(d: &Diagram, i: usize, j: usize) -> Result<Word, InvariantError> {
    Ok(canonical_class_word(&link_word(d, &zero_basepoints(d), i, j)?))
}

/// Word entries for every pair `i < j` and both reading components.
///
/// Tangles carry the reduced words themselves; links carry class normal
/// forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    kind: DiagramKind,
    /// Keyed by `(i, j, along)` with `i < j` and `along` in `{i, j}`.
    entries: BTreeMap<(usize, usize, usize), Word>,
}

impl Fingerprint {
    pub fn get(&self, i: usize, j: usize, along: usize) -> Option<&Word> {
        self.entries.get(&(i.min(j), i.max(j), along))
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &Word)> {
        self.entries.iter().map(|(k, w)| (*k, w))
    }

    /// Keeps only the entries of pair `(i, j)`.
    pub fn restricted(&self, i: usize, j: usize) -> Fingerprint {
        let (a, b) = (i.min(j), i.max(j));
        Fingerprint {
            kind: self.kind,
            entries: self.entries.iter().filter(|((x, y, _), _)| (*x, *y) == (a, b)).map(|(k, w)| (*k, w.clone())).collect(),
        }
    }

    /// First entry, in key order, on which the two fingerprints disagree.
    pub fn first_difference<'a>(&'a self, other: &'a Fingerprint) -> Option<((usize, usize, usize), &'a Word, &'a Word)> {
        self.entries.iter().find_map(|(k, w)| match other.entries.get(k) {
            Some(v) if v == w => None,
            Some(v) => Some((*k, w, v)),
            None => None,
        })
    }

    /// First entry holding a nonempty word.
    pub fn first_nontrivial(&self) -> Option<((usize, usize, usize), &Word)> {
        self.entries.iter().find(|(_, w)| !w.is_empty()).map(|(k, w)| (*k, w))
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((i, j, along), w) in &self.entries {
            writeln!(f, "pair ({i},{j}) along {along}: {w}")?;
        }
        Ok(())
    }
}

pub fn fingerprint(d: &Diagram) -> Result<Fingerprint, InvariantError> {
    d.ensure_valid()?;
    if let Some(x) = d.pure_crossings().into_iter().next() {
        return Err(InvariantError::PureCrossing(x));
    }
    check_good(d)?;
    let n = d.num_components();
    let keys: Vec<(usize, usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).flat_map(move |j| [(i, j, i), (i, j, j)]))
        .collect();
    let entries = keys
        .into_par_iter()
        .map(|(i, j, along)| {
            let other = if along == i { j } else { i };
            let w = match d.kind() {
                DiagramKind::Tangle => word_invariant(d, along, other)?,
                DiagramKind::Link => link_invariant(d, along, other)?,
            };
            Ok(((i, j, along), w))
        })
        .collect::<Result<BTreeMap<_, _>, InvariantError>>()?;
    Ok(Fingerprint { kind: d.kind(), entries })
}
