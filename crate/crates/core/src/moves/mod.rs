//! Reidemeister moves for free diagrams, acting on Gauss codes.
//!
//! Every move is described by a list of [`PairSlot`]s: two adjacent passes on
//! one component together with the crossings found there. A deletion removes
//! the slots, an insertion creates them, and the third move swaps the two
//! passes of each of its three slots.
//!
//! Positions always refer to the diagram in which the pairs are present. For
//! an insertion this is the diagram after the move, which makes every
//! deletion and the matching insertion carry identical slots.

mod search;
mod walk;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::diagram::{CrossingId, Diagram, DiagramError};

pub use search::{bounded_equivalence_search, SearchOptions, SearchVerdict, SEARCH_SLACK};
pub use walk::{parse_log, random_walk, WalkOptions, WalkTrace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("move does not apply: {0}")]
    PatternAbsent(String),
    #[error("malformed move: {0}")]
    Malformed(String),
    #[error("diagrams are not comparable: {0}")]
    Mismatch(String),
    #[error("trace log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("could not rebuild the connecting move sequence")]
    TraceReconstruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    R1Delete,
    R1Insert,
    R2Delete,
    R2Insert,
    R3,
}

impl MoveKind {
    pub const ALL: [MoveKind; 5] =
        [MoveKind::R1Delete, MoveKind::R1Insert, MoveKind::R2Delete, MoveKind::R2Insert, MoveKind::R3];

    pub fn name(&self) -> &'static str {
        match self {
            MoveKind::R1Delete => "R1_delete",
            MoveKind::R1Insert => "R1_insert",
            MoveKind::R2Delete => "R2_delete",
            MoveKind::R2Insert => "R2_insert",
            MoveKind::R3 => "R3",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        MoveKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_insertion(&self) -> bool {
        matches!(self, MoveKind::R1Insert | MoveKind::R2Insert)
    }

    pub fn is_deletion(&self) -> bool {
        matches!(self, MoveKind::R1Delete | MoveKind::R2Delete)
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Two cyclically adjacent passes `position`, `position + 1` of a component
/// (1-based), carrying `letters[0]` and `letters[1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairSlot {
    pub component: usize,
    pub position: usize,
    pub letters: [CrossingId; 2],
}

impl PairSlot {
    pub fn new(component: usize, position: usize, a: CrossingId, b: CrossingId) -> Self {
        PairSlot { component, position, letters: [a, b] }
    }

    fn swapped(&self) -> Self {
        let [a, b] = self.letters.clone();
        PairSlot { component: self.component, position: self.position, letters: [b, a] }
    }
}

impl fmt::Display for PairSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}={},{}", self.component, self.position, self.letters[0], self.letters[1])
    }
}

/// A located move.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveSite {
    pub kind: MoveKind,
    pub pairs: Vec<PairSlot>,
}

impl MoveSite {
    pub fn r1_insert(component: usize, position: usize, x: CrossingId) -> Self {
        MoveSite { kind: MoveKind::R1Insert, pairs: vec![PairSlot::new(component, position, x.clone(), x)] }
    }

    /// Inserts `x y` at `first` and `x y` (or `y x` when `reversed`) at
    /// `second`; both given as `(component, position)`.
    pub fn r2_insert(
        first: (usize, usize),
        second: (usize, usize),
        x: CrossingId,
        y: CrossingId,
        reversed: bool,
    ) -> Self {
        let second_letters = if reversed { [y.clone(), x.clone()] } else { [x.clone(), y.clone()] };
        MoveSite {
            kind: MoveKind::R2Insert,
            pairs: vec![
                PairSlot::new(first.0, first.1, x, y),
                PairSlot { component: second.0, position: second.1, letters: second_letters },
            ],
        }
    }

    /// Distinct crossings named by the move, in order of appearance.
    pub fn crossings(&self) -> Vec<CrossingId> {
        let mut out: Vec<CrossingId> = Vec::new();
        for p in &self.pairs {
            for x in &p.letters {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
        }
        out
    }

    /// The move that undoes this one.
    pub fn inverse(&self) -> MoveSite {
        let kind = match self.kind {
            MoveKind::R1Delete => MoveKind::R1Insert,
            MoveKind::R1Insert => MoveKind::R1Delete,
            MoveKind::R2Delete => MoveKind::R2Insert,
            MoveKind::R2Insert => MoveKind::R2Delete,
            MoveKind::R3 => MoveKind::R3,
        };
        let pairs = if kind == MoveKind::R3 {
            self.pairs.iter().map(PairSlot::swapped).collect()
        } else {
            self.pairs.clone()
        };
        MoveSite { kind, pairs }
    }

    fn check_shape(&self) -> Result<(), MoveError> {
        let bad = |m: &str| Err(MoveError::Malformed(format!("{}: {m}", self.kind)));
        match self.kind {
            MoveKind::R1Delete | MoveKind::R1Insert => {
                if self.pairs.len() != 1 || self.pairs[0].letters[0] != self.pairs[0].letters[1] {
                    return bad("expects one pair `x x`");
                }
            }
            MoveKind::R2Delete | MoveKind::R2Insert => {
                let sets: Vec<BTreeSet<&CrossingId>> =
                    self.pairs.iter().map(|p| p.letters.iter().collect()).collect();
                if sets.len() != 2 || sets[0].len() != 2 || sets[0] != sets[1] {
                    return bad("expects two pairs over the same two crossings");
                }
            }
            MoveKind::R3 => {
                let sets: BTreeSet<BTreeSet<&CrossingId>> =
                    self.pairs.iter().map(|p| p.letters.iter().collect()).collect();
                let all: BTreeSet<&CrossingId> = sets.iter().flatten().copied().collect();
                if self.pairs.len() != 3 || sets.len() != 3 || all.len() != 3 || sets.iter().any(|s| s.len() != 2) {
                    return bad("expects pairs {x,y}, {x,z}, {y,z}");
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for x in self.crossings() {
            write!(f, " {x}")?;
        }
        for p in &self.pairs {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

/// Indices of the two passes of a pair starting at `pos` in a component of
/// length `len`. Closed components wrap around.
pub(crate) fn pair_indices(len: usize, closed: bool, pos: usize) -> Option<(usize, usize)> {
    if closed {
        (len >= 2 && pos < len).then(|| (pos, (pos + 1) % len))
    } else {
        (pos + 1 < len).then_some((pos, pos + 1))
    }
}

/// Start positions of the distinct adjacent pairs of a component of length
/// `len`.
pub(crate) fn pair_positions(len: usize, closed: bool) -> std::ops::Range<usize> {
    match (closed, len) {
        (true, 0 | 1) => 0..0,
        (true, 2) => 0..1,
        (true, _) => 0..len,
        (false, _) => 0..len.saturating_sub(1),
    }
}

/// Names not yet used in `d`.
pub(crate) fn fresh_names(d: &Diagram, count: usize) -> Vec<CrossingId> {
    let used = d.crossings();
    (1..)
        .map(|k| CrossingId::new(format!("n{k}")))
        .filter(|x| !used.contains(x))
        .take(count)
        .collect()
}

/// Applies `m` to `d`.
pub fn apply_move(d: &Diagram, m: &MoveSite) -> Result<Diagram, MoveError> {
    d.ensure_valid()?;
    apply_site(d, m)
}

pub(crate) fn apply_site(d: &Diagram, m: &MoveSite) -> Result<Diagram, MoveError> {
    m.check_shape()?;
    let n = d.num_components();
    for p in &m.pairs {
        if p.component == 0 || p.component > n {
            return Err(DiagramError::ComponentOutOfRange { index: p.component, n }.into());
        }
    }
    let absent = |msg: String| MoveError::PatternAbsent(format!("{}: {msg}", m.kind));

    let mut out = d.clone();
    if m.kind.is_insertion() {
        let used = d.crossings();
        if let Some(x) = m.crossings().into_iter().find(|x| used.contains(x)) {
            return Err(absent(format!("crossing `{x}` already exists")));
        }
        let mut per_comp: BTreeMap<usize, Vec<&PairSlot>> = BTreeMap::new();
        for p in &m.pairs {
            per_comp.entry(p.component - 1).or_default().push(p);
        }
        for (ci, pairs) in per_comp {
            let comp = &mut out.components_mut()[ci];
            let new_len = comp.len() + 2 * pairs.len();
            let mut filled: Vec<Option<CrossingId>> = vec![None; new_len];
            for p in pairs {
                let (a, b) = pair_indices(new_len, comp.closed, p.position)
                    .ok_or_else(|| absent(format!("position {} out of range on component {}", p.position, ci + 1)))?;
                for (idx, x) in [(a, &p.letters[0]), (b, &p.letters[1])] {
                    if filled[idx].replace(x.clone()).is_some() {
                        return Err(absent("inserted pairs overlap".into()));
                    }
                }
            }
            let mut rest = comp.passes.drain(..);
            let passes: Vec<CrossingId> =
                filled.into_iter().map(|s| s.unwrap_or_else(|| rest.next().expect("length matches"))).collect();
            drop(rest);
            comp.passes = passes;
        }
        return Ok(out);
    }

    let mut touched: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for p in &m.pairs {
        let comp = &d.components()[p.component - 1];
        let (a, b) = pair_indices(comp.len(), comp.closed, p.position)
            .ok_or_else(|| absent(format!("position {} out of range on component {}", p.position, p.component)))?;
        if comp.passes[a] != p.letters[0] || comp.passes[b] != p.letters[1] {
            return Err(absent(format!(
                "expected `{} {}` at {}:{}, found `{} {}`",
                p.letters[0], p.letters[1], p.component, p.position, comp.passes[a], comp.passes[b]
            )));
        }
        let slots = touched.entry(p.component - 1).or_default();
        if slots.iter().any(|&(c, e)| c == a || c == b || e == a || e == b) {
            return Err(absent("pairs overlap".into()));
        }
        slots.push((a, b));
    }

    for (ci, slots) in touched {
        let comp = &mut out.components_mut()[ci];
        if m.kind == MoveKind::R3 {
            for (a, b) in slots {
                comp.passes.swap(a, b);
            }
        } else {
            let drop_idx: BTreeSet<usize> = slots.iter().flat_map(|&(a, b)| [a, b]).collect();
            comp.passes = comp
                .passes
                .iter()
                .enumerate()
                .filter(|(k, _)| !drop_idx.contains(k))
                .map(|(_, x)| x.clone())
                .collect();
        }
    }
    Ok(out)
}

/// Which sites [`enumerate_moves`] reports.
#[derive(Clone, Debug)]
pub struct MoveFilter {
    pub forbid_pure: bool,
    pub kinds: BTreeSet<MoveKind>,
}

impl Default for MoveFilter {
    fn default() -> Self {
        MoveFilter {
            forbid_pure: false,
            kinds: [MoveKind::R1Delete, MoveKind::R2Delete, MoveKind::R3].into_iter().collect(),
        }
    }
}

impl MoveFilter {
    pub fn forbid_pure() -> Self {
        MoveFilter { forbid_pure: true, ..Default::default() }
    }
}

struct Slot<'a> {
    component: usize,
    position: usize,
    a: usize,
    b: usize,
    letters: [&'a CrossingId; 2],
}

impl Slot<'_> {
    fn overlaps(&self, other: &Slot) -> bool {
        self.component == other.component
            && [self.a, self.b].iter().any(|i| *i == other.a || *i == other.b)
    }

    fn has(&self, x: &CrossingId) -> bool {
        self.letters[0] == x || self.letters[1] == x
    }

    fn pair_slot(&self) -> PairSlot {
        PairSlot::new(self.component + 1, self.position, self.letters[0].clone(), self.letters[1].clone())
    }
}

fn adjacent_slots(d: &Diagram) -> Vec<Slot<'_>> {
    let mut out = Vec::new();
    for (ci, comp) in d.components().iter().enumerate() {
        for pos in pair_positions(comp.len(), comp.closed) {
            let (a, b) = pair_indices(comp.len(), comp.closed, pos).expect("position in range");
            out.push(Slot { component: ci, position: pos, a, b, letters: [&comp.passes[a], &comp.passes[b]] });
        }
    }
    out
}

/// Deletion and third-move sites of `d`. Insertions form infinite families
/// and are not enumerated here.
pub fn enumerate_moves(d: &Diagram, filter: &MoveFilter) -> Result<Vec<MoveSite>, MoveError> {
    d.ensure_valid()?;
    Ok(enumerate_unchecked(d, filter))
}

pub(crate) fn enumerate_unchecked(d: &Diagram, filter: &MoveFilter) -> Vec<MoveSite> {
    let slots = adjacent_slots(d);
    let mut sites = Vec::new();

    if filter.kinds.contains(&MoveKind::R1Delete) && !filter.forbid_pure {
        for s in slots.iter().filter(|s| s.letters[0] == s.letters[1]) {
            sites.push(MoveSite { kind: MoveKind::R1Delete, pairs: vec![s.pair_slot()] });
        }
    }

    let mixed: Vec<&Slot> = slots.iter().filter(|s| s.letters[0] != s.letters[1]).collect();

    if filter.kinds.contains(&MoveKind::R2Delete) {
        for (k, s1) in mixed.iter().enumerate() {
            for s2 in &mixed[k + 1..] {
                if s2.has(s1.letters[0]) && s2.has(s1.letters[1]) && !s1.overlaps(s2) {
                    sites.push(MoveSite { kind: MoveKind::R2Delete, pairs: vec![s1.pair_slot(), s2.pair_slot()] });
                }
            }
        }
    }

    if filter.kinds.contains(&MoveKind::R3) {
        for (k1, s1) in mixed.iter().enumerate() {
            for (k2, s2) in mixed.iter().enumerate().skip(k1 + 1) {
                // s2 shares exactly one crossing with s1.
                let shared = s1.letters.iter().filter(|x| s2.has(x)).count();
                if shared != 1 || s1.overlaps(s2) {
                    continue;
                }
                let all: BTreeSet<&CrossingId> = s1.letters.iter().chain(s2.letters.iter()).copied().collect();
                let sym: Vec<&CrossingId> = all
                    .iter()
                    .filter(|x| s1.has(x) != s2.has(x))
                    .copied()
                    .collect();
                for s3 in &mixed[k2 + 1..] {
                    if s3.has(sym[0]) && s3.has(sym[1]) && !s3.overlaps(s1) && !s3.overlaps(s2) {
                        sites.push(MoveSite {
                            kind: MoveKind::R3,
                            pairs: vec![s1.pair_slot(), s2.pair_slot(), s3.pair_slot()],
                        });
                    }
                }
            }
        }
    }

    if filter.forbid_pure {
        sites.retain(|m| {
            m.kind != MoveKind::R1Delete
                && apply_site(d, m).map(|r| !r.has_pure_crossings()).unwrap_or(false)
        });
    }
    sites
}

/// Every first- and second-move insertion into `d` that keeps the crossing
/// count at most `max_crossings`, up to renaming of the new crossings.
///
/// Under `forbid_pure` only second moves between two different components
/// are produced.
pub fn enumerate_insertions(d: &Diagram, forbid_pure: bool, max_crossings: usize) -> Vec<MoveSite> {
    let size = d.num_crossings();
    let names = fresh_names(d, 2);
    let (x, y) = (names[0].clone(), names[1].clone());
    let mut out = Vec::new();
    let comps = d.components();

    let insert_positions = |len: usize, closed: bool| -> std::ops::Range<usize> {
        // An empty closed component has a single pair position up to rotation.
        if closed && len == 2 {
            0..1
        } else {
            pair_positions(len, closed)
        }
    };

    if !forbid_pure && size < max_crossings {
        for (ci, comp) in comps.iter().enumerate() {
            for pos in insert_positions(comp.len() + 2, comp.closed) {
                out.push(MoveSite::r1_insert(ci + 1, pos, x.clone()));
            }
        }
    }

    if size + 2 <= max_crossings {
        for (c1, comp1) in comps.iter().enumerate() {
            for (c2, comp2) in comps.iter().enumerate().skip(c1) {
                if c1 == c2 {
                    if forbid_pure {
                        continue;
                    }
                    let new_len = comp1.len() + 4;
                    let positions: Vec<usize> = pair_positions(new_len, comp1.closed).collect();
                    for (k, &p1) in positions.iter().enumerate() {
                        let (a1, b1) = pair_indices(new_len, comp1.closed, p1).expect("in range");
                        for &p2 in &positions[k + 1..] {
                            let (a2, b2) = pair_indices(new_len, comp1.closed, p2).expect("in range");
                            if a2 == a1 || a2 == b1 || b2 == a1 || b2 == b1 {
                                continue;
                            }
                            for rev in [false, true] {
                                out.push(MoveSite::r2_insert((c1 + 1, p1), (c2 + 1, p2), x.clone(), y.clone(), rev));
                            }
                        }
                    }
                } else {
                    for p1 in insert_positions(comp1.len() + 2, comp1.closed) {
                        for p2 in insert_positions(comp2.len() + 2, comp2.closed) {
                            for rev in [false, true] {
                                out.push(MoveSite::r2_insert((c1 + 1, p1), (c2 + 1, p2), x.clone(), y.clone(), rev));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
