//! Splicing of pure crossings and the mod-2 bracket.
//!
//! A pure crossing `x` with passes at positions `p1 < p2` of one component
//! has two splicings. Branch A joins the arc entering `p1` to the arc
//! leaving `p2` (and the arc entering `p2` to the arc leaving `p1`), so the
//! segment between the passes becomes a component of its own. Branch B
//! joins the two entering arcs and the two leaving arcs, which reverses that
//! segment. Both are stated with respect to the orientation of the diagram
//! being spliced, so the splices of one assignment can be resolved together
//! and do not depend on an order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{ComponentCode, CrossingId, Diagram, DiagramError, DiagramKind, ParityTable};
use crate::invariant::{fingerprint, Fingerprint};
use crate::moves::{bounded_equivalence_search, MoveError, SearchOptions, SearchVerdict, WalkTrace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BracketError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("crossing `{0}` is not pure")]
    NotPure(CrossingId),
    #[error("crossing `{0}` is chosen twice")]
    DuplicateChoice(CrossingId),
    #[error("{m} pure crossings exceed the limit of {cap}")]
    TooManyPure { m: usize, cap: usize },
    #[error("brackets of {left} and {right} components cannot be compared")]
    Mismatch { left: String, right: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpliceBranch {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpliceChoice {
    pub crossing: CrossingId,
    pub branch: SpliceBranch,
}

impl SpliceChoice {
    pub fn new(crossing: impl Into<CrossingId>, branch: SpliceBranch) -> Self {
        SpliceChoice { crossing: crossing.into(), branch }
    }
}

enum Arrival {
    End,
    /// At pass `pos` of component `comp`, moving forward when `forward`.
    Pass { comp: usize, pos: usize, forward: bool },
}

/// Traverses the diagram with some pure crossings spliced.
struct Resolver<'a> {
    d: &'a Diagram,
    partner: BTreeMap<(usize, usize), (usize, usize)>,
    spliced: BTreeMap<&'a CrossingId, SpliceBranch>,
    /// `visited[c][k]`: the arc entering pass `k` of component `c`; open
    /// components have one more arc, entering the end point.
    visited: Vec<Vec<bool>>,
}

impl<'a> Resolver<'a> {
    fn new(d: &'a Diagram, spliced: BTreeMap<&'a CrossingId, SpliceBranch>) -> Self {
        let mut partner = BTreeMap::new();
        for occ in d.occurrences().into_values() {
            if let [a, b] = occ[..] {
                partner.insert(a, b);
                partner.insert(b, a);
            }
        }
        let visited = d
            .components()
            .iter()
            .map(|c| vec![false; if c.closed { c.len().max(1) } else { c.len() + 1 }])
            .collect();
        Resolver { d, partner, spliced, visited }
    }

    /// Crosses the arc leaving `pos` (or the start point when `pos` is
    /// `None`) in direction `forward`. Returns the arc and where it ends.
    fn step(&self, comp: usize, pos: Option<usize>, forward: bool) -> (usize, Arrival) {
        let code = &self.d.components()[comp];
        let len = code.len();
        if forward {
            let next = pos.map_or(0, |p| p + 1);
            if code.closed {
                let next = next % len;
                (next, Arrival::Pass { comp, pos: next, forward })
            } else if next == len {
                (len, Arrival::End)
            } else {
                (next, Arrival::Pass { comp, pos: next, forward })
            }
        } else {
            let p = pos.expect("backward walks leave a pass");
            let prev = if p == 0 {
                assert!(code.closed, "an open strand is never entered backwards at its start");
                len - 1
            } else {
                p - 1
            };
            (p, Arrival::Pass { comp, pos: prev, forward })
        }
    }

    /// Walks until the end point of an open component or until an arc is met
    /// a second time, collecting the passes of unspliced crossings.
    fn walk(&mut self, mut comp: usize, mut pos: Option<usize>, mut forward: bool) -> Vec<CrossingId> {
        let mut passes = Vec::new();
        if self.d.components()[comp].is_empty() {
            self.visited[comp][0] = true;
            return passes;
        }
        loop {
            let (arc, arrival) = self.step(comp, pos, forward);
            if self.visited[comp][arc] {
                break;
            }
            self.visited[comp][arc] = true;
            let Arrival::Pass { comp: c, pos: p, forward: f } = arrival else {
                break;
            };
            let x = &self.d.components()[c].passes[p];
            match self.spliced.get(x) {
                Some(branch) => {
                    let (c2, p2) = self.partner[&(c, p)];
                    comp = c2;
                    pos = Some(p2);
                    forward = match branch {
                        SpliceBranch::A => f,
                        SpliceBranch::B => !f,
                    };
                }
                None => {
                    passes.push(x.clone());
                    comp = c;
                    pos = Some(p);
                    forward = f;
                }
            }
        }
        passes
    }

    /// One component per source component, in source order, then the extra
    /// closed components the splices created.
    fn resolve(mut self) -> (Vec<ComponentCode>, Vec<ComponentCode>) {
        let comps = self.d.components();
        let mut primary = Vec::with_capacity(comps.len());
        for (c, code) in comps.iter().enumerate() {
            let passes = if code.closed {
                self.walk(c, Some(0), true)
            } else {
                self.walk(c, None, true)
            };
            primary.push(ComponentCode { closed: code.closed, passes });
        }
        let mut extra = Vec::new();
        for (c, code) in comps.iter().enumerate() {
            for k in 0..self.visited[c].len() {
                if self.visited[c][k] {
                    continue;
                }
                let len = code.len();
                let start = if k == 0 {
                    if code.closed {
                        Some(len - 1)
                    } else {
                        unreachable!("the first arc of an open strand is always walked")
                    }
                } else {
                    Some(k - 1)
                };
                let passes = self.walk(c, start, true);
                extra.push(ComponentCode { closed: true, passes });
            }
        }
        (primary, extra)
    }
}

fn check_choices<'a>(d: &Diagram, choices: &'a [SpliceChoice]) -> Result<BTreeMap<&'a CrossingId, SpliceBranch>, BracketError> {
    d.ensure_valid()?;
    let types = d.crossing_types();
    let mut out = BTreeMap::new();
    for s in choices {
        let t = types.get(&s.crossing).ok_or_else(|| DiagramError::UnknownCrossing(s.crossing.clone()))?;
        if !t.is_pure() {
            return Err(BracketError::NotPure(s.crossing.clone()));
        }
        if out.insert(&s.crossing, s.branch).is_some() {
            return Err(BracketError::DuplicateChoice(s.crossing.clone()));
        }
    }
    Ok(out)
}

fn assemble(d: &Diagram, primary: Vec<ComponentCode>, extra: Vec<ComponentCode>) -> Diagram {
    Diagram::from_components(d.kind(), primary.into_iter().chain(extra).collect())
}

/// Splices one pure crossing. Components keep their indices; a new
/// component is appended when the branch splits one. Appended components
/// are closed, also in a tangle, so the result need not pass
/// [`Diagram::validate`].
pub fn splice(d: &Diagram, s: &SpliceChoice) -> Result<Diagram, BracketError> {
    splice_all(d, std::slice::from_ref(s))
}

/// Splices several pure crossings of `d` at once.
pub fn splice_all(d: &Diagram, choices: &[SpliceChoice]) -> Result<Diagram, BracketError> {
    let spliced = check_choices(d, choices)?;
    let (primary, extra) = Resolver::new(d, spliced).resolve();
    Ok(assemble(d, primary, extra))
}

#[derive(Clone, Copy, Debug)]
pub struct BracketOptions {
    /// Largest number of pure crossings expanded.
    pub max_pure: usize,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions { max_pure: 20 }
    }
}

/// Canonical forms of the `n`-component splicings, counted mod 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    kind: DiagramKind,
    n: usize,
    summands: Vec<Diagram>,
    kept: usize,
}

impl Bracket {
    pub fn kind(&self) -> DiagramKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted by serialization.
    pub fn summands(&self) -> &[Diagram] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Assignments whose result had `n` components, before cancellation.
    pub fn kept_terms(&self) -> usize {
        self.kept
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bracket n={} summands={}", self.n, self.summands.len())?;
        for s in &self.summands {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

pub fn bracket(d: &Diagram) -> Result<Bracket, BracketError> {
    bracket_with(d, BracketOptions::default())
}

pub fn bracket_with(d: &Diagram, opts: BracketOptions) -> Result<Bracket, BracketError> {
    d.ensure_valid()?;
    let pure: Vec<CrossingId> = d.pure_crossings().into_iter().collect();
    let m = pure.len();
    if m > opts.max_pure || m >= 64 {
        return Err(BracketError::TooManyPure { m, cap: opts.max_pure });
    }
    let n = d.num_components();
    let terms: Vec<Diagram> = (0..1u64 << m)
        .into_par_iter()
        .filter_map(|mask| {
            let spliced = pure
                .iter()
                .enumerate()
                .map(|(b, x)| (x, if mask >> b & 1 == 0 { SpliceBranch::A } else { SpliceBranch::B }))
                .collect();
            let (primary, extra) = Resolver::new(d, spliced).resolve();
            extra.is_empty().then(|| assemble(d, primary, Vec::new()).canonical_unchecked())
        })
        .collect();

    let kept = terms.len();
    let mut parity: BTreeMap<Diagram, bool> = BTreeMap::new();
    for t in terms {
        *parity.entry(t).or_default() ^= true;
    }
    let mut summands: Vec<(String, Diagram)> =
        parity.into_iter().filter(|(_, odd)| *odd).map(|(s, _)| (s.to_string(), s)).collect();
    summands.sort();
    Ok(Bracket { kind: d.kind(), n, summands: summands.into_iter().map(|(_, s)| s).collect(), kept })
}

/// Data preserved by moves without pure crossings; equal for summands that
/// are connected by such moves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SummandKey {
    pub parities: ParityTable,
    /// Present when the summand is in good condition.
    pub fingerprint: Option<Fingerprint>,
}

pub fn summand_key(d: &Diagram) -> SummandKey {
    SummandKey { parities: d.parity_table(), fingerprint: fingerprint(d).ok() }
}

/// Evidence that two brackets differ: a class of summands whose count mod 2
/// is not the same on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub key: SummandKey,
    pub left: u8,
    pub right: u8,
}

impl Certificate {
    /// A nonempty word of the class, when it has one.
    pub fn word(&self) -> Option<((usize, usize, usize), &crate::words::Word)> {
        self.key.fingerprint.as_ref()?.first_nontrivial()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "summand class with parities {} counted {} vs {} mod 2", self.key.parities, self.left, self.right)?;
        if let Some(((i, j, along), w)) = self.word() {
            write!(f, "; pair ({i},{j}) along {along}: {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Traces connect the summands that were not literally equal.
    Equal { traces: Vec<WalkTrace> },
    Distinct(Certificate),
    Unknown,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, a: usize) -> usize {
        let p = self.0[a];
        if p == a {
            return a;
        }
        let r = self.find(p);
        self.0[a] = r;
        r
    }
}

/// Compares brackets as elements of the mod-2 span of diagrams without pure
/// crossings, up to moves that create no pure crossing.
///
/// Equal canonical sets give `Equal`. Otherwise the summands on only one
/// side are grouped by searches of at most `depth` moves; if every group has
/// as many members from each side mod 2, the result is `Equal`. Failing
/// that, summands are grouped by [`SummandKey`] and a key counted
/// differently mod 2 is a certificate for `Distinct`. Anything else is
/// `Unknown`.
pub fn bracket_equal(p: &Bracket, q: &Bracket, depth: usize) -> Result<Verdict, BracketError> {
    if p.n != q.n || p.kind != q.kind {
        return Err(BracketError::Mismatch {
            left: format!("{} {}", p.n, p.kind),
            right: format!("{} {}", q.n, q.kind),
        });
    }
    let ps: BTreeSet<&Diagram> = p.summands.iter().collect();
    let qs: BTreeSet<&Diagram> = q.summands.iter().collect();
    if ps == qs {
        return Ok(Verdict::Equal { traces: Vec::new() });
    }

    let items: Vec<(bool, &Diagram)> = ps
        .difference(&qs)
        .map(|d| (false, *d))
        .chain(qs.difference(&ps).map(|d| (true, *d)))
        .collect();
    let keys: Vec<SummandKey> = items.par_iter().map(|(_, d)| summand_key(d)).collect();

    let mut uf = UnionFind((0..items.len()).collect());
    let mut traces = Vec::new();
    let opts = SearchOptions { forbid_pure: true };
    for a in 0..items.len() {
        for b in a + 1..items.len() {
            if keys[a] != keys[b] || uf.find(a) == uf.find(b) {
                continue;
            }
            if let SearchVerdict::Equivalent(t) = bounded_equivalence_search(items[a].1, items[b].1, depth, opts)? {
                let (ra, rb) = (uf.find(a), uf.find(b));
                uf.0[ra] = rb;
                traces.push(t);
            }
        }
    }
    let mut groups: BTreeMap<usize, [u8; 2]> = BTreeMap::new();
    for (idx, (right, _)) in items.iter().enumerate() {
        groups.entry(uf.find(idx)).or_default()[*right as usize] ^= 1;
    }
    if groups.values().all(|[l, r]| l == r) {
        return Ok(Verdict::Equal { traces });
    }

    let mut by_key: BTreeMap<&SummandKey, [u8; 2]> = BTreeMap::new();
    for ((right, _), key) in items.iter().zip(&keys) {
        by_key.entry(key).or_default()[*right as usize] ^= 1;
    }
    let mut differing: Vec<(&SummandKey, [u8; 2])> = by_key.into_iter().filter(|(_, [l, r])| l != r).collect();
    differing.sort_by_key(|(k, _)| k.fingerprint.as_ref().and_then(|f| f.first_nontrivial()).is_none());
    Ok(match differing.first() {
        Some((key, [l, r])) => Verdict::Distinct(Certificate { key: (*key).clone(), left: *l, right: *r }),
        None => Verdict::Unknown,
    })
}
