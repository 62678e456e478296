//! Enumerated free tangle and link diagrams as unsigned Gauss codes.
//!
//! A diagram is an ordered list of components. Each component is the
//! sequence of crossings met while traversing it; every crossing is met
//! exactly twice in total. Virtual crossings are never stored, so two codes
//! that differ by a detour move are literally the same value.
//!
//! Component indices are 1-based in every public signature.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Name of a 4-valent vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossingId(String);

impl CrossingId {
    pub fn new(name: impl Into<String>) -> Self {
        CrossingId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub(crate) fn is_valid_name(s: &str) -> bool {
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
    }
}

impl fmt::Display for CrossingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CrossingId {
    fn from(s: &str) -> Self {
        CrossingId(s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagramKind {
    /// Every component is an open arc from a lower to an upper endpoint.
    Tangle,
    /// Every component is a closed circle.
    Link,
}

impl fmt::Display for DiagramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramKind::Tangle => f.write_str("tangle"),
            DiagramKind::Link => f.write_str("link"),
        }
    }
}

/// Passes of one component in traversal order.
///
/// Open components run from the lower endpoint to the upper one. Closed
/// components are cyclic and position 0 is the stored basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentCode {
    pub closed: bool,
    pub passes: Vec<CrossingId>,
}

impl ComponentCode {
    pub fn open<I, S>(passes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<CrossingId>,
    {
        ComponentCode { closed: false, passes: passes.into_iter().map(Into::into).collect() }
    }

    pub fn closed<I, S>(passes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<CrossingId>,
    {
        ComponentCode { closed: true, passes: passes.into_iter().map(Into::into).collect() }
    }

    pub fn len(&self) -> usize {
        self.passes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passes.is_empty()
    }
}

/// A cut location on component `component`, between passes `offset - 1`
/// and `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Basepoint {
    pub component: usize,
    pub offset: usize,
}

/// Indices of the components carrying the two passes of a crossing, `i <= j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossingType {
    pub i: usize,
    pub j: usize,
}

impl CrossingType {
    pub fn new(a: usize, b: usize) -> Self {
        CrossingType { i: a.min(b), j: a.max(b) }
    }

    pub fn is_pure(&self) -> bool {
        self.i == self.j
    }

    /// The component other than `k`, if `k` is one of the two.
    pub fn other(&self, k: usize) -> Option<usize> {
        if k == self.i {
            Some(self.j)
        } else if k == self.j {
            Some(self.i)
        } else {
            None
        }
    }
}

impl fmt::Display for CrossingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A crossing does not occur exactly twice.
    Arity { crossing: CrossingId, count: usize },
    /// A component's openness disagrees with the diagram kind.
    Kind { component: usize, kind: DiagramKind },
    /// A name that the file format cannot carry.
    BadName { crossing: CrossingId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Arity { crossing, count } => {
                write!(f, "arity: crossing `{crossing}` occurs {count} time(s), expected 2")
            }
            Violation::Kind { component, kind } => match kind {
                DiagramKind::Tangle => write!(f, "kind: component {component} of a tangle is closed"),
                DiagramKind::Link => write!(f, "kind: component {component} of a link is open"),
            },
            Violation::BadName { crossing } => {
                write!(f, "name: `{crossing}` is not of the form [A-Za-z0-9_]+")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("crossing `{crossing}` occurs {count} time(s); every crossing must occur exactly twice")]
    Arity { crossing: CrossingId, count: usize },
    #[error("component {0} is listed more than once")]
    DuplicateComponent(usize),
    #[error("component {0} is missing")]
    MissingComponent(usize),
    #[error("invalid diagram: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown crossing `{0}`")]
    UnknownCrossing(CrossingId),
    #[error("component index {index} is out of range 1..={n}")]
    ComponentOutOfRange { index: usize, n: usize },
    #[error("offset {offset} is out of range for component {component} of length {len}")]
    OffsetOutOfRange { component: usize, offset: usize, len: usize },
    #[error("expected exactly one basepoint per component")]
    BasepointCount,
    #[error("operation requires a link diagram")]
    NotALink,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Parity of the number of crossings of each mixed type `(i, j)`, `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityTable {
    n: usize,
    parities: BTreeMap<(usize, usize), u8>,
}

impl ParityTable {
    pub fn get(&self, i: usize, j: usize) -> u8 {
        let key = (i.min(j), i.max(j));
        self.parities.get(&key).copied().unwrap_or(0)
    }

    pub fn is_good(&self) -> bool {
        self.parities.values().all(|&p| p == 0)
    }

    /// First pair with an odd count.
    pub fn first_odd(&self) -> Option<(usize, usize)> {
        self.parities.iter().find(|(_, &p)| p == 1).map(|(&k, _)| k)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u8)> + '_ {
        self.parities.iter().map(|(&k, &v)| (k, v))
    }
}

impl fmt::Display for ParityTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.parities.iter().map(|((i, j), p)| format!("({i},{j})={p}")).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    kind: DiagramKind,
    components: Vec<ComponentCode>,
}

impl Diagram {
    /// Builds a diagram without checking it; see [`Diagram::validate`].
    pub fn from_components(kind: DiagramKind, components: Vec<ComponentCode>) -> Self {
        Diagram { kind, components }
    }

    /// Builds a tangle from whitespace-separated pass lists, one per component.
    pub fn tangle(codes: &[&str]) -> Result<Self, DiagramError> {
        Self::from_codes(DiagramKind::Tangle, codes)
    }

    /// Builds a link from whitespace-separated pass lists, one per component.
    pub fn link(codes: &[&str]) -> Result<Self, DiagramError> {
        Self::from_codes(DiagramKind::Link, codes)
    }

    fn from_codes(kind: DiagramKind, codes: &[&str]) -> Result<Self, DiagramError> {
        let closed = kind == DiagramKind::Link;
        let components = codes
            .iter()
            .map(|c| ComponentCode {
                closed,
                passes: c.split_whitespace().map(CrossingId::from).collect(),
            })
            .collect();
        let d = Diagram { kind, components };
        d.ensure_valid()?;
        Ok(d)
    }

    /// The trivial diagram with `n` crossingless components.
    pub fn trivial(kind: DiagramKind, n: usize) -> Self {
        let closed = kind == DiagramKind::Link;
        Diagram { kind, components: vec![ComponentCode { closed, passes: Vec::new() }; n] }
    }

    pub fn kind(&self) -> DiagramKind {
        self.kind
    }

    pub fn components(&self) -> &[ComponentCode] {
        &self.components
    }

    pub(crate) fn components_mut(&mut self) -> &mut Vec<ComponentCode> {
        &mut self.components
    }

    /// Component `i`, 1-based.
    pub fn component(&self, i: usize) -> Option<&ComponentCode> {
        i.checked_sub(1).and_then(|k| self.components.get(k))
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn num_crossings(&self) -> usize {
        self.components.iter().map(ComponentCode::len).sum::<usize>() / 2
    }

    pub fn crossings(&self) -> BTreeSet<CrossingId> {
        self.components.iter().flat_map(|c| c.passes.iter().cloned()).collect()
    }

    /// Every pass of every crossing as `(component, position)`, 0-based.
    pub(crate) fn occurrences(&self) -> BTreeMap<&CrossingId, Vec<(usize, usize)>> {
        let mut occ: BTreeMap<&CrossingId, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, comp) in self.components.iter().enumerate() {
            for (p, x) in comp.passes.iter().enumerate() {
                occ.entry(x).or_default().push((ci, p));
            }
        }
        occ
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (ci, comp) in self.components.iter().enumerate() {
            let want_closed = self.kind == DiagramKind::Link;
            if comp.closed != want_closed {
                out.push(Violation::Kind { component: ci + 1, kind: self.kind });
            }
        }
        for (x, occ) in self.occurrences() {
            if !CrossingId::is_valid_name(x.as_str()) {
                out.push(Violation::BadName { crossing: x.clone() });
            }
            if occ.len() != 2 {
                out.push(Violation::Arity { crossing: x.clone(), count: occ.len() });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<(), DiagramError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(DiagramError::Invalid(v))
        }
    }

    pub fn crossing_type(&self, c: &CrossingId) -> Result<CrossingType, DiagramError> {
        let mut comps = self
            .components
            .iter()
            .enumerate()
            .flat_map(|(ci, comp)| comp.passes.iter().filter(|x| *x == c).map(move |_| ci + 1));
        match (comps.next(), comps.next()) {
            (Some(a), Some(b)) => Ok(CrossingType::new(a, b)),
            _ => Err(DiagramError::UnknownCrossing(c.clone())),
        }
    }

    /// Types of all crossings.
    pub fn crossing_types(&self) -> BTreeMap<CrossingId, CrossingType> {
        self.occurrences()
            .into_iter()
            .filter(|(_, occ)| occ.len() == 2)
            .map(|(x, occ)| (x.clone(), CrossingType::new(occ[0].0 + 1, occ[1].0 + 1)))
            .collect()
    }

    pub fn pure_crossings(&self) -> BTreeSet<CrossingId> {
        self.crossing_types().into_iter().filter(|(_, t)| t.is_pure()).map(|(x, _)| x).collect()
    }

    pub fn has_pure_crossings(&self) -> bool {
        self.components.iter().any(|comp| {
            let mut seen = BTreeSet::new();
            comp.passes.iter().any(|x| !seen.insert(x))
        })
    }

    /// Parity of the crossing count of every mixed type; the diagram is in
    /// good condition when all of them are even.
    pub fn parity_table(&self) -> ParityTable {
        let n = self.components.len();
        let mut parities = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                parities.insert((i, j), 0u8);
            }
        }
        for t in self.crossing_types().values() {
            if !t.is_pure() {
                *parities.entry((t.i, t.j)).or_insert(0) ^= 1;
            }
        }
        ParityTable { n, parities }
    }

    pub fn is_good_condition(&self) -> (bool, ParityTable) {
        let table = self.parity_table();
        (table.is_good(), table)
    }

    /// Representative of the class of diagrams that differ from `self` only
    /// by renaming crossings and by rotating or reversing closed components.
    ///
    /// Crossings are renamed `1, 2, 3, ...` in order of first occurrence;
    /// each closed component takes the rotation and direction giving the
    /// lexicographically least renamed sequence, components considered in
    /// index order.
    pub fn canonical_form(&self) -> Result<Diagram, DiagramError> {
        self.ensure_valid()?;
        Ok(self.canonical_unchecked())
    }

    pub(crate) fn canonical_unchecked(&self) -> Diagram {
        // Every branch that ties on the prefix chosen so far stays alive,
        // which gives the same answer as trying every combination.
        #[derive(Clone)]
        struct Partial<'a> {
            labels: BTreeMap<&'a CrossingId, u32>,
            next: u32,
        }

        let mut partials = vec![Partial { labels: BTreeMap::new(), next: 1 }];
        let mut chosen: Vec<Vec<u32>> = Vec::with_capacity(self.components.len());

        for comp in &self.components {
            let variants = orientations(comp);
            let mut best: Option<Vec<u32>> = None;
            let mut survivors: Vec<Partial> = Vec::new();
            for partial in &partials {
                for seq in &variants {
                    let mut p = partial.clone();
                    let relabeled: Vec<u32> = seq
                        .iter()
                        .map(|x| {
                            *p.labels.entry(x).or_insert_with(|| {
                                let l = p.next;
                                p.next += 1;
                                l
                            })
                        })
                        .collect();
                    match &best {
                        Some(b) if relabeled > *b => {}
                        Some(b) if relabeled == *b => {
                            if !survivors.iter().any(|s| s.labels == p.labels) {
                                survivors.push(p);
                            }
                        }
                        _ => {
                            best = Some(relabeled);
                            survivors.clear();
                            survivors.push(p);
                        }
                    }
                }
            }
            chosen.push(best.unwrap_or_default());
            partials = survivors;
        }

        let components = self
            .components
            .iter()
            .zip(chosen)
            .map(|(comp, seq)| ComponentCode {
                closed: comp.closed,
                passes: seq.into_iter().map(|l| CrossingId(l.to_string())).collect(),
            })
            .collect();
        Diagram { kind: self.kind, components }
    }

    /// Cuts every closed component at its basepoint, producing an n-n tangle.
    pub fn cut_link(&self, basepoints: &[Basepoint]) -> Result<Diagram, DiagramError> {
        if self.kind != DiagramKind::Link {
            return Err(DiagramError::NotALink);
        }
        let n = self.components.len();
        if basepoints.len() != n {
            return Err(DiagramError::BasepointCount);
        }
        let mut offsets = vec![None; n];
        for b in basepoints {
            if b.component == 0 || b.component > n {
                return Err(DiagramError::ComponentOutOfRange { index: b.component, n });
            }
            let len = self.components[b.component - 1].len();
            if b.offset > len {
                return Err(DiagramError::OffsetOutOfRange {
                    component: b.component,
                    offset: b.offset,
                    len,
                });
            }
            if offsets[b.component - 1].replace(b.offset).is_some() {
                return Err(DiagramError::BasepointCount);
            }
        }
        let components = self
            .components
            .iter()
            .zip(offsets)
            .map(|(comp, off)| {
                let off = off.expect("one basepoint per component");
                let mut passes = comp.passes[off..].to_vec();
                passes.extend_from_slice(&comp.passes[..off]);
                ComponentCode { closed: false, passes }
            })
            .collect();
        Ok(Diagram { kind: DiagramKind::Tangle, components })
    }

    /// Joins the endpoints of every component of a tangle.
    pub fn closure(&self) -> Diagram {
        Diagram {
            kind: DiagramKind::Link,
            components: self
                .components
                .iter()
                .map(|c| ComponentCode { closed: true, passes: c.passes.clone() })
                .collect(),
        }
    }
}

/// All rotations and reversals of a closed component; just the identity for
/// open ones.
fn orientations(comp: &ComponentCode) -> Vec<Vec<&CrossingId>> {
    let fwd: Vec<&CrossingId> = comp.passes.iter().collect();
    if !comp.closed || fwd.len() <= 1 {
        return vec![fwd];
    }
    let len = fwd.len();
    let rev: Vec<&CrossingId> = fwd.iter().rev().copied().collect();
    let mut out = Vec::with_capacity(2 * len);
    for seq in [&fwd, &rev] {
        for r in 0..len {
            out.push(seq[r..].iter().chain(seq[..r].iter()).copied().collect());
        }
    }
    out
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} n={}", self.kind, self.components.len())?;
        for (ci, comp) in self.components.iter().enumerate() {
            write!(f, "component {} {}:", ci + 1, if comp.closed { "closed" } else { "open" })?;
            for x in &comp.passes {
                write!(f, " {x}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Diagram {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_diagram(s)
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> DiagramError {
    DiagramError::Syntax { line, column, message: message.into() }
}

/// Whitespace-separated tokens of a line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

/// Parses the line-oriented diagram format:
///
/// ```text
/// tangle n=2          # or: link n=2
/// component 1 open: a b
/// component 2 open: a b
/// ```
pub fn parse_diagram(text: &str) -> Result<Diagram, DiagramError> {
    let mut header: Option<(DiagramKind, usize)> = None;
    let mut slots: Vec<Option<ComponentCode>> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }

        let Some((_, n)) = header else {
            let (col, word) = toks[0];
            let kind = match word {
                "tangle" => DiagramKind::Tangle,
                "link" => DiagramKind::Link,
                _ => return Err(syntax(ln, col, "expected `tangle n=<N>` or `link n=<N>`")),
            };
            let Some(&(col, nt)) = toks.get(1) else {
                return Err(syntax(ln, col + word.len(), "missing `n=<N>`"));
            };
            let n = nt
                .strip_prefix("n=")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| syntax(ln, col, "expected `n=<N>`"))?;
            if let Some(&(col, _)) = toks.get(2) {
                return Err(syntax(ln, col, "unexpected token after header"));
            }
            header = Some((kind, n));
            slots = vec![None; n];
            continue;
        };

        let (col, word) = toks[0];
        if word != "component" {
            return Err(syntax(ln, col, "expected `component <i> open:` or `component <i> closed:`"));
        }
        let Some(&(col, it)) = toks.get(1) else {
            return Err(syntax(ln, col + word.len(), "missing component index"));
        };
        let index: usize = it.parse().map_err(|_| syntax(ln, col, "component index must be a positive integer"))?;
        if index == 0 || index > n {
            return Err(syntax(ln, col, format!("component index {index} is out of range 1..={n}")));
        }
        let Some(&(col, mode)) = toks.get(2) else {
            return Err(syntax(ln, col + it.len(), "missing `open:` or `closed:`"));
        };
        // `open:` may also be written with the colon glued to the first pass.
        let (closed, rest) = if let Some(r) = mode.strip_prefix("open:") {
            (false, r)
        } else if let Some(r) = mode.strip_prefix("closed:") {
            (true, r)
        } else {
            return Err(syntax(ln, col, "expected `open:` or `closed:`"));
        };
        let mut passes = Vec::new();
        if !rest.is_empty() {
            if !CrossingId::is_valid_name(rest) {
                return Err(syntax(ln, col + mode.len() - rest.len(), format!("bad crossing name `{rest}`")));
            }
            passes.push(CrossingId::from(rest));
        }
        for &(col, t) in &toks[3..] {
            if !CrossingId::is_valid_name(t) {
                return Err(syntax(ln, col, format!("bad crossing name `{t}`")));
            }
            passes.push(CrossingId::from(t));
        }
        if slots[index - 1].is_some() {
            return Err(DiagramError::DuplicateComponent(index));
        }
        slots[index - 1] = Some(ComponentCode { closed, passes });
    }

    let Some((kind, _)) = header else {
        return Err(syntax(1, 1, "empty input: expected `tangle n=<N>` or `link n=<N>`"));
    };
    let mut components = Vec::with_capacity(slots.len());
    for (k, slot) in slots.into_iter().enumerate() {
        components.push(slot.ok_or(DiagramError::MissingComponent(k + 1))?);
    }
    let d = Diagram { kind, components };
    if let Some((x, occ)) = d.occurrences().into_iter().find(|(_, occ)| occ.len() != 2) {
        return Err(DiagramError::Arity { crossing: x.clone(), count: occ.len() });
    }
    Ok(d)
}
