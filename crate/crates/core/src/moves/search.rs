use std::collections::HashMap;

use super::{apply_site, enumerate_insertions, enumerate_unchecked, MoveError, MoveFilter, MoveSite, WalkTrace};
use crate::diagram::Diagram;

/// Extra crossings an intermediate diagram may carry beyond the larger input.
pub const SEARCH_SLACK: usize = 2;

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    pub forbid_pure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchVerdict {
    /// A connecting trace; its final diagram has the same canonical form as
    /// the target.
    Equivalent(WalkTrace),
    /// Nothing found within the bound. Never a claim of inequivalence.
    Unknown,
}

impl SearchVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, SearchVerdict::Equivalent(_))
    }
}

struct Node {
    diagram: Diagram,
    parent: Option<(Diagram, MoveSite)>,
}

struct Side {
    visited: HashMap<Diagram, Node>,
    frontier: Vec<Diagram>,
    depth: usize,
}

impl Side {
    fn new(d: &Diagram) -> (Self, Diagram) {
        let key = d.canonical_unchecked();
        let mut visited = HashMap::new();
        visited.insert(key.clone(), Node { diagram: d.clone(), parent: None });
        (Side { visited, frontier: vec![key.clone()], depth: 0 }, key)
    }

    /// Keys from `key` back to the root, `key` first.
    fn chain(&self, key: &Diagram) -> Vec<Diagram> {
        let mut out = vec![key.clone()];
        let mut cur = key;
        while let Some((parent, _)) = &self.visited[cur].parent {
            out.push(parent.clone());
            cur = parent;
        }
        out
    }
}

fn neighbors(d: &Diagram, forbid_pure: bool, bound: usize) -> Vec<(MoveSite, Diagram)> {
    let filter = MoveFilter { forbid_pure, ..Default::default() };
    enumerate_unchecked(d, &filter)
        .into_iter()
        .chain(enumerate_insertions(d, forbid_pure, bound))
        .filter_map(|m| {
            let next = apply_site(d, &m).ok()?;
            (!forbid_pure || !next.has_pure_crossings()).then_some((m, next))
        })
        .collect()
}

/// Expands one layer of `side`; returns the first key also seen by `other`.
fn expand(side: &mut Side, other: &Side, forbid_pure: bool, bound: usize) -> Option<Diagram> {
    let frontier = std::mem::take(&mut side.frontier);
    side.depth += 1;
    for key in frontier {
        let d = side.visited[&key].diagram.clone();
        for (m, next) in neighbors(&d, forbid_pure, bound) {
            let nk = next.canonical_unchecked();
            if side.visited.contains_key(&nk) {
                continue;
            }
            side.visited.insert(nk.clone(), Node { diagram: next, parent: Some((key.clone(), m)) });
            if other.visited.contains_key(&nk) {
                return Some(nk);
            }
            side.frontier.push(nk);
        }
    }
    None
}

/// Breadth-first search for a sequence of at most `depth` moves turning `a`
/// into a diagram with the canonical form of `b`.
///
/// States are deduplicated by canonical form and the search grows from both
/// ends. Insertions are bounded by the larger crossing count plus
/// [`SEARCH_SLACK`]. With `forbid_pure`, no diagram on the path has a pure
/// crossing.
pub fn bounded_equivalence_search(
    a: &Diagram,
    b: &Diagram,
    depth: usize,
    opts: SearchOptions,
) -> Result<SearchVerdict, MoveError> {
    a.ensure_valid()?;
    b.ensure_valid()?;
    if a.num_components() != b.num_components() || a.kind() != b.kind() {
        return Err(MoveError::Mismatch(format!(
            "{} with {} components vs {} with {} components",
            a.kind(),
            a.num_components(),
            b.kind(),
            b.num_components()
        )));
    }
    let bound = a.num_crossings().max(b.num_crossings()) + SEARCH_SLACK;
    let (mut fwd, ka) = Side::new(a);
    let (mut bwd, kb) = Side::new(b);
    if ka == kb {
        return Ok(SearchVerdict::Equivalent(WalkTrace::empty(a)));
    }

    let mut meet = None;
    while fwd.depth + bwd.depth < depth && meet.is_none() {
        if fwd.frontier.is_empty() || bwd.frontier.is_empty() {
            break;
        }
        meet = if fwd.frontier.len() <= bwd.frontier.len() {
            expand(&mut fwd, &bwd, opts.forbid_pure, bound)
        } else {
            expand(&mut bwd, &fwd, opts.forbid_pure, bound)
        };
    }
    let Some(meet) = meet else {
        return Ok(SearchVerdict::Unknown);
    };

    let mut moves: Vec<MoveSite> = Vec::new();
    let fwd_chain = fwd.chain(&meet);
    for key in fwd_chain.iter().rev().skip(1) {
        let (_, m) = fwd.visited[key].parent.as_ref().expect("non-root node");
        moves.push(m.clone());
    }
    let mut cur = fwd.visited[&meet].diagram.clone();

    // The backward half was explored from `b`, so its moves are expressed in
    // other coordinates; redo each step from the current diagram.
    for next_key in bwd.chain(&meet).into_iter().skip(1) {
        let (m, next) = neighbors(&cur, opts.forbid_pure, bound)
            .into_iter()
            .find(|(_, next)| next.canonical_unchecked() == next_key)
            .ok_or(MoveError::TraceReconstruction)?;
        moves.push(m);
        cur = next;
    }

    Ok(SearchVerdict::Equivalent(WalkTrace { initial: a.clone(), moves, final_diagram: cur }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DiagramKind;

    fn t3() -> Diagram {
        Diagram::tangle(&["x y", "x z", "y z"]).unwrap()
    }

    fn check_trace(t: &WalkTrace, a: &Diagram, b: &Diagram) {
        assert_eq!(&t.initial, a);
        assert_eq!(t.replay().unwrap(), t.final_diagram);
        assert_eq!(t.final_diagram.canonical_form().unwrap(), b.canonical_form().unwrap());
    }

    #[test]
    fn reflexive() {
        let d = t3();
        let v = bounded_equivalence_search(&d, &d, 0, SearchOptions::default()).unwrap();
        assert_eq!(v, SearchVerdict::Equivalent(WalkTrace::empty(&d)));
    }

    #[test]
    fn r2_to_circle() {
        let a = Diagram::link(&["x y x y"]).unwrap();
        let b = Diagram::trivial(DiagramKind::Link, 1);
        let SearchVerdict::Equivalent(t) = bounded_equivalence_search(&a, &b, 1, SearchOptions::default()).unwrap()
        else {
            panic!("expected a trace");
        };
        assert_eq!(t.moves.len(), 1);
        check_trace(&t, &a, &b);
    }

    #[test]
    fn r3_image_forbid_pure() {
        let a = t3();
        let b = Diagram::tangle(&["y x", "z x", "z y"]).unwrap();
        let v = bounded_equivalence_search(&a, &b, 1, SearchOptions { forbid_pure: true }).unwrap();
        let SearchVerdict::Equivalent(t) = v else { panic!("expected a trace") };
        assert_eq!(t.moves.len(), 1);
        check_trace(&t, &a, &b);
    }

    #[test]
    fn backward_half_is_rebuilt() {
        // Two R2 insertions away from the trivial tangle, reached from the
        // trivial side first.
        let a = Diagram::trivial(DiagramKind::Tangle, 3);
        let b = Diagram::tangle(&["p q r s", "p q", "r s"]).unwrap();
        let v = bounded_equivalence_search(&a, &b, 2, SearchOptions { forbid_pure: true }).unwrap();
        let SearchVerdict::Equivalent(t) = v else { panic!("expected a trace") };
        assert_eq!(t.moves.len(), 2);
        check_trace(&t, &a, &b);
        let back = bounded_equivalence_search(&b, &a, 2, SearchOptions { forbid_pure: true }).unwrap();
        assert!(back.is_equivalent());
    }

    #[test]
    fn unknown_when_too_shallow() {
        let a = Diagram::tangle(&["a b d e", "a c f d", "b c e f"]).unwrap();
        let b = Diagram::trivial(DiagramKind::Tangle, 3);
        let v = bounded_equivalence_search(&a, &b, 2, SearchOptions { forbid_pure: true }).unwrap();
        assert_eq!(v, SearchVerdict::Unknown);
    }

    #[test]
    fn mismatched_components() {
        let a = Diagram::trivial(DiagramKind::Tangle, 2);
        let b = Diagram::trivial(DiagramKind::Tangle, 3);
        assert!(matches!(
            bounded_equivalence_search(&a, &b, 1, SearchOptions::default()),
            Err(MoveError::Mismatch(_))
        ));
    }
}
