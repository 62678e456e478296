//! Random diagrams for fuzzing and property tests.

use rand::Rng;

use crate::diagram::{ComponentCode, CrossingId, Diagram, DiagramKind};

fn insert_pass<R: Rng>(rng: &mut R, comp: &mut Vec<CrossingId>, x: &CrossingId) {
    let at = rng.gen_range(0..=comp.len());
    comp.insert(at, x.clone());
}

fn build(kind: DiagramKind, comps: Vec<Vec<CrossingId>>) -> Diagram {
    let closed = kind == DiagramKind::Link;
    Diagram::from_components(kind, comps.into_iter().map(|passes| ComponentCode { closed, passes }).collect())
}

/// A diagram in good condition without pure crossings, with 2 to
/// `max_components` components and at most `max_crossings` crossings.
///
/// Crossings are added two at a time, both of one random mixed type, each
/// pass at a uniform position of its component.
pub fn random_good_diagram<R: Rng>(rng: &mut R, kind: DiagramKind, max_components: usize, max_crossings: usize) -> Diagram {
    assert!(max_components >= 2);
    let n = rng.gen_range(2..=max_components);
    let mut comps: Vec<Vec<CrossingId>> = vec![Vec::new(); n];
    let pairs = rng.gen_range(0..=max_crossings / 2);
    for k in 0..pairs {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        for x in [CrossingId::new(format!("c{}", 2 * k + 1)), CrossingId::new(format!("c{}", 2 * k + 2))] {
            insert_pass(rng, &mut comps[i], &x);
            insert_pass(rng, &mut comps[j], &x);
        }
    }
    build(kind, comps)
}

/// A diagram with 1 to `max_components` components and at most
/// `max_crossings` crossings; each pass goes to a uniform component.
pub fn random_diagram<R: Rng>(rng: &mut R, kind: DiagramKind, max_components: usize, max_crossings: usize) -> Diagram {
    let n = rng.gen_range(1..=max_components);
    let m = rng.gen_range(0..=max_crossings);
    let mut comps: Vec<Vec<CrossingId>> = vec![Vec::new(); n];
    for k in 0..m {
        let x = CrossingId::new(format!("c{}", k + 1));
        for _ in 0..2 {
            let c = rng.gen_range(0..n);
            insert_pass(rng, &mut comps[c], &x);
        }
    }
    build(kind, comps)
}
