use std::collections::BTreeMap;

use freelink::bracket::{bracket, splice_all, SpliceBranch, SpliceChoice};
use freelink::generate::{random_diagram, random_good_diagram};
use freelink::invariant::{fingerprint, lk_vector, word_invariant};
use freelink::moves::{apply_move, enumerate_insertions, enumerate_moves, random_walk, MoveFilter, MoveKind, WalkOptions};
use freelink::words::{canonical_class_word, conjugate_equal, cyclic_reduce, reduce, slide, GroupContext, Letter, Word};
use freelink::{ComponentCode, CrossingId, Diagram, DiagramKind, Violation};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kind_of(link: bool) -> DiagramKind {
    if link {
        DiagramKind::Link
    } else {
        DiagramKind::Tangle
    }
}

fn any_diagram(seed: u64, link: bool) -> Diagram {
    random_diagram(&mut ChaCha8Rng::seed_from_u64(seed), kind_of(link), 3, 7)
}

fn good_diagram(seed: u64, link: bool) -> Diagram {
    random_good_diagram(&mut ChaCha8Rng::seed_from_u64(seed), kind_of(link), 5, 10)
}

/// Renames crossings, rotates and reverses closed components.
fn scramble(d: &Diagram, seed: u64) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<CrossingId> = d.crossings().into_iter().collect();
    names.shuffle(&mut rng);
    let rename: BTreeMap<CrossingId, CrossingId> =
        names.into_iter().enumerate().map(|(k, x)| (x, CrossingId::new(format!("q{k}")))).collect();
    let comps = d
        .components()
        .iter()
        .map(|c| {
            let mut passes: Vec<CrossingId> = c.passes.iter().map(|x| rename[x].clone()).collect();
            if c.closed && !passes.is_empty() {
                let r = rng.gen_range(0..passes.len());
                passes.rotate_left(r);
                if rng.gen_bool(0.5) {
                    passes.reverse();
                }
            }
            ComponentCode { closed: c.closed, passes }
        })
        .collect();
    Diagram::from_components(d.kind(), comps)
}

fn word_strategy() -> impl Strategy<Value = Word> {
    (2usize..=5, proptest::collection::vec(any::<u64>(), 0..10)).prop_map(|(n, raw)| {
        let ctx = GroupContext::new(n, 1, n).unwrap();
        let letters = raw.iter().map(|r| Letter::from_index(ctx.width(), r % ctx.num_generators())).collect();
        Word::new(ctx, letters).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn display_parse_round_trip(seed in any::<u64>(), link in any::<bool>()) {
        let d = any_diagram(seed, link);
        prop_assert_eq!(d.to_string().parse::<Diagram>().unwrap(), d);
    }

    #[test]
    fn canonical_form_ignores_presentation(seed in any::<u64>(), link in any::<bool>(), s in any::<u64>()) {
        let d = any_diagram(seed, link);
        let c = d.canonical_form().unwrap();
        prop_assert_eq!(scramble(&d, s).canonical_form().unwrap(), c.clone());
        prop_assert_eq!(c.canonical_form().unwrap(), c);
    }

    #[test]
    fn moves_are_undone_by_their_inverse(seed in any::<u64>(), link in any::<bool>()) {
        let d = any_diagram(seed, link);
        let filter = MoveFilter { forbid_pure: false, kinds: MoveKind::ALL.into_iter().collect() };
        let sites = enumerate_moves(&d, &filter).unwrap();
        for m in sites.iter().chain(&enumerate_insertions(&d, false, 9)) {
            let e = apply_move(&d, m).unwrap();
            prop_assert_eq!(apply_move(&e, &m.inverse()).unwrap(), d.clone());
        }
    }

    #[test]
    fn parities_survive_walks(seed in any::<u64>(), link in any::<bool>()) {
        let d = any_diagram(seed, link);
        let t = random_walk(&d, 30, seed, WalkOptions { forbid_pure: false, max_size: 10 }).unwrap();
        for e in t.diagrams().unwrap() {
            prop_assert_eq!(e.parity_table(), d.parity_table());
            prop_assert_eq!(e.num_components(), d.num_components());
        }
    }

    #[test]
    fn second_move_pairs_share_letters(seed in any::<u64>()) {
        let d = good_diagram(seed, false);
        for m in enumerate_insertions(&d, true, d.num_crossings() + 2) {
            let e = apply_move(&d, &m).unwrap();
            let [x, y] = m.pairs[0].letters.clone();
            prop_assert_eq!(lk_vector(&e, &x).unwrap(), lk_vector(&e, &y).unwrap());
        }
    }

    #[test]
    fn fingerprints_survive_forbid_pure_walks(seed in any::<u64>(), link in any::<bool>()) {
        let d = good_diagram(seed, link);
        let f = fingerprint(&d).unwrap();
        let t = random_walk(&d, 15, seed, WalkOptions { forbid_pure: true, max_size: 12 }).unwrap();
        for e in t.diagrams().unwrap() {
            prop_assert_eq!(fingerprint(&e).unwrap(), f.clone());
        }
    }

    #[test]
    fn two_component_words_are_trivial(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_good_diagram(&mut rng, DiagramKind::Tangle, 2, 12);
        prop_assert!(word_invariant(&d, 1, 2).unwrap().is_empty());
        prop_assert!(word_invariant(&d, 2, 1).unwrap().is_empty());
    }

    #[test]
    fn splices_commute(seed in any::<u64>(), link in any::<bool>(), order in any::<u64>()) {
        let d = any_diagram(seed, link);
        let mut rng = ChaCha8Rng::seed_from_u64(order);
        let mut choices: Vec<SpliceChoice> = d
            .pure_crossings()
            .into_iter()
            .filter_map(|x| {
                let branch = if rng.gen_bool(0.5) { SpliceBranch::A } else { SpliceBranch::B };
                rng.gen_bool(0.7).then_some(SpliceChoice { crossing: x, branch })
            })
            .collect();
        let first = splice_all(&d, &choices).unwrap();
        // Split-off circles are closed even in a tangle, so only arity is checked.
        let only_kind = first.validate().iter().all(|v| matches!(v, Violation::Kind { .. }));
        prop_assert!(only_kind);
        prop_assert!(first.num_components() >= d.num_components());
        choices.shuffle(&mut rng);
        prop_assert_eq!(splice_all(&d, &choices).unwrap(), first);
    }

    #[test]
    fn bracket_summands_are_well_formed(seed in any::<u64>(), link in any::<bool>()) {
        let d = any_diagram(seed, link);
        let b = bracket(&d).unwrap();
        prop_assert!(b.len() <= 1 << d.pure_crossings().len());
        for s in b.summands() {
            prop_assert!(!s.has_pure_crossings());
            prop_assert_eq!(s.num_components(), d.num_components());
            prop_assert_eq!(s.canonical_form().unwrap(), s.clone());
        }
        prop_assert_eq!(bracket(&scramble(&d, seed)).unwrap(), b);
    }

    #[test]
    fn reduction_is_idempotent(w in word_strategy()) {
        let r = reduce(&w);
        prop_assert!(r.is_reduced());
        prop_assert_eq!(reduce(&r), r.clone());
        prop_assert_eq!(reduce(&w.mul(&w.inverse()).unwrap()), Word::identity(w.context()));
        let c = cyclic_reduce(&w);
        prop_assert!(conjugate_equal(&c, &w).unwrap());
    }

    #[test]
    fn class_word_is_a_class_invariant(w in word_strategy(), g in word_strategy(), l in 0usize..8) {
        let ctx = w.context();
        let g = Word::new(ctx, g.letters().iter().map(|x| Letter::from_index(ctx.width(), x.index() % ctx.num_generators())).collect()).unwrap();
        let conj = g.mul(&w).unwrap().mul(&g.inverse()).unwrap();
        prop_assert_eq!(canonical_class_word(&conj), canonical_class_word(&w));
        let others: Vec<usize> = ctx.others().collect();
        if !others.is_empty() {
            let slid = slide(&w, others[l % others.len()]).unwrap();
            prop_assert_eq!(canonical_class_word(&slid), canonical_class_word(&w));
        }
    }
}
