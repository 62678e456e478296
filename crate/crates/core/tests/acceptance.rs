//! Acceptance criteria, one line of output each.

use std::collections::HashSet;
use std::time::Instant;

use freelink::bracket::{bracket, bracket_equal, Verdict};
use freelink::generate::{random_diagram, random_good_diagram};
use freelink::invariant::{fingerprint, link_invariant, link_word};
use freelink::moves::{random_walk, WalkOptions};
use freelink::words::{
    canonical_class_word, conjugate_equal, cyclic_reduce, reduce, slide, slide_conjugacy_equal, slide_orbit,
    GroupContext, Letter, Word,
};
use freelink::{parse_diagram, Basepoint, Diagram, DiagramKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn t_star() -> Diagram {
    parse_diagram(&std::fs::read_to_string(fixture("tstar.fl")).unwrap()).unwrap()
}

fn worked_example() -> Outcome {
    let ctx = GroupContext::new(4, 1, 2).map_err(|e| e.to_string())?;
    let l = |a: u8, b: u8| Letter::from_bits(&[a, b]);
    let w = Word::new(ctx, vec![l(0, 0), l(0, 1), l(1, 1), l(0, 0)]).map_err(|e| e.to_string())?;
    let short = Word::new(ctx, vec![l(0, 1), l(1, 1)]).map_err(|e| e.to_string())?;
    let c = cyclic_reduce(&w);
    ensure(c == short, || format!("cyclic_reduce gave {c}"))?;
    let (cw, cs) = (canonical_class_word(&w), canonical_class_word(&short));
    ensure(cw == cs, || format!("class words differ: {cw} vs {cs}"))?;
    ensure(!cw.is_empty(), || "class word is empty".into())?;

    let link = parse_diagram(&std::fs::read_to_string(fixture("four_link.fl")).unwrap()).map_err(|e| e.to_string())?;
    let raw = link_word(&link, &(1..=4).map(|c| Basepoint { component: c, offset: 0 }).collect::<Vec<_>>(), 1, 2)
        .map_err(|e| e.to_string())?;
    ensure(raw == w, || format!("link word is {raw}"))?;
    let inv = link_invariant(&link, 1, 2).map_err(|e| e.to_string())?;
    ensure(inv == cs, || format!("link invariant is {inv}"))?;
    Ok(format!("{w} -> {c}, class {cw}, nonempty"))
}

fn tangle_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut starts = vec![t_star()];
    while starts.len() < 101 {
        starts.push(random_good_diagram(&mut rng, DiagramKind::Tangle, 5, 12));
    }
    let opts = WalkOptions { forbid_pure: true, max_size: 12 };
    let (mut moves, mut checks) = (0, 0);
    for (k, d) in starts.iter().enumerate() {
        let f0 = fingerprint(d).map_err(|e| e.to_string())?;
        let trace = random_walk(d, 20, 1000 + k as u64, opts).map_err(|e| e.to_string())?;
        moves += trace.moves.len();
        for (step, cur) in trace.diagrams().map_err(|e| e.to_string())?.iter().enumerate() {
            let f = fingerprint(cur).map_err(|e| format!("diagram {k} step {step}: {e}"))?;
            if let Some(((i, j, along), a, b)) = f0.first_difference(&f) {
                return Err(format!("diagram {k} step {step}: pair ({i},{j}) along {along}: {a} became {b}"));
            }
            checks += f.entries().count();
        }
    }
    ensure(moves >= 1000, || format!("only {moves} moves"))?;
    Ok(format!("{} tangles, {moves} moves, {checks} word comparisons, 0 failures", starts.len()))
}

fn random_basepoints<R: Rng>(rng: &mut R, d: &Diagram) -> Vec<Basepoint> {
    d.components()
        .iter()
        .enumerate()
        .map(|(c, code)| Basepoint { component: c + 1, offset: rng.gen_range(0..code.len().max(1)) })
        .collect()
}

fn basepoint_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checks = 0;
    for k in 0..60 {
        let d = random_good_diagram(&mut rng, DiagramKind::Link, 5, 12);
        let (b1, b2) = (random_basepoints(&mut rng, &d), random_basepoints(&mut rng, &d));
        let n = d.num_components();
        for i in 1..=n {
            for j in (1..=n).filter(|j| *j != i) {
                let u = link_word(&d, &b1, i, j).map_err(|e| e.to_string())?;
                let v = link_word(&d, &b2, i, j).map_err(|e| e.to_string())?;
                let same = slide_conjugacy_equal(&u, &v).map_err(|e| e.to_string())?;
                ensure(same, || format!("link {k}, pair ({i},{j}): {u} vs {v}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("60 links, {checks} word pairs slide-conjugate, 0 failures"))
}

fn bracket_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = WalkOptions { forbid_pure: false, max_size: 10 };
    let (mut total, mut unknown, mut by_depth) = (0, 0, [0usize; 5]);
    while total < 120 {
        let kind = if rng.gen_bool(0.5) { DiagramKind::Tangle } else { DiagramKind::Link };
        let d = random_diagram(&mut rng, kind, 3, 8);
        let trace = random_walk(&d, 1, rng.gen(), opts).map_err(|e| e.to_string())?;
        if trace.moves.is_empty() {
            continue;
        }
        total += 1;
        let p = bracket(&d).map_err(|e| e.to_string())?;
        let q = bracket(&trace.final_diagram).map_err(|e| e.to_string())?;
        let mut settled = false;
        for (depth, settled_here) in by_depth.iter_mut().enumerate() {
            match bracket_equal(&p, &q, depth).map_err(|e| e.to_string())? {
                Verdict::Equal { .. } => {
                    *settled_here += 1;
                    settled = true;
                    break;
                }
                Verdict::Distinct(c) => {
                    return Err(format!("distinct after {}: {c}\n{d}", trace.moves[0]));
                }
                Verdict::Unknown => {}
            }
        }
        if !settled {
            unknown += 1;
        }
    }
    let rate = unknown as f64 / total as f64;
    ensure(rate < 0.05, || format!("unknown rate {:.1}% ({unknown}/{total})", 100.0 * rate))?;
    Ok(format!(
        "{total} moves, equal at depth 0..4: {by_depth:?}, distinct 0, unknown {unknown} ({:.1}%)",
        100.0 * rate
    ))
}

fn degenerate_bracket() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 200 {
        let kind = if rng.gen_bool(0.5) { DiagramKind::Tangle } else { DiagramKind::Link };
        let d = if rng.gen_bool(0.5) {
            random_good_diagram(&mut rng, kind, 5, 12)
        } else {
            random_diagram(&mut rng, kind, 4, 10)
        };
        if d.has_pure_crossings() {
            continue;
        }
        let b = bracket(&d).map_err(|e| e.to_string())?;
        let canon = d.canonical_form().map_err(|e| e.to_string())?;
        ensure(b.summands() == [canon], || format!("bracket of {d} has {} summands", b.len()))?;
        checked += 1;
    }
    let circle = Diagram::trivial(DiagramKind::Link, 1);
    let kink = bracket(&Diagram::link(&["x x"]).unwrap()).map_err(|e| e.to_string())?;
    ensure(kink.summands() == [circle.clone()], || format!("<x x> gave {kink}"))?;
    let bigon = bracket(&Diagram::link(&["x y x y"]).unwrap()).map_err(|e| e.to_string())?;
    ensure(bigon.summands() == [circle], || format!("<x y x y> gave {bigon}"))?;
    ensure(bigon.kept_terms() == 3, || format!("<x y x y> kept {} terms", bigon.kept_terms()))?;
    Ok(format!(
        "{checked} pure-free diagrams give one summand; <x x> and <x y x y> give the circle ({} one-component terms, 2 cancel)",
        bigon.kept_terms()
    ))
}

/// Reduced words of length at most `max` over the generators of `ctx`.
fn short_reduced_words(ctx: GroupContext, max: usize) -> Vec<Word> {
    let gens: Vec<Letter> = (0..ctx.num_generators()).map(|g| Letter::from_index(ctx.width(), g)).collect();
    let mut all = vec![Word::identity(ctx)];
    let mut layer = vec![Vec::<Letter>::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for g in &gens {
                if w.last() != Some(g) {
                    let mut v = w.clone();
                    v.push(*g);
                    next.push(v);
                }
            }
        }
        all.extend(next.iter().map(|v| Word::new(ctx, v.clone()).unwrap()));
        layer = next;
    }
    all
}

fn conjugates(u: &Word, gs: &[Word]) -> HashSet<Word> {
    gs.iter().map(|g| reduce(&g.mul(u).unwrap().mul(&g.inverse()).unwrap())).collect()
}

fn random_word<R: Rng>(rng: &mut R, ctx: GroupContext, max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    let letters = (0..len).map(|_| Letter::from_index(ctx.width(), rng.gen_range(0..ctx.num_generators()))).collect();
    Word::new(ctx, letters).unwrap()
}

fn conjugacy_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tables: Vec<(GroupContext, Vec<Word>)> = (2..=4)
        .map(|n| {
            let ctx = GroupContext::new(n, 1, 2).unwrap();
            (ctx, short_reduced_words(ctx, 4))
        })
        .collect();
    let (mut positives, total) = (0, 10_000);
    for k in 0..total {
        let (ctx, gs) = &tables[rng.gen_range(0..tables.len())];
        let u = random_word(&mut rng, *ctx, 6);
        // Half the pairs are built conjugate, so both answers are exercised.
        let v = loop {
            let v = if rng.gen_bool(0.5) {
                let g = random_word(&mut rng, *ctx, 3);
                let v = g.mul(&u).unwrap().mul(&g.inverse()).unwrap();
                if rng.gen_bool(0.5) { reduce(&v) } else { v }
            } else {
                random_word(&mut rng, *ctx, 6)
            };
            if v.len() <= 6 {
                break v;
            }
        };
        let brute = !conjugates(&u, gs).is_disjoint(&conjugates(&v, gs));
        let fast = conjugate_equal(&u, &v).map_err(|e| e.to_string())?;
        ensure(brute == fast, || format!("pair {k}: {u} and {v}: oracle {brute}, conjugate_equal {fast}"))?;
        positives += brute as usize;
    }
    Ok(format!("{total} pairs agree ({positives} conjugate, {} not)", total - positives))
}

fn slide_orbits() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let n = rng.gen_range(2..=6);
        let i = rng.gen_range(1..=n);
        let j = (i + rng.gen_range(1..n) - 1) % n + 1;
        let ctx = GroupContext::new(n, i, j).unwrap();
        let w = random_word(&mut rng, ctx, 8);
        let orbit = slide_orbit(&w);
        let masks: Vec<u64> = orbit.iter().map(|(m, _)| *m).collect();
        let expected: Vec<u64> = (0..1u64 << (n - 2)).collect();
        ensure(masks == expected, || format!("{w}: masks {masks:?}"))?;
        let reps: HashSet<&Word> = orbit.iter().map(|(_, r)| r).collect();
        ensure(reps.len() <= 1 << (n - 2), || format!("{w}: {} representatives", reps.len()))?;
        for l in ctx.others() {
            let twice = slide(&slide(&w, l).unwrap(), l).unwrap();
            ensure(twice == w, || format!("{w}: slide by {l} twice gave {twice}"))?;
        }
    }
    Ok("2000 words: masks exactly 0..2^(n-2), slides are involutions".into())
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("freelink".to_string()).chain(args.iter().map(|a| a.to_string()));
    let code = freelink::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn end_to_end() -> Outcome {
    let (code, out) = run_cli(&["compare", &fixture("tstar.fl"), &fixture("trivial3.fl")]);
    ensure(code == 1, || format!("T* vs trivial exited {code}:\n{out}"))?;
    ensure(out.contains("certificate: pair (1,2) along 1: (0)·(1) vs 1"), || format!("T* vs trivial printed:\n{out}"))?;
    let (code, out) = run_cli(&["compare", &fixture("t3.fl"), &fixture("t3_r3.fl"), "--depth", "1"]);
    ensure(code == 0, || format!("T3 vs its image exited {code}:\n{out}"))?;
    ensure(out.starts_with("equal\ntrace moves=1\nR3 "), || format!("T3 vs its image printed:\n{out}"))?;
    Ok("T* vs trivial: exit 1, certificate (0)·(1); T3 vs R3 image: exit 0, one R3 move".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("worked example word and class", worked_example),
        ("tangle word invariance under random moves", tangle_fuzz),
        ("link word basepoint independence", basepoint_independence),
        ("bracket invariance under one move", bracket_invariance),
        ("bracket without pure crossings and small cases", degenerate_bracket),
        ("conjugacy test against brute force", conjugacy_oracle),
        ("slide orbits and slide involution", slide_orbits),
        ("compare end to end", end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} [{secs:.2}s]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.2}s]: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
