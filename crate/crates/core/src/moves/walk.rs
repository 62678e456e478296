use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    apply_site, enumerate_unchecked, fresh_names, pair_indices, pair_positions, MoveError, MoveFilter,
    MoveKind, MoveSite, PairSlot,
};
use crate::diagram::{CrossingId, Diagram};

#[derive(Clone, Copy, Debug)]
pub struct WalkOptions {
    pub forbid_pure: bool,
    /// Insertions never push the crossing count above this.
    pub max_size: usize,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions { forbid_pure: false, max_size: 12 }
    }
}

/// A sequence of moves together with its endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTrace {
    pub initial: Diagram,
    pub moves: Vec<MoveSite>,
    pub final_diagram: Diagram,
}

impl WalkTrace {
    pub fn empty(d: &Diagram) -> Self {
        WalkTrace { initial: d.clone(), moves: Vec::new(), final_diagram: d.clone() }
    }

    /// Every diagram along the trace, starting with `initial`.
    pub fn diagrams(&self) -> Result<Vec<Diagram>, MoveError> {
        let mut out = vec![self.initial.clone()];
        for m in &self.moves {
            let next = apply_site(out.last().expect("nonempty"), m)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Applies the moves to `initial` and returns the result.
    pub fn replay(&self) -> Result<Diagram, MoveError> {
        Ok(self.diagrams()?.pop().expect("nonempty"))
    }

    /// One move per line: `<kind> <crossings> <component>:<position>=<a>,<b> ...`.
    pub fn to_log(&self) -> String {
        self.moves.iter().map(|m| format!("{m}\n")).collect()
    }
}

/// Parses the output of [`WalkTrace::to_log`]. Blank lines and `#` comments
/// are skipped.
pub fn parse_log(text: &str) -> Result<Vec<MoveSite>, MoveError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let err = |message: String| MoveError::Log { line: ln + 1, message };
        let line = raw.split('#').next().unwrap_or("");
        let mut toks = line.split_whitespace();
        let Some(kind_tok) = toks.next() else { continue };
        let kind = MoveKind::from_name(kind_tok).ok_or_else(|| err(format!("unknown move `{kind_tok}`")))?;
        let mut ids = Vec::new();
        let mut pairs = Vec::new();
        for t in toks {
            match t.split_once(':') {
                None => {
                    if !pairs.is_empty() {
                        return Err(err(format!("crossing `{t}` after positions")));
                    }
                    ids.push(CrossingId::from(t));
                }
                Some((c, rest)) => {
                    let (p, letters) = rest.split_once('=').ok_or_else(|| err(format!("expected `c:p=a,b`, got `{t}`")))?;
                    let (a, b) = letters.split_once(',').ok_or_else(|| err(format!("expected `a,b` in `{t}`")))?;
                    let component = c.parse().map_err(|_| err(format!("bad component in `{t}`")))?;
                    let position = p.parse().map_err(|_| err(format!("bad position in `{t}`")))?;
                    pairs.push(PairSlot::new(component, position, CrossingId::from(a), CrossingId::from(b)));
                }
            }
        }
        let m = MoveSite { kind, pairs };
        if m.crossings() != ids {
            return Err(err("crossing list does not match the pairs".into()));
        }
        m.check_shape().map_err(|e| err(e.to_string()))?;
        out.push(m);
    }
    Ok(out)
}

fn random_position<R: Rng>(rng: &mut R, len: usize, closed: bool) -> Option<usize> {
    let r = pair_positions(len, closed);
    (!r.is_empty()).then(|| rng.gen_range(r))
}

fn sample_r1<R: Rng>(rng: &mut R, d: &Diagram) -> Option<MoveSite> {
    let ci = rng.gen_range(0..d.num_components());
    let comp = &d.components()[ci];
    let pos = random_position(rng, comp.len() + 2, comp.closed)?;
    let x = fresh_names(d, 1).pop()?;
    Some(MoveSite::r1_insert(ci + 1, pos, x))
}

fn sample_r2<R: Rng>(rng: &mut R, d: &Diagram, forbid_pure: bool) -> Option<MoveSite> {
    let n = d.num_components();
    let c1 = rng.gen_range(0..n);
    let c2 = rng.gen_range(0..n);
    if forbid_pure && c1 == c2 {
        return None;
    }
    let names = fresh_names(d, 2);
    let reversed = rng.gen_bool(0.5);
    let (comp1, comp2) = (&d.components()[c1], &d.components()[c2]);
    let (p1, p2) = if c1 == c2 {
        let new_len = comp1.len() + 4;
        let p1 = random_position(rng, new_len, comp1.closed)?;
        let p2 = random_position(rng, new_len, comp1.closed)?;
        let (a1, b1) = pair_indices(new_len, comp1.closed, p1)?;
        let (a2, b2) = pair_indices(new_len, comp1.closed, p2)?;
        if [a2, b2].iter().any(|i| *i == a1 || *i == b1) {
            return None;
        }
        (p1, p2)
    } else {
        (
            random_position(rng, comp1.len() + 2, comp1.closed)?,
            random_position(rng, comp2.len() + 2, comp2.closed)?,
        )
    };
    Some(MoveSite::r2_insert((c1 + 1, p1), (c2 + 1, p2), names[0].clone(), names[1].clone(), reversed))
}

const INSERT_ATTEMPTS: usize = 32;

/// Applies `steps` random moves chosen with a generator seeded by `seed`.
///
/// Each step first picks a move kind uniformly among those currently
/// available, then a site of that kind uniformly. Insertions are sampled at
/// random positions; they are dropped when they would exceed
/// `opts.max_size` crossings, and under `opts.forbid_pure` every move whose
/// result has a pure crossing is dropped, which rules out first moves and
/// second moves of a component with itself. The walk ends early when no move
/// is available.
pub fn random_walk(d: &Diagram, steps: usize, seed: u64, opts: WalkOptions) -> Result<WalkTrace, MoveError> {
    d.ensure_valid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut moves = Vec::with_capacity(steps);

    let filter = MoveFilter { forbid_pure: opts.forbid_pure, ..Default::default() };
    'steps: for _ in 0..steps {
        let sites = enumerate_unchecked(&cur, &filter);
        let size = cur.num_crossings();
        let n = cur.num_components();

        let mut kinds: Vec<MoveKind> = [MoveKind::R1Delete, MoveKind::R2Delete, MoveKind::R3]
            .into_iter()
            .filter(|k| sites.iter().any(|s| s.kind == *k))
            .collect();
        if n > 0 && !opts.forbid_pure && size < opts.max_size {
            kinds.push(MoveKind::R1Insert);
        }
        if size + 2 <= opts.max_size && (n >= 2 || (n == 1 && !opts.forbid_pure)) {
            kinds.push(MoveKind::R2Insert);
        }

        loop {
            if kinds.is_empty() {
                break 'steps;
            }
            let k = rng.gen_range(0..kinds.len());
            let chosen = match kinds[k] {
                MoveKind::R1Insert | MoveKind::R2Insert => (0..INSERT_ATTEMPTS).find_map(|_| {
                    let m = if kinds[k] == MoveKind::R1Insert {
                        sample_r1(&mut rng, &cur)
                    } else {
                        sample_r2(&mut rng, &cur, opts.forbid_pure)
                    }?;
                    let next = apply_site(&cur, &m).ok()?;
                    (!opts.forbid_pure || !next.has_pure_crossings()).then_some((m, next))
                }),
                kind => {
                    let of_kind: Vec<&MoveSite> = sites.iter().filter(|s| s.kind == kind).collect();
                    let m = (*of_kind.choose(&mut rng).expect("kind has sites")).clone();
                    let next = apply_site(&cur, &m)?;
                    Some((m, next))
                }
            };
            match chosen {
                Some((m, next)) => {
                    moves.push(m);
                    cur = next;
                    break;
                }
                None => {
                    kinds.remove(k);
                }
            }
        }
    }

    Ok(WalkTrace { initial: d.clone(), moves, final_diagram: cur })
}
