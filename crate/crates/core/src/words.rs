//! Words in the free product of `2^(n-2)` copies of Z2.
//!
//! For a pair of components `(i, j)` the generators are the maps
//! `{1..n} \ {i, j} -> Z2`, stored as bit-vectors indexed by the remaining
//! components in ascending order. Every generator is an involution, so a
//! word is reduced when no two adjacent letters coincide.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("words belong to different groups: {0} vs {1}")]
    MixedContexts(GroupContext, GroupContext),
    #[error("pair ({i},{j}) is not a pair of distinct components in 1..={n}")]
    BadPair { n: usize, i: usize, j: usize },
    #[error("component {l} is not a slide index of {ctx}")]
    NotASlideIndex { l: usize, ctx: GroupContext },
    #[error("letter has {got} bits, expected {want}")]
    LetterWidth { got: usize, want: usize },
    #[error("{0} components leave too many generators to enumerate")]
    TooWide(usize),
}

/// The group attached to components `i < j` of an `n`-component diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupContext {
    n: usize,
    i: usize,
    j: usize,
}

impl GroupContext {
    pub fn new(n: usize, i: usize, j: usize) -> Result<Self, WordError> {
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(WordError::BadPair { n, i, j });
        }
        if n - 2 > 62 {
            return Err(WordError::TooWide(n));
        }
        Ok(GroupContext { n, i: i.min(j), j: i.max(j) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// Number of bits in a letter, `n - 2`.
    pub fn width(&self) -> usize {
        self.n - 2
    }

    /// The slide indices `{1..n} \ {i, j}`, ascending.
    pub fn others(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n).filter(move |&k| k != self.i && k != self.j)
    }

    /// Bit position of component `k` inside a letter.
    pub fn rank(&self, k: usize) -> Option<usize> {
        self.others().position(|o| o == k)
    }

    /// Number of generators, `2^(n-2)`.
    pub fn num_generators(&self) -> u64 {
        1u64 << self.width()
    }
}

impl fmt::Display for GroupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G[n={}, ({},{})]", self.n, self.i, self.j)
    }
}

/// A generator: one bit per slide index, bit `r` for the `r`-th smallest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    width: u8,
    bits: u64,
}

impl Letter {
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = 0u64;
        for (r, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v |= 1 << r;
            }
        }
        Letter { width: bits.len() as u8, bits: v }
    }

    /// The letter whose [`Letter::index`] is `index`.
    pub fn from_index(width: usize, index: u64) -> Self {
        debug_assert!(width >= 64 || index < (1u64 << width));
        Letter { width: width as u8, bits: index }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn bit(&self, rank: usize) -> u8 {
        ((self.bits >> rank) & 1) as u8
    }

    /// Position of the free factor generated by this letter: bit `r`
    /// contributes `2^r`.
    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn flip(&self, rank: usize) -> Letter {
        Letter { width: self.width, bits: self.bits ^ (1 << rank) }
    }

    pub fn masked(&self, mask: u64) -> Letter {
        Letter { width: self.width, bits: self.bits ^ mask }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.width, self.bits).cmp(&(other.width, other.bits))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: Vec<String> = (0..self.width()).map(|r| self.bit(r).to_string()).collect();
        write!(f, "({})", bits.join(","))
    }
}

/// The index of a letter in the free product; see [`Letter::index`].
pub fn letter_index(x: &Letter) -> u64 {
    x.index()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    ctx: GroupContext,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(ctx: GroupContext, letters: Vec<Letter>) -> Result<Self, WordError> {
        if let Some(l) = letters.iter().find(|l| l.width() != ctx.width()) {
            return Err(WordError::LetterWidth { got: l.width(), want: ctx.width() });
        }
        Ok(Word { ctx, letters })
    }

    /// Convenience constructor from bit tuples.
    pub fn from_bits(ctx: GroupContext, letters: &[&[u8]]) -> Result<Self, WordError> {
        Word::new(ctx, letters.iter().map(|b| Letter::from_bits(b)).collect())
    }

    pub fn identity(ctx: GroupContext) -> Self {
        Word { ctx, letters: Vec::new() }
    }

    pub fn context(&self) -> GroupContext {
        self.ctx
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1])
    }

    fn same_context(&self, other: &Word) -> Result<(), WordError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(WordError::MixedContexts(self.ctx, other.ctx))
        }
    }

    /// Concatenation followed by reduction.
    pub fn mul(&self, other: &Word) -> Result<Word, WordError> {
        self.same_context(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(reduce(&Word { ctx: self.ctx, letters }))
    }

    /// Every letter is its own inverse.
    pub fn inverse(&self) -> Word {
        Word { ctx: self.ctx, letters: self.letters.iter().rev().copied().collect() }
    }

    /// Applies the slide automorphism for every bit set in `mask`.
    pub fn masked(&self, mask: u64) -> Word {
        Word { ctx: self.ctx, letters: self.letters.iter().map(|l| l.masked(mask)).collect() }
    }

    pub fn rotated(&self, by: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(by % self.letters.len());
        }
        Word { ctx: self.ctx, letters }
    }

    pub fn indices(&self) -> Vec<u64> {
        self.letters.iter().map(Letter::index).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("·"))
    }
}

/// Cancels adjacent equal letters until none remain.
pub fn reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for &l in &w.letters {
        if out.last() == Some(&l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word { ctx: w.ctx, letters: out }
}

/// Reduced word that is also reduced cyclically; conjugate to `w`.
pub fn cyclic_reduce(w: &Word) -> Word {
    let r = reduce(w);
    let letters = &r.letters;
    // In a reduced word, stripping equal ends never creates a new
    // adjacent cancellation.
    let (mut lo, mut hi) = (0, letters.len());
    while hi - lo >= 2 && letters[lo] == letters[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    Word { ctx: r.ctx, letters: letters[lo..hi].to_vec() }
}

fn is_rotation(a: &[Letter], b: &[Letter]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| a[r..].iter().chain(&a[..r]).eq(b.iter()))
}

pub fn conjugate_equal(u: &Word, v: &Word) -> Result<bool, WordError> {
    u.same_context(v)?;
    Ok(is_rotation(&cyclic_reduce(u).letters, &cyclic_reduce(v).letters))
}

/// Flips the bit of component `l` in every letter.
pub fn slide(w: &Word, l: usize) -> Result<Word, WordError> {
    let rank = w.ctx.rank(l).ok_or(WordError::NotASlideIndex { l, ctx: w.ctx })?;
    Ok(Word { ctx: w.ctx, letters: w.letters.iter().map(|x| x.flip(rank)).collect() })
}

fn masks(ctx: GroupContext) -> impl Iterator<Item = u64> {
    0..ctx.num_generators()
}

pub fn slide_conjugacy_equal(u: &Word, v: &Word) -> Result<bool, WordError> {
    u.same_context(v)?;
    let cu = cyclic_reduce(u);
    let cv = cyclic_reduce(v);
    if cu.len() != cv.len() {
        return Ok(false);
    }
    Ok(masks(u.ctx).any(|m| is_rotation(&cu.masked(m).letters, &cv.letters)))
}

/// Least rotation of a cyclically reduced word, by letter index.
fn least_rotation(w: &Word) -> Word {
    (0..w.len().max(1))
        .map(|r| w.rotated(r))
        .min_by(|a, b| a.indices().cmp(&b.indices()))
        .unwrap_or_else(|| w.clone())
}

/// Conjugacy representative of `w` after applying the slides in `mask`.
pub fn masked_representative(w: &Word, mask: u64) -> Word {
    least_rotation(&cyclic_reduce(&w.masked(mask)))
}

/// One representative per slide mask: `(mask, representative)` for every
/// `mask` in `0..2^(n-2)`.
pub fn slide_orbit(w: &Word) -> Vec<(u64, Word)> {
    masks(w.ctx).map(|m| (m, masked_representative(w, m))).collect()
}

/// Normal form of the class of `w` under slides and conjugation: the least
/// word, by letter index, among all rotations of all masked cyclic
/// reductions.
pub fn canonical_class_word(w: &Word) -> Word {
    let base = cyclic_reduce(w);
    masks(w.ctx)
        .map(|m| least_rotation(&base.masked(m)))
        .min_by(|a, b| a.indices().cmp(&b.indices()))
        .unwrap_or(base)
}
