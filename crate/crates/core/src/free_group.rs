//! Words, conjugacy classes and automorphisms of the free group `F_N`.
//!
//! Generators are indexed from zero. A [`Letter`] is a generator or its
//! inverse; words are always kept freely reduced. Letters print as `a`..`z`
//! with upper case for inverses (`x27`/`X27` past the alphabet).

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A signed generator: `+(i + 1)` for `x_i`, `-(i + 1)` for its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter(i32);

impl Letter {
    pub fn gen(index: usize) -> Letter {
        Letter(index as i32 + 1)
    }

    pub fn gen_inv(index: usize) -> Letter {
        Letter(-(index as i32) - 1)
    }

    /// From the signed one-based encoding used by index lists.
    pub fn from_signed(value: i64, rank: usize) -> Result<Letter> {
        if value == 0 || value.unsigned_abs() as usize > rank {
            return Err(Error::LetterOutOfRange { letter: value, rank });
        }
        Ok(Letter(value as i32))
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize - 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    fn order_key(self) -> (bool, u32) {
        (self.0 < 0, self.0.unsigned_abs())
    }
}

/// Positive letters first, then by generator index.
impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.index();
        if i < 26 {
            let c = (b'a' + i as u8) as char;
            if self.is_inverse() {
                write!(f, "{}", c.to_ascii_uppercase())
            } else {
                write!(f, "{c}")
            }
        } else if self.is_inverse() {
            write!(f, "X{}", i + 1)
        } else {
            write!(f, "x{}", i + 1)
        }
    }
}

/// Appends `l` to a freely reduced buffer, cancelling if needed.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// Start index of the lexicographically least rotation (linear time).
pub(crate) fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        match s[(i + k) % n].cmp(&s[(j + k) % n]) {
            Ordering::Equal => k += 1,
            Ordering::Greater => {
                i += k + 1;
                if i <= j {
                    i = j + 1;
                }
                k = 0;
            }
            Ordering::Less => {
                j += k + 1;
                if j <= i {
                    j = i + 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Word {
        Word(vec![Letter::gen(index)])
    }

    /// Freely reduces a raw sequence of signed one-based generator indices.
    pub fn reduce(raw: &[i64], rank: usize) -> Result<Word> {
        let mut buf = Vec::with_capacity(raw.len());
        for &v in raw {
            push_reduced(&mut buf, Letter::from_signed(v, rank)?);
        }
        Ok(Word(buf))
    }

    /// Freely reduces a letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut buf = Vec::new();
        for l in letters {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|l| l.index()).max()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut buf = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut buf = Vec::new();
        for _ in 0..k.unsigned_abs() {
            for &l in &base.0 {
                push_reduced(&mut buf, l);
            }
        }
        Word(buf)
    }

    /// `self · w · self⁻¹`.
    pub fn conjugate(&self, w: &Word) -> Word {
        self.mul(w).mul(&self.inverse())
    }

    /// Splits the word as `conjugator · core · conjugator⁻¹` with the core
    /// cyclically reduced and stored in canonical rotation.
    pub fn cyclic_reduce(&self) -> (CyclicWord, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        let outer = Word(self.0[..k].to_vec());
        let inner = &self.0[k..n - k];
        let r = least_rotation(inner);
        // inner = s·t, canonical = t·s, inner = s·(t·s)·s⁻¹
        let rotated: Vec<Letter> = inner[r..].iter().chain(&inner[..r]).copied().collect();
        let conjugator = outer.mul(&Word(inner[..r].to_vec()));
        (CyclicWord(rotated), conjugator)
    }

    /// The conjugacy class of the word.
    pub fn conjugacy_class(&self) -> CyclicWord {
        self.cyclic_reduce().0
    }

    /// Parses a word such as `"a b A"`, `"abA"` or `"x1 X2"`; `"1"` is the
    /// empty word.
    pub fn parse(s: &str, rank: usize) -> Result<Word> {
        let mut raw = Vec::new();
        for token in s.split_whitespace() {
            if token == "1" {
                continue;
            }
            if let Some(rest) = token
                .strip_prefix(['x', 'X'])
                .filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()))
            {
                let idx: i64 = rest.parse().map_err(|_| Error::LetterOutOfRange { letter: 0, rank })?;
                raw.push(if token.starts_with('X') { -idx } else { idx });
                continue;
            }
            for c in token.chars() {
                if !c.is_ascii_alphabetic() {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("bad letter {c:?} in word {s:?}"),
                    });
                }
                let idx = (c.to_ascii_lowercase() as u8 - b'a') as i64 + 1;
                raw.push(if c.is_ascii_uppercase() { -idx } else { idx });
            }
        }
        Word::reduce(&raw, rank)
    }
}

fn fmt_letters(letters: &[Letter], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "1");
    }
    let spaced = letters.iter().any(|l| l.index() >= 26);
    for (i, l) in letters.iter().enumerate() {
        if spaced && i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(&self.0, f)
    }
}

/// A conjugacy class: a cyclically reduced word in least rotation.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn inverse(&self) -> CyclicWord {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect()).conjugacy_class()
    }

    /// The lesser of the class and its inverse.
    pub fn unoriented(&self) -> CyclicWord {
        let inv = self.inverse();
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(&self.0, f)
    }
}

/// An automorphism of `F_N` given by generator images together with the
/// images under its inverse.
///
/// Composition order: `phi.compose(&psi)` is "first `phi`, then `psi`" for
/// the right action on Outer space, so
/// `act(act(x, phi), psi) == act(x, phi.compose(&psi))`. As a map of words
/// it sends `w` to `phi(psi(w))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AutoPair {
    fwd: Vec<Word>,
    inv: Vec<Word>,
}

impl AutoPair {
    /// Checks that `inv` inverts `fwd` on every generator, both ways.
    pub fn new(fwd: Vec<Word>, inv: Vec<Word>) -> Result<AutoPair> {
        let rank = fwd.len();
        if inv.len() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: inv.len(),
            });
        }
        for w in fwd.iter().chain(&inv) {
            if let Some(i) = w.max_index() {
                if i >= rank {
                    return Err(Error::LetterOutOfRange {
                        letter: i as i64 + 1,
                        rank,
                    });
                }
            }
        }
        let pair = AutoPair { fwd, inv };
        for i in 0..rank {
            let x = Word::generator(i);
            if pair.apply_inverse(&pair.apply(&x)) != x || pair.apply(&pair.apply_inverse(&x)) != x {
                return Err(Error::NotInverse { generator: i });
            }
        }
        Ok(pair)
    }

    pub fn identity(rank: usize) -> AutoPair {
        let gens: Vec<Word> = (0..rank).map(Word::generator).collect();
        AutoPair {
            fwd: gens.clone(),
            inv: gens,
        }
    }

    /// Conjugation `x ↦ w x w⁻¹`.
    pub fn inner(w: &Word, rank: usize) -> AutoPair {
        let winv = w.inverse();
        AutoPair {
            fwd: (0..rank).map(|i| w.conjugate(&Word::generator(i))).collect(),
            inv: (0..rank).map(|i| winv.conjugate(&Word::generator(i))).collect(),
        }
    }

    /// `x_i ↦ x_i x_j^{±1}` (or `x_j^{±1} x_i` when `left`).
    pub fn nielsen(rank: usize, i: usize, j: usize, inverse: bool, left: bool) -> AutoPair {
        assert!(i != j && i < rank && j < rank);
        let xj = if inverse {
            Word(vec![Letter::gen_inv(j)])
        } else {
            Word::generator(j)
        };
        let xi = Word::generator(i);
        let mut fwd: Vec<Word> = (0..rank).map(Word::generator).collect();
        let mut inv = fwd.clone();
        if left {
            fwd[i] = xj.mul(&xi);
            inv[i] = xj.inverse().mul(&xi);
        } else {
            fwd[i] = xi.mul(&xj);
            inv[i] = xi.mul(&xj.inverse());
        }
        AutoPair { fwd, inv }
    }

    /// `x_i ↦ x_i⁻¹`.
    pub fn invert_generator(rank: usize, i: usize) -> AutoPair {
        let mut fwd: Vec<Word> = (0..rank).map(Word::generator).collect();
        fwd[i] = fwd[i].inverse();
        AutoPair { inv: fwd.clone(), fwd }
    }

    /// Swaps `x_i` and `x_j`.
    pub fn swap(rank: usize, i: usize, j: usize) -> AutoPair {
        let mut fwd: Vec<Word> = (0..rank).map(Word::generator).collect();
        fwd.swap(i, j);
        AutoPair { inv: fwd.clone(), fwd }
    }

    pub fn rank(&self) -> usize {
        self.fwd.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.fwd
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inv
    }

    pub fn inverse(&self) -> AutoPair {
        AutoPair {
            fwd: self.inv.clone(),
            inv: self.fwd.clone(),
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        substitute(&self.fwd, w)
    }

    pub fn apply_inverse(&self, w: &Word) -> Word {
        substitute(&self.inv, w)
    }

    /// First `self`, then `other` (see the type-level note on order).
    pub fn compose(&self, other: &AutoPair) -> AutoPair {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in compose");
        AutoPair {
            fwd: other.fwd.iter().map(|w| self.apply(w)).collect(),
            inv: self.inv.iter().map(|w| other.apply_inverse(w)).collect(),
        }
    }

    pub fn power(&self, k: i64) -> AutoPair {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = AutoPair::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// `Some(w)` when `self` is conjugation by `w`.
    pub fn is_inner(&self) -> Option<Word> {
        inner_conjugator(&self.fwd)
    }

    /// Whether `self` and `other` agree in `Out(F_N)`.
    pub fn outer_equal(&self, other: &AutoPair) -> bool {
        self.compose(&other.inverse()).is_inner().is_some()
    }
}

fn substitute(images: &[Word], w: &Word) -> Word {
    let mut buf = Vec::new();
    for &l in &w.0 {
        let img = &images[l.index()].0;
        if l.is_inverse() {
            for &m in img.iter().rev() {
                push_reduced(&mut buf, m.inverse());
            }
        } else {
            for &m in img {
                push_reduced(&mut buf, m);
            }
        }
    }
    Word(buf)
}

/// Finds `w` with `images[i] == w x_i w⁻¹` for every generator, if any.
///
/// `images[0]` must be a conjugate `u x_0 u⁻¹`; every such conjugator has the
/// form `u x_0^k`, and `k` is bounded by the length of `u⁻¹ images[1] u`.
pub fn inner_conjugator(images: &[Word]) -> Option<Word> {
    let rank = images.len();
    if rank == 0 {
        return Some(Word::empty());
    }
    let (core, u) = images[0].cyclic_reduce();
    if core.letters() != [Letter::gen(0)] {
        return None;
    }
    let x0 = Word::generator(0);
    let check = |w: &Word| (0..rank).all(|i| w.conjugate(&Word::generator(i)) == images[i]);
    if rank == 1 {
        return Some(u);
    }
    let v = u.inverse().mul(&images[1]).mul(&u);
    let bound = v.len() as i64 + 1;
    for m in 0..=bound {
        for k in if m == 0 { vec![0] } else { vec![m, -m] } {
            let w = u.mul(&x0.pow(k));
            if check(&w) {
                return Some(w);
            }
        }
    }
    None
}
