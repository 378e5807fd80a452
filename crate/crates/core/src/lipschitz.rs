//! Stretching factors between points of Outer space.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::free_group::{CyclicWord, Letter, Word};
use crate::graph::{crossing_counts, enumerate_candidates, HalfEdge};
use crate::marked::{CVPoint, MarkedGraph};
use crate::rational::{weighted_sum, Rational};

/// A candidate loop of a simplex: its conjugacy class (up to inversion) and
/// the crossing counts of its tight realisation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Candidate {
    pub class: CyclicWord,
    pub counts: Vec<u64>,
}

/// Candidates of a marked graph, sorted by class.
pub fn candidate_table(m: &MarkedGraph) -> Vec<Candidate> {
    let n = m.graph().num_edges();
    let mut out: Vec<Candidate> = enumerate_candidates(m.graph())
        .into_iter()
        .map(|c| Candidate {
            class: m.read_loop(&c.path).unoriented(),
            counts: crossing_counts(c.path.edges(), n),
        })
        .collect();
    out.sort_by(|a, b| a.class.cmp(&b.class));
    out.dedup_by(|a, b| a.class == b.class);
    out
}

/// Candidate conjugacy classes of a simplex, up to inversion.
pub fn candidates_of(m: &MarkedGraph) -> Vec<CyclicWord> {
    candidate_table(m).into_iter().map(|c| c.class).collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StretchResult {
    pub value: Rational,
    pub witness: CyclicWord,
}

/// `Λ(x, y)`: the largest ratio `ℓ_y / ℓ_x` over candidates of `x`. The
/// witness is the least maximizing candidate.
pub fn stretch(x: &CVPoint, y: &CVPoint) -> Result<StretchResult> {
    check_pair(x, y)?;
    let mut best: Option<StretchResult> = None;
    for c in candidate_table(x.marked()) {
        let lx = weighted_sum(&c.counts, x.lengths());
        let ly = y.translation_length(&c.class);
        let value = ly / lx;
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(StretchResult {
                value,
                witness: c.class,
            });
        }
    }
    Ok(best.expect("every graph of positive rank has a candidate"))
}

fn check_pair(x: &CVPoint, y: &CVPoint) -> Result<()> {
    if x.rank() != y.rank() {
        return Err(Error::RankMismatch {
            expected: x.rank(),
            found: y.rank(),
        });
    }
    if !x.is_open() {
        return Err(Error::ZeroLengthEdge);
    }
    Ok(())
}

/// Supremum of `ℓ_y / ℓ_x` over all reduced loops of `x` with at most
/// `max_len` edges. Independent of candidate enumeration; a loop of `x`
/// is carried to `y` edge by edge and tightened incrementally.
///
/// Every candidate crosses at most `2·|E|` edges, so `max_len ≥ 2·|E|`
/// recovers [`stretch`] exactly.
pub fn stretch_bruteforce(x: &CVPoint, y: &CVPoint, max_len: usize) -> Result<Rational> {
    check_pair(x, y)?;
    let gx = x.graph();
    let images: Vec<Vec<HalfEdge>> = (0..2 * gx.num_edges())
        .map(|i| {
            let h = HalfEdge::new(i / 2, i % 2 == 1);
            y.marked().realize(&x.marked().read_path(&[h]))
        })
        .collect();
    let outgoing: Vec<Vec<HalfEdge>> = (0..gx.num_vertices()).map(|v| gx.outgoing(v)).collect();
    let mut search = LoopSearch {
        x,
        y,
        images: &images,
        outgoing: &outgoing,
        max_len,
        path: Vec::new(),
        ypath: Vec::new(),
        undo: Vec::new(),
        best: Rational::zero(),
    };
    for first in gx.half_edges() {
        search.descend(first, first);
    }
    Ok(search.best)
}

struct LoopSearch<'a> {
    x: &'a CVPoint,
    y: &'a CVPoint,
    images: &'a [Vec<HalfEdge>],
    outgoing: &'a [Vec<HalfEdge>],
    max_len: usize,
    path: Vec<HalfEdge>,
    ypath: Vec<HalfEdge>,
    undo: Vec<(usize, Vec<HalfEdge>)>,
    best: Rational,
}

impl LoopSearch<'_> {
    fn push(&mut self, h: HalfEdge) {
        self.path.push(h);
        let mut popped = Vec::new();
        let mut pushed = 0;
        for &k in &self.images[h.index()] {
            if pushed == 0 && self.ypath.last() == Some(&k.reverse()) {
                popped.push(self.ypath.pop().unwrap());
            } else if pushed > 0 && self.ypath.last() == Some(&k.reverse()) {
                self.ypath.pop();
                pushed -= 1;
            } else {
                self.ypath.push(k);
                pushed += 1;
            }
        }
        self.undo.push((pushed, popped));
    }

    fn pop(&mut self) {
        self.path.pop();
        let (pushed, popped) = self.undo.pop().unwrap();
        self.ypath.truncate(self.ypath.len() - pushed);
        self.ypath.extend(popped.into_iter().rev());
    }

    /// Extends the path by `h`; loops are only recorded from their least
    /// half-edge so each cyclic class is seen from few starting points.
    fn descend(&mut self, first: HalfEdge, h: HalfEdge) {
        let g = self.x.graph();
        self.push(h);
        if g.terminus(h) == g.origin(first) && h.reverse() != first {
            self.record();
        }
        if self.path.len() < self.max_len {
            let v = g.terminus(h);
            for i in 0..self.outgoing[v].len() {
                let next = self.outgoing[v][i];
                if next == h.reverse() || next.index() < first.index() {
                    continue;
                }
                self.descend(first, next);
            }
        }
        self.pop();
    }

    fn record(&mut self) {
        let n = self.ypath.len();
        let mut lo = 0;
        let mut hi = n;
        while hi - lo >= 2 && self.ypath[lo] == self.ypath[hi - 1].reverse() {
            lo += 1;
            hi -= 1;
        }
        let ly = self.y.path_length(&self.ypath[lo..hi]);
        let lx = self.x.path_length(&self.path);
        let ratio = ly / lx;
        if ratio > self.best {
            self.best = ratio;
        }
    }
}

/// Supremum of `ℓ_y / ℓ_x` over all cyclically reduced words of length at
/// most `max_len`. Exponential in `max_len`; meant for small tests.
pub fn stretch_bruteforce_words(x: &CVPoint, y: &CVPoint, max_len: usize) -> Result<Rational> {
    check_pair(x, y)?;
    let n = x.rank();
    let letters: Vec<Letter> = (0..n).map(Letter::gen).chain((0..n).map(Letter::gen_inv)).collect();
    let mut best = Rational::zero();
    let mut stack: Vec<Letter> = Vec::new();
    fn go(x: &CVPoint, y: &CVPoint, letters: &[Letter], stack: &mut Vec<Letter>, max_len: usize, best: &mut Rational) {
        if !stack.is_empty() && stack[0] != stack[stack.len() - 1].inverse() {
            let w = Word::from_letters(stack.iter().copied());
            let ratio = y.word_length(&w) / x.word_length(&w);
            if ratio > *best {
                *best = ratio;
            }
        }
        if stack.len() == max_len {
            return;
        }
        for &l in letters {
            if stack.last().is_some_and(|&p| p == l.inverse()) {
                continue;
            }
            stack.push(l);
            go(x, y, letters, stack, max_len, best);
            stack.pop();
        }
    }
    go(x, y, &letters, &mut stack, max_len, &mut best);
    Ok(best)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BallKind {
    Symmetric,
    In,
    Out,
}

/// Membership of `x` in the ball of radius `r` about `t`: `Λ(x,t)·Λ(t,x)`,
/// `Λ(x,t)` or `Λ(t,x)` at most `r`.
pub fn ball_membership(x: &CVPoint, t: &CVPoint, r: &Rational, kind: BallKind) -> Result<bool> {
    let value = match kind {
        BallKind::Symmetric => stretch(x, t)?.value * stretch(t, x)?.value,
        BallKind::In => stretch(x, t)?.value,
        BallKind::Out => stretch(t, x)?.value,
    };
    Ok(value <= *r)
}
