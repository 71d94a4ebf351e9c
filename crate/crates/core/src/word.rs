//! Words over the signed alphabet: reduction, normal forms, cyclic
//! reduction and conjugacy classes.

use std::collections::{HashSet, VecDeque};
use std::ops::Deref;

use crate::error::{RaagError, Result};
use crate::graph::{Graph, Letter, VertexSet};

/// Longest word `conjugacy_canonical` accepts by default.
pub const DEFAULT_LENGTH_GUARD: usize = 64;

/// A sequence of letters. Not necessarily reduced; the graph operations
/// below decide what it means.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(x: Letter) -> Word {
        Word(vec![x])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    /// Formal inverse (reverse and invert every letter).
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| x.inverse()).collect())
    }

    pub fn concat(parts: &[&[Letter]]) -> Word {
        Word(parts.iter().flat_map(|p| p.iter().copied()).collect())
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Word {
        Word(v)
    }
}

/// A conjugacy class, held as its canonical cyclically reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicClass(Word);

impl CyclicClass {
    pub fn word(&self) -> &Word {
        &self.0
    }

    /// The translation length `ℓ`.
    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }
}

impl Graph {
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace()
            .map(|t| self.parse_letter(t))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn fmt_word(&self, w: &[Letter]) -> String {
        w.iter()
            .map(|&x| self.fmt_letter(x))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Cancels every `x ... x^-1` pair whose middle commutes with `x`.
    /// The output is reduced but not yet in normal form.
    fn cancel(&self, w: &[Letter]) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &x in w {
            let mut cancelled = false;
            for j in (0..out.len()).rev() {
                if out[j] == x.inverse() {
                    out.remove(j);
                    cancelled = true;
                    break;
                }
                if !self.letters_commute(out[j], x) {
                    break;
                }
            }
            if !cancelled {
                out.push(x);
            }
        }
        out
    }

    /// Lexicographic normal form of a reduced word: repeatedly emit the
    /// smallest letter that can be shuffled to the front.
    pub fn normal_form(&self, w: &[Letter]) -> Vec<Letter> {
        let mut rest = w.to_vec();
        let mut out = Vec::with_capacity(w.len());
        while !rest.is_empty() {
            let mut blocked = VertexSet::EMPTY;
            let mut best: Option<usize> = None;
            for (i, &x) in rest.iter().enumerate() {
                if !blocked.contains(x.vertex()) && best.is_none_or(|b| x < rest[b]) {
                    best = Some(i);
                }
                blocked = blocked.union(VertexSet::full(self.len()).difference(self.neighbours(x.vertex())));
                if blocked == VertexSet::full(self.len()) {
                    break;
                }
            }
            out.push(rest.remove(best.expect("first letter is always movable")));
        }
        out
    }

    /// Minimal-length representative in normal form.
    pub fn reduce(&self, w: &[Letter]) -> Word {
        Word(self.normal_form(&self.cancel(w)))
    }

    pub fn multiply(&self, parts: &[&[Letter]]) -> Word {
        self.reduce(&Word::concat(parts))
    }

    pub fn is_reduced(&self, w: &[Letter]) -> bool {
        self.cancel(w).len() == w.len()
    }

    /// Positions of letters that can be shuffled to the front.
    pub fn front_movable(&self, w: &[Letter]) -> Vec<usize> {
        let mut blocked = VertexSet::EMPTY;
        let mut out = Vec::new();
        for (i, &x) in w.iter().enumerate() {
            if !blocked.contains(x.vertex()) {
                out.push(i);
            }
            blocked = blocked.union(self.all_vertices().difference(self.neighbours(x.vertex())));
        }
        out
    }

    /// Positions of letters that can be shuffled to the back.
    pub fn back_movable(&self, w: &[Letter]) -> Vec<usize> {
        let rev: Vec<Letter> = w.iter().rev().copied().collect();
        let mut out: Vec<usize> = self
            .front_movable(&rev)
            .into_iter()
            .map(|i| w.len() - 1 - i)
            .collect();
        out.reverse();
        out
    }

    /// Strips conjugating pairs `x ... x^-1` (with `x` movable to the front
    /// and `x^-1` to the back) until none remain; returns the stripped
    /// prefix `p` and the core `c` with `w = p c p^-1`.
    pub fn peel(&self, w: &[Letter]) -> (Word, Word) {
        let mut core = self.reduce(w).0;
        let mut prefix = Vec::new();
        'outer: loop {
            let back = self.back_movable(&core);
            for i in self.front_movable(&core) {
                if let Some(&j) = back.iter().find(|&&j| core[j] == core[i].inverse()) {
                    prefix.push(core[i]);
                    core.remove(j.max(i));
                    core.remove(j.min(i));
                    continue 'outer;
                }
            }
            break;
        }
        (Word(prefix), Word(self.normal_form(&core)))
    }

    /// A cyclically reduced conjugate of `w` in normal form.
    pub fn cyclic_reduce(&self, w: &[Letter]) -> Word {
        self.peel(w).1
    }

    pub fn translation_length(&self, w: &[Letter]) -> usize {
        self.cyclic_reduce(w).len()
    }

    pub fn is_cyclically_reduced(&self, w: &[Letter]) -> bool {
        self.is_reduced(w) && self.translation_length(w) == w.len()
    }

    /// Generators appearing in a reduced representative.
    pub fn support(&self, w: &[Letter]) -> VertexSet {
        self.reduce(w).iter().map(|x| x.vertex()).collect()
    }

    /// Every normal form reachable from a cyclically reduced normal word by
    /// moving a front-movable letter to the back.
    pub fn cyclic_states(&self, w: &[Letter]) -> Vec<Vec<Letter>> {
        let start = self.normal_form(w);
        let mut seen: HashSet<Vec<Letter>> = HashSet::from([start.clone()]);
        let mut order = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            let mut tried = Vec::new();
            for i in self.front_movable(&s) {
                if tried.contains(&s[i]) {
                    continue;
                }
                tried.push(s[i]);
                let mut next = s.clone();
                let x = next.remove(i);
                next.push(x);
                let next = self.normal_form(&next);
                if seen.insert(next.clone()) {
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        order
    }

    pub fn conjugacy_canonical(&self, w: &[Letter]) -> Result<CyclicClass> {
        self.conjugacy_canonical_guarded(w, DEFAULT_LENGTH_GUARD)
    }

    /// Least word over the rotation-and-shuffle closure of the cyclic
    /// reduction of `w`.
    pub fn conjugacy_canonical_guarded(&self, w: &[Letter], guard: usize) -> Result<CyclicClass> {
        let core = self.cyclic_reduce(w);
        if core.len() > guard {
            return Err(RaagError::LengthGuard {
                len: core.len(),
                guard,
            });
        }
        let best = self
            .cyclic_states(&core)
            .into_iter()
            .min()
            .unwrap_or_default();
        Ok(CyclicClass(Word(best)))
    }

    pub fn are_conjugate(&self, u: &[Letter], v: &[Letter]) -> Result<bool> {
        self.are_conjugate_guarded(u, v, DEFAULT_LENGTH_GUARD)
    }

    pub fn are_conjugate_guarded(&self, u: &[Letter], v: &[Letter], guard: usize) -> Result<bool> {
        let (cu, cv) = (self.cyclic_reduce(u), self.cyclic_reduce(v));
        if cu.len() != cv.len() || self.support(&cu) != self.support(&cv) {
            return Ok(false);
        }
        Ok(self.conjugacy_canonical_guarded(&cu, guard)?
            == self.conjugacy_canonical_guarded(&cv, guard)?)
    }

    /// Conjugacy classes of every length in `1..=max_len`, ordered by
    /// length and then canonical word.
    pub fn classes_up_to(&self, max_len: usize) -> Vec<CyclicClass> {
        let mut found: Vec<CyclicClass> = Vec::new();
        let mut seen = HashSet::new();
        let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for x in self.all_letters().iter() {
                    let mut v = w.clone();
                    v.push(x);
                    if self.is_reduced(&v) {
                        next.push(v);
                    }
                }
            }
            for w in &next {
                let c = self
                    .conjugacy_canonical_guarded(w, usize::MAX)
                    .expect("unguarded");
                if !c.is_trivial() && c.length() <= max_len && seen.insert(c.clone()) {
                    found.push(c);
                }
            }
            layer = next;
        }
        found.sort_by(|a, b| (a.length(), a.word()).cmp(&(b.length(), b.word())));
        found
    }
}
