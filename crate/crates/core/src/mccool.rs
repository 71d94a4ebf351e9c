//! Lexicographic norm, constraint-passing Whitehead moves, greedy peak
//! reduction and the orbit-equivalence search.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::automorphism::{validate_permutation, Automorphism, Generator};
use crate::error::{RaagError, Result};
use crate::graph::{Graph, Letter, Vertex, VertexSet};
use crate::partition::{based_partitions, BasedPartition};
use crate::word::{CyclicClass, Word};
use crate::Verdict;

pub const DEFAULT_TAIL_LEN: usize = 2;
pub const DEFAULT_STATE_CAP: usize = 100_000;
/// Length guard for canonical forms computed inside the engine, where
/// tuples are pulled back by long markings.
pub const ENGINE_GUARD: usize = 4096;
/// Largest ball searched for a common conjugator.
pub const CONJUGATOR_BALL_CAP: usize = 50_000;

/// Stabilized standard subgroups `G`, fixed classes `H`, and the norm tail.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintFamily {
    pub stabilized: Vec<VertexSet>,
    /// Cyclically reduced representatives of the fixed classes.
    pub fixed: Vec<Word>,
    pub tail_max_length: usize,
}

impl ConstraintFamily {
    pub fn new(g: &Graph, stabilized: Vec<VertexSet>, fixed: &[Word]) -> ConstraintFamily {
        ConstraintFamily {
            stabilized,
            fixed: fixed.iter().map(|w| g.cyclic_reduce(w)).collect(),
            tail_max_length: DEFAULT_TAIL_LEN,
        }
    }

    pub fn unconstrained() -> ConstraintFamily {
        ConstraintFamily {
            tail_max_length: DEFAULT_TAIL_LEN,
            ..ConstraintFamily::default()
        }
    }

    pub fn with_tail(mut self, len: usize) -> ConstraintFamily {
        self.tail_max_length = len;
        self
    }
}

/// A marked Salvetti `[S, marking]` with the norm tuple pulled back.
#[derive(Clone, Debug)]
pub struct SalvettiState {
    pub marking: Automorphism,
    /// `marking^-1` of the fixed classes followed by the targets,
    /// cyclically reduced.
    pub pulled: Vec<Word>,
    tail: OnceLock<Vec<Word>>,
}

impl SalvettiState {
    fn new(marking: Automorphism, pulled: Vec<Word>) -> SalvettiState {
        SalvettiState {
            marking,
            pulled,
            tail: OnceLock::new(),
        }
    }

    pub fn head(&self) -> Vec<usize> {
        self.pulled.iter().map(|w| w.len()).collect()
    }
}

/// The norm, head first; the tail covers every class up to the tail length.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NormView {
    pub head: Vec<usize>,
    pub tail: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Step {
    pub partition: BasedPartition,
    pub head: Vec<usize>,
    pub tail: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Minimization {
    pub state: SalvettiState,
    pub start: NormView,
    pub trace: Vec<Step>,
}

#[derive(Clone, Debug)]
pub enum Equivalence {
    Equivalent {
        certificate: Automorphism,
        /// Level moves between the two minimal states.
        level_path: Vec<BasedPartition>,
        explored: usize,
    },
    /// Minimal heads differ (or the level search was exhausted); only
    /// meaningful relative to the configured tail length.
    Inequivalent {
        head_a: Vec<usize>,
        head_b: Vec<usize>,
        tail_window: usize,
    },
    Undecided { explored: usize, cap: usize },
}

pub struct Engine<'g> {
    g: &'g Graph,
    family: ConstraintFamily,
    moves: Vec<BasedPartition>,
    /// Involutions, so markings and pulled tuples move by the same `W`.
    whitehead: Vec<Automorphism>,
    tail_classes: Vec<Word>,
    permutations: Vec<Vec<Letter>>,
    pub state_cap: usize,
}

impl<'g> Engine<'g> {
    pub fn new(g: &'g Graph, family: ConstraintFamily) -> Engine<'g> {
        let moves: Vec<BasedPartition> = based_partitions(g)
            .into_iter()
            .filter(|bp| bp.relative_condition(&family.stabilized))
            .collect();
        let whitehead: Vec<Automorphism> = moves
            .iter()
            .map(|bp| Automorphism::whitehead(g, bp).expect("enumerated partitions are valid"))
            .collect();
        let tail_classes = g
            .classes_up_to(family.tail_max_length)
            .into_iter()
            .map(|c| c.word().clone())
            .collect();
        let permutations = signed_automorphisms(g)
            .into_iter()
            .filter(|p| {
                family.stabilized.iter().all(|&d| {
                    d.iter().map(|v| p[v.index()].vertex()).collect::<VertexSet>() == d
                })
            })
            .collect();
        Engine {
            g,
            family,
            moves,
            whitehead,
            tail_classes,
            permutations,
            state_cap: DEFAULT_STATE_CAP,
        }
    }

    pub fn with_state_cap(mut self, cap: usize) -> Engine<'g> {
        self.state_cap = cap;
        self
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    pub fn family(&self) -> &ConstraintFamily {
        &self.family
    }

    /// Based partitions whose Whitehead automorphisms pass the relative
    /// condition, in canonical order.
    pub fn moves(&self) -> &[BasedPartition] {
        &self.moves
    }

    /// Signed graph automorphisms preserving every stabilized subgroup.
    pub fn permutations(&self) -> &[Vec<Letter>] {
        &self.permutations
    }

    /// Untwisted generators of the McCool group: constraint-passing
    /// Whitehead automorphisms, inversions and admissible permutations,
    /// keeping those that fix every class of `H`.
    pub fn admissible_generators(&self) -> Vec<Generator> {
        let mut out: Vec<Generator> = self.moves.iter().map(|bp| Generator::Whitehead(*bp)).collect();
        out.extend(self.g.vertices().map(Generator::Inversion));
        out.extend(
            self.permutations
                .iter()
                .filter(|p| p.iter().enumerate().any(|(i, x)| x.vertex().index() != i))
                .map(|p| Generator::Permutation(p.clone())),
        );
        out.retain(|gen| {
            let a = Automorphism::from_generator(self.g, gen).expect("admissible generators are valid");
            self.family.fixed.iter().all(|h| {
                self.g
                    .are_conjugate_guarded(&a.apply(self.g, h), h, ENGINE_GUARD)
                    .unwrap_or(false)
            })
        });
        out
    }

    fn full_tuple(&self, targets: &[Word]) -> Vec<Word> {
        self.family
            .fixed
            .iter()
            .chain(targets)
            .map(|w| self.g.cyclic_reduce(w))
            .collect()
    }

    pub fn initial(&self, targets: &[Word]) -> SalvettiState {
        SalvettiState::new(Automorphism::identity(self.g), self.full_tuple(targets))
    }

    fn tail_words<'s>(&self, s: &'s SalvettiState) -> &'s [Word] {
        s.tail.get_or_init(|| {
            self.tail_classes
                .iter()
                .map(|c| self.g.cyclic_reduce(&s.marking.apply_inverse(self.g, c)))
                .collect()
        })
    }

    pub fn norm(&self, s: &SalvettiState) -> NormView {
        NormView {
            head: s.head(),
            tail: self.tail_words(s).iter().map(|w| w.len()).collect(),
        }
    }

    fn push(&self, i: usize, words: &[Word]) -> Vec<Word> {
        words
            .iter()
            .map(|w| self.g.cyclic_reduce(&self.whitehead[i].apply(self.g, w)))
            .collect()
    }

    fn successor(&self, s: &SalvettiState, i: usize) -> SalvettiState {
        let marking = s
            .marking
            .compose(self.g, &self.whitehead[i])
            .expect("same graph");
        let next = SalvettiState::new(marking, self.push(i, &s.pulled));
        if let Some(t) = s.tail.get() {
            let _ = next.tail.set(self.push(i, t));
        }
        next
    }

    /// Every constraint-passing Whitehead move with its successor state.
    pub fn neighbor_moves(&self, s: &SalvettiState) -> Vec<(BasedPartition, SalvettiState)> {
        (0..self.moves.len())
            .into_par_iter()
            .map(|i| (self.moves[i], self.successor(s, i)))
            .collect()
    }

    /// Moves whose successor norm is strictly smaller.
    pub fn reductive_moves(&self, s: &SalvettiState) -> Vec<(BasedPartition, SalvettiState)> {
        let here = self.norm(s);
        self.neighbor_moves(s)
            .into_iter()
            .filter(|(_, t)| self.norm(t) < here)
            .collect()
    }

    /// Index of the best reductive move: smallest successor norm, ties to
    /// the earliest move in canonical order.
    fn best_reductive(&self, s: &SalvettiState) -> Option<(usize, Vec<Word>, Vec<Word>)> {
        let head = s.head();
        let heads: Vec<Vec<Word>> = (0..self.moves.len())
            .into_par_iter()
            .map(|i| self.push(i, &s.pulled))
            .collect();
        let lens = |ws: &[Word]| ws.iter().map(|w| w.len()).collect::<Vec<_>>();
        let min_head = heads.iter().map(|h| lens(h)).min()?;
        if min_head > head {
            return None;
        }
        let tied: Vec<usize> = (0..heads.len()).filter(|&i| lens(&heads[i]) == min_head).collect();
        let tails: Vec<(usize, Vec<Word>)> = if tied.len() == 1 && min_head < head {
            vec![(tied[0], Vec::new())]
        } else {
            let base = self.tail_words(s);
            tied.par_iter().map(|&i| (i, self.push(i, base))).collect()
        };
        let (i, tail) = tails
            .into_iter()
            .min_by(|a, b| lens(&a.1).cmp(&lens(&b.1)).then(a.0.cmp(&b.0)))?;
        if min_head == head && lens(&tail) >= lens(self.tail_words(s)) {
            return None;
        }
        Some((i, heads[i].clone(), tail))
    }

    /// Greedy peak reduction from the identity marking.
    pub fn minimize(&self, targets: &[Word]) -> Minimization {
        let mut s = self.initial(targets);
        let start = self.norm(&s);
        let mut trace = Vec::new();
        while let Some((i, pulled, tail)) = self.best_reductive(&s) {
            let marking = s.marking.compose(self.g, &self.whitehead[i]).expect("same graph");
            let next = SalvettiState::new(marking, pulled);
            if !tail.is_empty() {
                let _ = next.tail.set(tail);
            }
            s = next;
            let norm = self.norm(&s);
            trace.push(Step {
                partition: self.moves[i],
                head: norm.head,
                tail: norm.tail,
            });
        }
        Minimization { state: s, start, trace }
    }

    fn canonical_tuple(&self, words: &[Word]) -> Vec<Word> {
        words
            .iter()
            .map(|w| {
                self.g
                    .conjugacy_canonical_guarded(w, ENGINE_GUARD)
                    .expect("engine guard")
                    .word()
                    .clone()
            })
            .collect()
    }

    fn permute(&self, p: &[Letter], w: &[Letter]) -> Vec<Letter> {
        w.iter()
            .map(|&x| {
                let y = p[x.vertex().index()];
                if x.is_inverse() {
                    y.inverse()
                } else {
                    y
                }
            })
            .collect()
    }

    /// Canonical tuple modulo admissible signed graph permutations.
    pub fn state_key(&self, pulled: &[Word]) -> Vec<Word> {
        self.permutations
            .iter()
            .map(|p| {
                let moved: Vec<Word> = pulled.iter().map(|w| Word::new(self.permute(p, w))).collect();
                self.canonical_tuple(&moved)
            })
            .min()
            .unwrap_or_else(|| self.canonical_tuple(pulled))
    }

    /// Decides whether some element of the McCool group maps the targets
    /// `a` to the targets `b` (classwise, fixed classes fixed).
    pub fn equivalent(&self, a: &[Word], b: &[Word]) -> Result<Equivalence> {
        if a.len() != b.len() {
            return Err(RaagError::TargetMismatch(a.len(), b.len()));
        }
        let ma = self.minimize(a);
        let mb = self.minimize(b);
        let head = ma.state.head();
        if head != mb.state.head() {
            return Ok(Equivalence::Inequivalent {
                head_a: head,
                head_b: mb.state.head(),
                tail_window: self.family.tail_max_length,
            });
        }
        let goal = self.state_key(&mb.state.pulled);
        let mut index: HashMap<Vec<Word>, usize> = HashMap::new();
        // (parent, move, pulled)
        let mut nodes: Vec<(usize, usize, Vec<Word>)> = vec![(usize::MAX, usize::MAX, ma.state.pulled.clone())];
        index.insert(self.state_key(&ma.state.pulled), 0);
        let mut found = (index.get(&goal) == Some(&0)).then_some(0);
        let mut frontier = vec![0usize];
        while found.is_none() && !frontier.is_empty() {
            let mut next_frontier = Vec::new();
            for &n in &frontier {
                let pulled = nodes[n].2.clone();
                let succ: Vec<(usize, Vec<Word>, Vec<Word>)> = (0..self.moves.len())
                    .into_par_iter()
                    .filter_map(|i| {
                        let t = self.push(i, &pulled);
                        if t.iter().map(|w| w.len()).ne(head.iter().copied()) {
                            return None;
                        }
                        let key = self.state_key(&t);
                        Some((i, t, key))
                    })
                    .collect();
                for (i, t, key) in succ {
                    if index.contains_key(&key) {
                        continue;
                    }
                    if nodes.len() >= self.state_cap {
                        return Ok(Equivalence::Undecided {
                            explored: nodes.len(),
                            cap: self.state_cap,
                        });
                    }
                    let id = nodes.len();
                    nodes.push((n, i, t));
                    let hit = key == goal;
                    index.insert(key, id);
                    if hit {
                        found = Some(id);
                        break;
                    }
                    next_frontier.push(id);
                }
                if found.is_some() {
                    break;
                }
            }
            frontier = next_frontier;
        }
        let Some(end) = found else {
            return Ok(Equivalence::Inequivalent {
                head_a: head.clone(),
                head_b: head,
                tail_window: self.family.tail_max_length,
            });
        };
        let mut path = Vec::new();
        let mut cur = end;
        while cur != 0 {
            path.push(nodes[cur].1);
            cur = nodes[cur].0;
        }
        path.reverse();
        let mut marking = ma.state.marking.clone();
        for &i in &path {
            marking = marking.compose(self.g, &self.whitehead[i])?;
        }
        let pulled_end = &nodes[end].2;
        let target = self.canonical_tuple(&mb.state.pulled);
        let sigma = self
            .permutations
            .iter()
            .find(|p| {
                let moved: Vec<Word> = pulled_end.iter().map(|w| Word::new(self.permute(p, w))).collect();
                self.canonical_tuple(&moved) == target
            })
            .ok_or_else(|| RaagError::Internal("matching key without a permutation".into()))?;
        let sigma = Automorphism::graph_permutation(self.g, sigma.clone())?;
        let certificate = mb.state.marking.compose(self.g, &sigma)?.compose(self.g, &marking.inverse())?;
        if !self.certifies(&certificate, a, b)? {
            return Err(RaagError::Internal("certificate failed re-verification".into()));
        }
        Ok(Equivalence::Equivalent {
            certificate,
            level_path: path.iter().map(|&i| self.moves[i]).collect(),
            explored: nodes.len(),
        })
    }

    /// Re-applies a certificate: fixed classes to themselves, `a` to `b`.
    pub fn certifies(&self, cert: &Automorphism, a: &[Word], b: &[Word]) -> Result<bool> {
        let lhs = self.full_tuple(a);
        let rhs = self.full_tuple(b);
        for (x, y) in lhs.iter().zip(&rhs) {
            if !self
                .g
                .are_conjugate_guarded(&cert.apply(self.g, x), y, ENGINE_GUARD)?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Every signed graph automorphism, as image letters per vertex, in a
/// deterministic order (identity first).
pub fn signed_automorphisms(g: &Graph) -> Vec<Vec<Letter>> {
    fn extend(g: &Graph, img: &mut Vec<Vertex>, used: VertexSet, out: &mut Vec<Vec<Vertex>>) {
        let k = img.len();
        if k == g.len() {
            out.push(img.clone());
            return;
        }
        for t in g.vertices().filter(|t| !used.contains(*t)) {
            let ok = (0..k).all(|j| g.adjacent(Vertex(j as u8), Vertex(k as u8)) == g.adjacent(img[j], t));
            if ok {
                img.push(t);
                extend(g, img, used.union(VertexSet::singleton(t)), out);
                img.pop();
            }
        }
    }
    let mut perms = Vec::new();
    extend(g, &mut Vec::new(), VertexSet::EMPTY, &mut perms);
    let n = g.len();
    let mut out = Vec::with_capacity(perms.len() << n);
    for p in perms {
        for signs in 0u32..1 << n {
            let sig: Vec<Letter> = p
                .iter()
                .enumerate()
                .map(|(i, &v)| Letter::new(v, signs >> i & 1 == 1))
                .collect();
            debug_assert!(validate_permutation(g, &sig).is_ok());
            out.push(sig);
        }
    }
    out
}

/// Whether `auto` sends every `A_Δ` of the family into a conjugate of
/// itself. `No` comes from an obstruction (the cyclic support of some image
/// leaves `Δ`); `Unknown` means the bounded conjugator search gave up.
pub fn preserves_standard_family(g: &Graph, auto: &Automorphism, family: &[VertexSet]) -> Verdict {
    let mut verdict = Verdict::Yes;
    for &delta in family {
        match conjugator_into(g, auto, delta) {
            Verdict::Yes => {}
            Verdict::No => return Verdict::No,
            Verdict::Unknown => verdict = Verdict::Unknown,
        }
    }
    verdict
}

fn conjugator_into(g: &Graph, auto: &Automorphism, delta: VertexSet) -> Verdict {
    let images: Vec<&Word> = delta.iter().map(|v| auto.image(v)).collect();
    if images
        .iter()
        .any(|w| !g.support(&g.cyclic_reduce(w)).is_subset(delta))
    {
        return Verdict::No;
    }
    let works = |c: &[Letter]| {
        let ci = Word::new(c.to_vec()).inverse();
        images
            .iter()
            .all(|w| g.support(&g.multiply(&[&ci, w, c])).is_subset(delta))
    };
    // the conjugator is almost always a prefix of some image
    for w in &images {
        if works(&g.peel(w).0) {
            return Verdict::Yes;
        }
        for k in 0..=w.len() {
            if works(&w[..k]) {
                return Verdict::Yes;
            }
        }
    }
    let radius = images.iter().map(|w| w.len()).max().unwrap_or(0);
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut seen = 1usize;
    for _ in 0..radius {
        let mut next = Vec::new();
        for c in &layer {
            for x in g.all_letters().iter() {
                if c.last() == Some(&x.inverse()) {
                    continue;
                }
                let mut d = c.clone();
                d.push(x);
                if g.normal_form(&d) != d || !g.is_reduced(&d) {
                    continue;
                }
                if works(&d) {
                    return Verdict::Yes;
                }
                seen += 1;
                if seen > CONJUGATOR_BALL_CAP {
                    return Verdict::Unknown;
                }
                next.push(d);
            }
        }
        layer = next;
    }
    Verdict::Unknown
}

/// Classes of every generator and every product `a_i a_j` (`i < j`), in
/// that order, duplicates dropped; the trivial class is kept.
pub fn expand_fixed_subgroup(g: &Graph, gens: &[Word]) -> Result<Vec<CyclicClass>> {
    let mut out: Vec<CyclicClass> = Vec::new();
    let mut add = |w: &[Letter]| -> Result<()> {
        let c = g.conjugacy_canonical(w)?;
        if !out.contains(&c) {
            out.push(c);
        }
        Ok(())
    };
    for w in gens {
        add(w)?;
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            add(&g.multiply(&[&gens[i], &gens[j]]))?;
        }
    }
    Ok(out)
}

/// Adds an isolated vertex `t` (first free name among `t`, `t1`, `t2`, …);
/// automorphisms of the original group become the McCool group stabilizing
/// `A_Γ` and fixing `[t]`.
pub fn build_auter_embedding(g: &Graph) -> Result<(Graph, ConstraintFamily)> {
    let name = std::iter::once("t".to_string())
        .chain((1..).map(|i| format!("t{i}")))
        .find(|n| g.vertex(n).is_err())
        .expect("infinitely many candidates");
    let bigger = g.with_isolated_vertex(&name)?;
    let t = bigger.vertex(&name)?;
    let family = ConstraintFamily::new(
        &bigger,
        vec![g.all_vertices()],
        &[Word::letter(t.letter())],
    );
    Ok((bigger, family))
}

impl PartialOrd for Step {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((&self.head, &self.tail).cmp(&(&other.head, &other.tail)))
    }
}

impl PartialEq for Step {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.tail == other.tail
    }
}
