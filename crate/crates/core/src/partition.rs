//! Whitehead partitions `(P, P*, L)` of the signed alphabet.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{RaagError, Result};
use crate::graph::{Graph, Letter, LetterSet, VertexSet};
use crate::word::Word;

/// A Whitehead partition with unordered sides. `side` is the side holding
/// the lowest split letter, so equal partitions compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WhiteheadPartition {
    side: LetterSet,
    other: LetterSet,
    link: LetterSet,
}

/// `single`, `double(P)`, `double(P*)` of a based view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classes {
    pub single: LetterSet,
    pub double_p: LetterSet,
    pub double_q: LetterSet,
}

fn split_letters(a: LetterSet, b: LetterSet) -> LetterSet {
    a.intersection(b.inverses()).union(b.intersection(a.inverses()))
}

/// Axiom violations of `(p, q, l)` based at `b`, empty when valid.
pub fn violations(g: &Graph, p: LetterSet, q: LetterSet, l: LetterSet, b: Letter) -> Vec<String> {
    let mut out = Vec::new();
    if !p.is_disjoint(q) || !p.is_disjoint(l) || !q.is_disjoint(l) || p.union(q).union(l) != g.all_letters() {
        out.push("P, P*, L do not partition the signed alphabet".to_string());
    }
    if !p.contains(b) {
        out.push(format!("basepoint {} is not in P", g.fmt_letter(b)));
    }
    if !q.contains(b.inverse()) {
        out.push(format!("{} is not in P*", g.fmt_letter(b.inverse())));
    }
    if l != g.link(b) {
        out.push(format!("L differs from lk({})", g.fmt_letter(b)));
    }
    for x in split_letters(p, q).iter() {
        if !g.link(x).is_subset(l) {
            out.push(format!("split letter {} has lk not inside L", g.fmt_letter(x)));
        }
    }
    for x in p.iter() {
        let bad = g.link(x).intersection(q);
        if let Some(y) = bad.first() {
            out.push(format!(
                "{} in P commutes with {} in P*",
                g.fmt_letter(x),
                g.fmt_letter(y)
            ));
        }
    }
    if p.len() < 2 || q.len() < 2 {
        out.push("a side has fewer than two letters".to_string());
    }
    out
}

impl WhiteheadPartition {
    /// Builds from two sides (link is the complement) and checks that some
    /// basepoint is valid.
    pub fn new(g: &Graph, a: LetterSet, b: LetterSet) -> Result<WhiteheadPartition> {
        let link = g.all_letters().difference(a.union(b));
        let p = WhiteheadPartition::canonical(a, b, link);
        if p.bases(g).is_empty() {
            return Err(RaagError::InvalidPartition(
                "no letter is a valid basepoint".into(),
            ));
        }
        Ok(p)
    }

    fn canonical(a: LetterSet, b: LetterSet, link: LetterSet) -> WhiteheadPartition {
        let lowest = split_letters(a, b).first();
        let (side, other) = match lowest {
            Some(x) if b.contains(x) => (b, a),
            _ => (a, b),
        };
        WhiteheadPartition { side, other, link }
    }

    pub fn sides(&self) -> (LetterSet, LetterSet) {
        (self.side, self.other)
    }

    pub fn link(&self) -> LetterSet {
        self.link
    }

    /// Link generators: letters of these vertices are collapsed in
    /// crossing counts.
    pub fn link_vertices(&self) -> VertexSet {
        self.link.vertices()
    }

    pub fn split(&self) -> LetterSet {
        split_letters(self.side, self.other)
    }

    /// All valid basepoints, ascending.
    pub fn bases(&self, g: &Graph) -> Vec<Letter> {
        self.split()
            .iter()
            .filter(|&b| {
                let (p, q) = self.oriented(b);
                violations(g, p, q, self.link, b).is_empty()
            })
            .collect()
    }

    fn oriented(&self, b: Letter) -> (LetterSet, LetterSet) {
        if self.side.contains(b) {
            (self.side, self.other)
        } else {
            (self.other, self.side)
        }
    }

    pub fn based(&self, g: &Graph, b: Letter) -> Result<BasedPartition> {
        let (p, q) = self.oriented(b);
        BasedPartition::new(g, p, q, b)
    }

    /// Four quadrants `P∩Q, P∩Q*, P*∩Q, P*∩Q*` with this partition's
    /// `side` playing `P`.
    fn quadrants(&self, o: &WhiteheadPartition) -> [LetterSet; 4] {
        [
            self.side.intersection(o.side),
            self.side.intersection(o.other),
            self.other.intersection(o.side),
            self.other.intersection(o.other),
        ]
    }

    pub fn adjacent(&self, g: &Graph, o: &WhiteheadPartition) -> Result<bool> {
        if self == o {
            return Err(RaagError::IdenticalPartitions);
        }
        let theirs: VertexSet = o.bases(g).iter().map(|x| x.vertex()).collect();
        Ok(self
            .bases(g)
            .iter()
            .any(|b| !g.neighbours(b.vertex()).intersection(theirs).is_empty()))
    }

    /// Adjacency alone suffices; otherwise exactly one quadrant is empty.
    pub fn compatible(&self, g: &Graph, o: &WhiteheadPartition) -> Result<bool> {
        if self.adjacent(g, o)? {
            return Ok(true);
        }
        Ok(self.quadrants(o).iter().filter(|q| q.is_empty()).count() == 1)
    }

    /// Minimal number of crossings of this partition's hyperplane by a loop
    /// representing the class of `w` in the single blow-up.
    ///
    /// After deleting link letters, each remaining letter runs from the side
    /// holding its inverse to the side holding itself; every cyclic seam
    /// where one letter ends on a side the next does not start from is one
    /// crossing. Commuting non-link letters are both double on one side, so
    /// the count does not depend on the representative.
    pub fn crossing_count(&self, g: &Graph, w: &[Letter]) -> usize {
        let link = self.link_vertices();
        let core: Vec<Letter> = g
            .cyclic_reduce(w)
            .iter()
            .copied()
            .filter(|x| !link.contains(x.vertex()))
            .collect();
        (0..core.len())
            .filter(|&i| {
                let next = core[(i + 1) % core.len()];
                self.side.contains(core[i]) != self.side.contains(next.inverse())
            })
            .count()
    }

    pub fn to_text(&self, g: &Graph) -> String {
        format!(
            "{}|{} L={}",
            g.fmt_letter_set(self.side),
            g.fmt_letter_set(self.other),
            g.fmt_letter_set(self.link)
        )
    }
}

/// A partition together with a basepoint; `p` is the side holding it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasedPartition {
    p: LetterSet,
    q: LetterSet,
    link: LetterSet,
    base: Letter,
}

impl BasedPartition {
    pub fn new(g: &Graph, p: LetterSet, q: LetterSet, base: Letter) -> Result<BasedPartition> {
        let link = g.all_letters().difference(p.union(q));
        let bp = BasedPartition { p, q, link, base };
        bp.validate(g).map_err(RaagError::InvalidPartition)?;
        Ok(bp)
    }

    /// The side `x`, basepoint `base`, link `lk(base)`, the rest opposite.
    pub fn from_side(g: &Graph, x: LetterSet, base: Letter) -> Result<BasedPartition> {
        let link = g.link(base);
        let q = g.all_letters().difference(x.union(link));
        BasedPartition::new(g, x, q, base)
    }

    pub fn validate(&self, g: &Graph) -> std::result::Result<(), String> {
        let v = violations(g, self.p, self.q, self.link, self.base);
        if v.is_empty() {
            Ok(())
        } else {
            Err(v.join("; "))
        }
    }

    pub fn p(&self) -> LetterSet {
        self.p
    }

    pub fn q(&self) -> LetterSet {
        self.q
    }

    pub fn link(&self) -> LetterSet {
        self.link
    }

    pub fn base(&self) -> Letter {
        self.base
    }

    pub fn partition(&self) -> WhiteheadPartition {
        WhiteheadPartition::canonical(self.p, self.q, self.link)
    }

    /// The same partition with sides exchanged, based at `base^-1`.
    pub fn flipped(&self) -> BasedPartition {
        BasedPartition {
            p: self.q,
            q: self.p,
            link: self.link,
            base: self.base.inverse(),
        }
    }

    pub fn classify(&self) -> Classes {
        Classes {
            single: split_letters(self.p, self.q),
            double_p: self.p.intersection(self.p.inverses()),
            double_q: self.q.intersection(self.q.inverses()),
        }
    }

    /// Generator images of the Whitehead automorphism.
    pub fn images(&self, g: &Graph) -> Vec<Word> {
        let b = self.base;
        let c = self.classify();
        g.vertices()
            .map(|v| {
                let x = v.letter();
                let w = if v == b.vertex() {
                    vec![v.inverse_letter()]
                } else if c.single.contains(x) && self.p.contains(x) {
                    vec![x, b.inverse()]
                } else if c.single.contains(x) {
                    vec![b, x]
                } else if c.double_p.contains(x) {
                    vec![b, x, b.inverse()]
                } else {
                    vec![x]
                };
                g.reduce(&w)
            })
            .collect()
    }

    /// Whether the Whitehead automorphism preserves the conjugacy class of
    /// every `A_Δ` in `family`.
    pub fn relative_condition(&self, family: &[VertexSet]) -> bool {
        let c = self.classify();
        family.iter().all(|&delta| {
            if delta.contains(self.base.vertex()) {
                return true;
            }
            let letters = delta.letters();
            c.single.is_disjoint(letters)
                && (c.double_p.is_disjoint(letters) || c.double_q.is_disjoint(letters))
        })
    }

    /// `P={..} Pstar={..} base=x`; the link is the complement.
    pub fn parse(g: &Graph, text: &str) -> Result<BasedPartition> {
        let mut p = None;
        let mut q = None;
        let mut base = None;
        let mut rest = text.trim();
        while !rest.is_empty() {
            let (key, after) = rest
                .split_once('=')
                .ok_or_else(|| RaagError::Parse(format!("bad partition spec `{text}`")))?;
            let after = after.trim_start();
            let (value, tail) = if after.starts_with('{') {
                let end = after
                    .find('}')
                    .ok_or_else(|| RaagError::Parse("unclosed `{`".into()))?;
                (&after[..=end], &after[end + 1..])
            } else {
                after.split_at(after.find(char::is_whitespace).unwrap_or(after.len()))
            };
            match key.trim() {
                "P" => p = Some(g.parse_letter_set(value)?),
                "Pstar" | "P*" => q = Some(g.parse_letter_set(value)?),
                "base" => base = Some(g.parse_letter(value.trim())?),
                other => return Err(RaagError::Parse(format!("unknown key `{other}`"))),
            }
            rest = tail.trim_start();
        }
        let missing = |k: &str| RaagError::Parse(format!("partition spec lacks `{k}`"));
        BasedPartition::new(
            g,
            p.ok_or_else(|| missing("P"))?,
            q.ok_or_else(|| missing("Pstar"))?,
            base.ok_or_else(|| missing("base"))?,
        )
    }

    pub fn to_text(&self, g: &Graph) -> String {
        format!(
            "P={} Pstar={} base={}",
            g.fmt_letter_set(self.p),
            g.fmt_letter_set(self.q),
            g.fmt_letter(self.base)
        )
    }
}

/// Every Whitehead partition with its valid basepoints, in canonical order.
pub fn enumerate(g: &Graph) -> Vec<(WhiteheadPartition, Vec<Letter>)> {
    let mut links: Vec<LetterSet> = g.vertices().map(|v| g.link(v.letter())).collect();
    links.sort();
    links.dedup();
    let mut found: BTreeMap<WhiteheadPartition, Vec<Letter>> = BTreeMap::new();
    for link in links {
        let rest: Vec<Letter> = g.all_letters().difference(link).iter().collect();
        let k = rest.len();
        assert!(k < 40, "partition enumeration over {k} letters is out of reach");
        let hits: Vec<(WhiteheadPartition, Vec<Letter>)> = (0u64..1 << k)
            .into_par_iter()
            .filter_map(|mask| {
                let p: LetterSet = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| rest[i]).collect();
                let q: LetterSet = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| rest[i]).collect();
                // each unordered split shows up twice; keep the mask whose P holds the lowest split letter
                let lowest = split_letters(p, q).first()?;
                if !p.contains(lowest) {
                    return None;
                }
                let bases: Vec<Letter> = split_letters(p, q)
                    .iter()
                    .filter(|&b| {
                        let (bp, bq) = if p.contains(b) { (p, q) } else { (q, p) };
                        violations(g, bp, bq, link, b).is_empty()
                    })
                    .collect();
                (!bases.is_empty()).then(|| (WhiteheadPartition::canonical(p, q, link), bases))
            })
            .collect();
        for (part, bases) in hits {
            found.entry(part).or_default().extend(bases);
        }
    }
    found
        .into_iter()
        .map(|(p, mut b)| {
            b.sort();
            b.dedup();
            (p, b)
        })
        .collect()
}

/// Every based partition, ordered by partition then basepoint.
pub fn based_partitions(g: &Graph) -> Vec<BasedPartition> {
    enumerate(g)
        .into_iter()
        .flat_map(|(p, bases)| {
            bases
                .into_iter()
                .map(move |b| {
                    let (x, y) = p.oriented(b);
                    BasedPartition {
                        p: x,
                        q: y,
                        link: p.link,
                        base: b,
                    }
                })
        })
        .collect()
}

/// Which case of the quadrant construction fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadrantCase {
    /// `v ∈ double(Q)`, `w^-1 ∈ P`: outputs `(P∩Q*, w^-1)` and `(P*∩Q, v^-1)`.
    DoubleBase,
    /// `v ∈ single(Q) ∩ Q`, `w ∈ single(P)`: outputs `(P∩Q, v)` and `(P*∩Q*, v^-1)`.
    SingleBase,
}

/// Quadrant partitions of two non-compatible based partitions. Tries the
/// input order, side exchanges of each input, and the role swap, in a fixed
/// order; the first variant meeting a case hypothesis is used.
pub fn quadrant_partitions(
    g: &Graph,
    first: &BasedPartition,
    second: &BasedPartition,
) -> Result<(QuadrantCase, Vec<BasedPartition>)> {
    let (pp, qq) = (first.partition(), second.partition());
    if pp.compatible(g, &qq)? {
        return Err(RaagError::QuadrantHypotheses);
    }
    for (x, y) in [(first, second), (second, first)] {
        for bp in [*x, x.flipped()] {
            for bq in [*y, y.flipped()] {
                if let Some(out) = quadrant_case(g, &bp, &bq) {
                    return out;
                }
            }
        }
    }
    Err(RaagError::QuadrantHypotheses)
}

fn quadrant_case(
    g: &Graph,
    bp: &BasedPartition,
    bq: &BasedPartition,
) -> Option<Result<(QuadrantCase, Vec<BasedPartition>)>> {
    let (v, w) = (bp.base, bq.base);
    let (cp, cq) = (bp.classify(), bq.classify());
    let build = |x: LetterSet, b: Letter| BasedPartition::from_side(g, x, b);
    if cq.double_p.contains(v) && bp.p.contains(w.inverse()) {
        let out = build(bp.p.intersection(bq.q), w.inverse()).and_then(|r| {
            build(bp.q.intersection(bq.p), v.inverse()).map(|s| (QuadrantCase::DoubleBase, vec![r, s]))
        });
        return Some(out);
    }
    if cq.single.contains(v) && bq.p.contains(v) && cp.single.contains(w) {
        let out = build(bp.p.intersection(bq.p), v).and_then(|t| {
            build(bp.q.intersection(bq.q), v.inverse()).map(|u| (QuadrantCase::SingleBase, vec![t, u]))
        });
        return Some(out);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: usize) -> Graph {
        let names = ["a", "b", "c", "d"];
        Graph::edgeless(&names[..n]).unwrap()
    }

    fn ls(g: &Graph, s: &str) -> LetterSet {
        g.parse_letter_set(s).unwrap()
    }

    fn bp(g: &Graph, p: &str, q: &str, b: &str) -> BasedPartition {
        BasedPartition::new(g, ls(g, p), ls(g, q), g.parse_letter(b).unwrap()).unwrap()
    }

    #[test]
    fn validation_examples() {
        let g = f(2);
        assert!(bp(&g, "{a,b}", "{a^-1,b^-1}", "a").validate(&g).is_ok());
        let bad = BasedPartition::new(&g, ls(&g, "{a,b}"), ls(&g, "{a^-1,b^-1}"), g.parse_letter("b^-1").unwrap());
        assert!(bad.is_err());
        for b in ["a", "a^-1", "b", "b^-1"] {
            let r = BasedPartition::new(&g, ls(&g, "{a,a^-1,b}"), ls(&g, "{b^-1}"), g.parse_letter(b).unwrap());
            assert!(r.is_err());
        }
    }

    #[test]
    fn classify_examples() {
        let g = f(3);
        let c = bp(&g, "{a,b}", "{a^-1,b^-1,c,c^-1}", "a").classify();
        assert_eq!(c.single, ls(&g, "{a,a^-1,b,b^-1}"));
        assert!(c.double_p.is_empty());
        assert_eq!(c.double_q, ls(&g, "{c,c^-1}"));
    }

    #[test]
    fn whitehead_formula() {
        let g = f(3);
        let ims = bp(&g, "{a,b}", "{a^-1,b^-1,c,c^-1}", "a").images(&g);
        let shown: Vec<String> = ims.iter().map(|w| g.fmt_word(w)).collect();
        assert_eq!(shown, ["a^-1", "b a^-1", "c"]);
        let g2 = f(2);
        let ims = bp(&g2, "{a,b}", "{a^-1,b^-1}", "a").images(&g2);
        assert_eq!(g2.fmt_word(&ims[1]), "b a^-1");
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate(&f(2)).len(), 2);
        assert_eq!(enumerate(&f(3)).len(), 22);
        let z2 = Graph::new(&["a", "b"], &[("a", "b")]).unwrap();
        assert!(enumerate(&z2).is_empty());
    }

    #[test]
    fn compatibility_examples() {
        let g = f(2);
        let parts = enumerate(&g);
        let (p, q) = (parts[0].0, parts[1].0);
        assert!(!p.compatible(&g, &q).unwrap());
        assert!(!q.compatible(&g, &p).unwrap());
        assert_eq!(p.compatible(&g, &p), Err(RaagError::IdenticalPartitions));
        let g3 = f(3);
        let p = bp(&g3, "{a,b,c}", "{a^-1,b^-1,c^-1}", "a").partition();
        let q = bp(&g3, "{a,b,c^-1}", "{a^-1,b^-1,c}", "b").partition();
        assert!(!p.compatible(&g3, &q).unwrap());
    }

    #[test]
    fn quadrant_example() {
        let g = f(3);
        let p = bp(&g, "{a,b,c}", "{a^-1,b^-1,c^-1}", "a");
        let q = bp(&g, "{a,b,c^-1}", "{a^-1,b^-1,c}", "b");
        let (case, out) = quadrant_partitions(&g, &p, &q).unwrap();
        assert_eq!(case, QuadrantCase::SingleBase);
        assert_eq!(out[0], bp(&g, "{a,b}", "{a^-1,b^-1,c,c^-1}", "a"));
        assert_eq!(out[1], bp(&g, "{a^-1,b^-1}", "{a,b,c,c^-1}", "a^-1"));
        for o in &out {
            assert!(o.partition().compatible(&g, &p.partition()).unwrap());
            assert!(o.partition().compatible(&g, &q.partition()).unwrap());
        }
    }

    #[test]
    fn relative_examples() {
        let g = f(3);
        let w = bp(&g, "{a,b}", "{a^-1,b^-1,c,c^-1}", "a");
        let set = |s: &str| g.parse_vertex_set(s).unwrap();
        assert!(w.relative_condition(&[set("{c}")]));
        assert!(!w.relative_condition(&[set("{b}")]));
        assert!(w.relative_condition(&[set("{a,b}")]));
    }

    #[test]
    fn crossing_examples() {
        let g = f(2);
        let p = bp(&g, "{a,b}", "{a^-1,b^-1}", "a").partition();
        assert_eq!(p.crossing_count(&g, &g.parse_word("a b").unwrap()), 2);
        assert_eq!(p.crossing_count(&g, &g.parse_word("a").unwrap()), 1);
        assert_eq!(p.crossing_count(&g, &[]), 0);
    }

    #[test]
    fn spec_text_roundtrip() {
        let g = f(3);
        let text = "P={a,b} Pstar={a^-1,b^-1,c,c^-1} base=a";
        let b = BasedPartition::parse(&g, text).unwrap();
        assert_eq!(b.to_text(&g), text);
        assert_eq!(BasedPartition::parse(&g, &b.flipped().to_text(&g)).unwrap(), b.flipped());
    }
}
