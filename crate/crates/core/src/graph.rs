//! Defining graphs, signed letters and the bitsets used everywhere else.

use std::fmt;

use serde::Serialize;

use crate::error::{RaagError, Result};

/// Bitsets below are `u32`/`u64`, so a graph has at most 32 vertices.
pub const MAX_VERTICES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vertex(pub u8);

impl Vertex {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn letter(self) -> Letter {
        Letter::new(self, false)
    }

    pub fn inverse_letter(self) -> Letter {
        Letter::new(self, true)
    }
}

/// A signed generator, encoded as `2 * index + inverse_bit`.
///
/// The derived order is "by generator index, then sign", which is the order
/// every canonical form in the crate is taken with respect to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter(u8);

impl Letter {
    pub fn new(v: Vertex, inverse: bool) -> Letter {
        Letter(v.0 * 2 + inverse as u8)
    }

    pub fn from_code(code: u8) -> Letter {
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn vertex(self) -> Vertex {
        Vertex(self.0 >> 1)
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> VertexSet {
        if n >= 32 {
            VertexSet(u32::MAX)
        } else {
            VertexSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(v: Vertex) -> VertexSet {
        VertexSet(1 << v.0)
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.0 >> v.0 & 1 == 1
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0 |= 1 << v.0;
    }

    pub fn union(self, o: VertexSet) -> VertexSet {
        VertexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: VertexSet) -> VertexSet {
        VertexSet(self.0 & o.0)
    }

    pub fn difference(self, o: VertexSet) -> VertexSet {
        VertexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: VertexSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Vertex> {
        (0..32u8).filter(move |&i| self.0 >> i & 1 == 1).map(Vertex)
    }

    /// Both signed letters of every member.
    pub fn letters(self) -> LetterSet {
        let mut out = 0u64;
        for v in self.iter() {
            out |= 3u64 << (2 * v.0);
        }
        LetterSet(out)
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v.0)).finish()
    }
}

const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterSet(pub u64);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);

    pub fn singleton(x: Letter) -> LetterSet {
        LetterSet(1 << x.0)
    }

    pub fn contains(self, x: Letter) -> bool {
        self.0 >> x.0 & 1 == 1
    }

    pub fn insert(&mut self, x: Letter) {
        self.0 |= 1 << x.0;
    }

    pub fn remove(&mut self, x: Letter) {
        self.0 &= !(1 << x.0);
    }

    pub fn union(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 | o.0)
    }

    pub fn intersection(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 & o.0)
    }

    pub fn difference(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: LetterSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: LetterSet) -> bool {
        self.0 & o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// `{x^-1 : x in self}`.
    pub fn inverses(self) -> LetterSet {
        LetterSet(((self.0 & EVEN_BITS) << 1) | ((self.0 >> 1) & EVEN_BITS))
    }

    /// Generators with at least one sign present.
    pub fn vertices(self) -> VertexSet {
        let folded = (self.0 | (self.0 >> 1)) & EVEN_BITS;
        VertexSet::from_iter((0..32u8).filter(|&i| folded >> (2 * i) & 1 == 1).map(Vertex))
    }

    pub fn iter(self) -> impl Iterator<Item = Letter> {
        (0..64u8).filter(move |&i| self.0 >> i & 1 == 1).map(Letter)
    }

    /// Lowest letter, if any.
    pub fn first(self) -> Option<Letter> {
        (self.0 != 0).then(|| Letter(self.0.trailing_zeros() as u8))
    }
}

impl FromIterator<Letter> for LetterSet {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        let mut s = LetterSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|x| x.0)).finish()
    }
}

/// A finite simple graph with named vertices, indexed in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    adj: Vec<VertexSet>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '^' | '{' | '}' | ',' | ':' | '=' | '[' | ']'))
}

impl Graph {
    pub fn new<S: AsRef<str>>(names: &[S], edges: &[(S, S)]) -> Result<Graph> {
        let mut g = Graph {
            names: Vec::new(),
            adj: Vec::new(),
        };
        for name in names {
            g.push_vertex(name.as_ref())?;
        }
        for (a, b) in edges {
            let (a, b) = (g.vertex(a.as_ref())?, g.vertex(b.as_ref())?);
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Shorthand for a graph with no edges, the free group on `names`.
    pub fn edgeless<S: AsRef<str>>(names: &[S]) -> Result<Graph> {
        Graph::new::<&str>(
            &names.iter().map(|s| s.as_ref()).collect::<Vec<_>>(),
            &[],
        )
    }

    fn push_vertex(&mut self, name: &str) -> Result<Vertex> {
        if !valid_name(name) {
            return Err(RaagError::InvalidGraph(format!("bad vertex name `{name}`")));
        }
        if self.names.iter().any(|n| n == name) {
            return Err(RaagError::InvalidGraph(format!("duplicate vertex `{name}`")));
        }
        if self.names.len() == MAX_VERTICES {
            return Err(RaagError::InvalidGraph(format!(
                "more than {MAX_VERTICES} vertices"
            )));
        }
        self.names.push(name.to_string());
        self.adj.push(VertexSet::EMPTY);
        Ok(Vertex(self.names.len() as u8 - 1))
    }

    fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        if a == b {
            return Err(RaagError::InvalidGraph(format!(
                "self-edge at `{}`",
                self.name(a)
            )));
        }
        self.adj[a.index()].insert(b);
        self.adj[b.index()].insert(a);
        Ok(())
    }

    /// Reads the text format: a `vertices:` line, then any number of
    /// `edge: a b` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut g: Option<Graph> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| RaagError::Parse(format!("line {}: {msg}", lineno + 1));
            let (key, rest) = line.split_once(':').ok_or_else(|| err("missing `:`"))?;
            match key.trim() {
                "vertices" => {
                    if g.is_some() {
                        return Err(err("second `vertices:` line"));
                    }
                    let names: Vec<&str> = rest.split_whitespace().collect();
                    g = Some(Graph::new::<&str>(&names, &[])?);
                }
                "edge" => {
                    let g = g.as_mut().ok_or_else(|| err("edge before `vertices:`"))?;
                    let ends: Vec<&str> = rest.split_whitespace().collect();
                    if ends.len() != 2 {
                        return Err(err("an edge needs exactly two vertices"));
                    }
                    let (a, b) = (g.vertex(ends[0])?, g.vertex(ends[1])?);
                    g.add_edge(a, b)?;
                }
                other => return Err(err(&format!("unknown key `{other}`"))),
            }
        }
        g.ok_or_else(|| RaagError::Parse("no `vertices:` line".into()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("vertices: {}\n", self.names.join(" "));
        for (a, b) in self.edges() {
            out.push_str(&format!("edge: {} {}\n", self.name(a), self.name(b)));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (0..self.names.len() as u8).map(Vertex)
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn all_letters(&self) -> LetterSet {
        self.all_vertices().letters()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<Vertex> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Vertex(i as u8))
            .ok_or_else(|| RaagError::UnknownGenerator(name.to_string()))
    }

    pub fn adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.adj[a.index()].contains(b)
    }

    pub fn neighbours(&self, v: Vertex) -> VertexSet {
        self.adj[v.index()]
    }

    /// The closed neighbourhood; its standard subgroup is the centralizer of `v`.
    pub fn star(&self, v: Vertex) -> VertexSet {
        let mut s = self.adj[v.index()];
        s.insert(v);
        s
    }

    /// Distinct generators that commute, i.e. letters that may be swapped.
    pub fn letters_commute(&self, x: Letter, y: Letter) -> bool {
        self.adjacent(x.vertex(), y.vertex())
    }

    /// `lk(x)`: letters other than `x^{±1}` commuting with `x`.
    pub fn link(&self, x: Letter) -> LetterSet {
        self.neighbours(x.vertex()).letters()
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for a in self.vertices() {
            for b in self.neighbours(a).iter() {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// True iff the induced subgraph splits as a join of two nonempty parts,
    /// i.e. its complement graph is disconnected.
    pub fn is_nontrivial_join(&self, support: VertexSet) -> bool {
        if support.len() < 2 {
            return false;
        }
        let start = support.iter().next().unwrap();
        let mut seen = VertexSet::singleton(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let non_nbrs = support.difference(self.star(v)).difference(seen);
            for w in non_nbrs.iter() {
                seen.insert(w);
                stack.push(w);
            }
        }
        seen != support
    }

    pub fn center_vertices(&self) -> VertexSet {
        self.vertices()
            .filter(|&v| self.star(v) == self.all_vertices())
            .collect()
    }

    /// Size of a largest clique, the dimension of the Salvetti complex.
    pub fn clique_number(&self) -> usize {
        fn grow(g: &Graph, chosen: usize, candidates: VertexSet, best: &mut usize) {
            *best = (*best).max(chosen);
            if chosen + candidates.len() <= *best {
                return;
            }
            let mut rest = candidates;
            for v in candidates.iter() {
                rest = rest.difference(VertexSet::singleton(v));
                grow(g, chosen + 1, rest.intersection(g.neighbours(v)), best);
            }
        }
        let mut best = 0;
        grow(self, 0, self.all_vertices(), &mut best);
        best
    }

    /// A copy with one more isolated vertex appended.
    pub fn with_isolated_vertex(&self, name: &str) -> Result<Graph> {
        let mut g = self.clone();
        g.push_vertex(name)?;
        Ok(g)
    }

    pub fn parse_letter(&self, token: &str) -> Result<Letter> {
        let (name, inverse) = match token.split_once('^') {
            None => (token, false),
            Some((name, "-1")) => (name, true),
            Some(_) => {
                return Err(RaagError::Parse(format!(
                    "bad token `{token}` (expected `x` or `x^-1`)"
                )))
            }
        };
        Ok(Letter::new(self.vertex(name)?, inverse))
    }

    pub fn fmt_letter(&self, x: Letter) -> String {
        if x.is_inverse() {
            format!("{}^-1", self.name(x.vertex()))
        } else {
            self.name(x.vertex()).to_string()
        }
    }

    /// Parses `{a,b}` (braces optional, commas or spaces as separators).
    pub fn parse_vertex_set(&self, text: &str) -> Result<VertexSet> {
        let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
        inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| self.vertex(t))
            .collect()
    }

    pub fn parse_letter_set(&self, text: &str) -> Result<LetterSet> {
        let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
        inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| self.parse_letter(t))
            .collect()
    }

    pub fn fmt_vertex_set(&self, s: VertexSet) -> String {
        let names: Vec<&str> = s.iter().map(|v| self.name(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn fmt_letter_set(&self, s: LetterSet) -> String {
        let names: Vec<String> = s.iter().map(|x| self.fmt_letter(x)).collect();
        format!("{{{}}}", names.join(","))
    }
}
