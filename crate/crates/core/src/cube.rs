//! Balls in the universal cover of the Salvetti complex (the Cayley graph
//! with commutation squares) and checks of the minset lemmas on them.
//!
//! Distances are exact: `d(x, y) = |x^-1 y|`. The ball only matters for
//! searches that need a finite vertex set.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{RaagError, Result};
use crate::graph::{Graph, Letter, Vertex};
use crate::word::Word;

pub const DEFAULT_BALL_CAP: usize = 500_000;

/// A set of ball vertices.
pub type BallSet = BTreeSet<Word>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Generator labelling the edge; `to = from · label^{±1}`.
    pub label: usize,
    pub inverse: bool,
}

impl Edge {
    pub fn letter(&self) -> Letter {
        Letter::new(Vertex(self.label as u8), self.inverse)
    }
}

#[derive(Clone, Debug)]
pub struct CubeBall {
    pub radius: usize,
    /// Normal forms in BFS order (length, then lexicographic).
    pub vertices: Vec<Word>,
    index: HashMap<Word, usize>,
    pub edges: Vec<Edge>,
    /// Vertex indices `w, wx, wy, wxy`.
    pub squares: Vec<[usize; 4]>,
    /// Hyperplane class of each edge (union-find over squares).
    pub hyperplane: Vec<usize>,
    pub hyperplane_count: usize,
    neighbours: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallStats {
    pub radius: usize,
    pub vertices: usize,
    pub edges: usize,
    pub squares: usize,
    pub hyperplanes: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

pub fn build_ball(g: &Graph, radius: usize) -> Result<CubeBall> {
    build_ball_capped(g, radius, DEFAULT_BALL_CAP)
}

pub fn build_ball_capped(g: &Graph, radius: usize, cap: usize) -> Result<CubeBall> {
    let letters: Vec<Letter> = g.all_letters().iter().collect();
    let mut vertices = vec![Word::identity()];
    let mut index = HashMap::from([(Word::identity(), 0)]);
    let mut layer = 0..1;
    for len in 1..=radius {
        let mut next: BTreeSet<Word> = BTreeSet::new();
        for w in &vertices[layer.clone()] {
            for &x in &letters {
                let wx = g.multiply(&[w, &[x]]);
                if wx.len() == len {
                    next.insert(wx);
                }
            }
        }
        let start = vertices.len();
        for w in next {
            if vertices.len() >= cap {
                return Err(RaagError::CapExceeded { what: "ball", cap });
            }
            index.insert(w.clone(), vertices.len());
            vertices.push(w);
        }
        layer = start..vertices.len();
    }
    let mut edges = Vec::new();
    let mut edge_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut neighbours = vec![Vec::new(); vertices.len()];
    for (i, w) in vertices.iter().enumerate() {
        for &x in &letters {
            let wx = g.multiply(&[w, &[x]]);
            if wx.len() != w.len() + 1 {
                continue;
            }
            if let Some(&j) = index.get(&wx) {
                edge_of.insert((i, j), edges.len());
                edges.push(Edge {
                    from: i,
                    to: j,
                    label: x.vertex().index(),
                    inverse: x.is_inverse(),
                });
                neighbours[i].push(j);
                neighbours[j].push(i);
            }
        }
    }
    let edge_between = |a: usize, b: usize| edge_of.get(&(a, b)).or_else(|| edge_of.get(&(b, a))).copied();
    let mut uf = UnionFind((0..edges.len()).collect());
    let mut squares = Vec::new();
    let mut seen: HashSet<[usize; 4]> = HashSet::new();
    for (i, w) in vertices.iter().enumerate() {
        for &x in &letters {
            for &y in &letters {
                if x.vertex() >= y.vertex() || !g.adjacent(x.vertex(), y.vertex()) {
                    continue;
                }
                let corners = [
                    Some(i),
                    index.get(&g.multiply(&[w, &[x]])).copied(),
                    index.get(&g.multiply(&[w, &[y]])).copied(),
                    index.get(&g.multiply(&[w, &[x, y]])).copied(),
                ];
                let [Some(a), Some(b), Some(c), Some(d)] = corners else {
                    continue;
                };
                let mut key = [a, b, c, d];
                key.sort_unstable();
                if !seen.insert(key) {
                    continue;
                }
                squares.push([a, b, c, d]);
                let e = |p, q| edge_between(p, q).expect("square sides are ball edges");
                uf.union(e(a, b), e(c, d));
                uf.union(e(a, c), e(b, d));
            }
        }
    }
    let mut class_id: HashMap<usize, usize> = HashMap::new();
    let hyperplane: Vec<usize> = (0..edges.len())
        .map(|e| {
            let r = uf.find(e);
            let next = class_id.len();
            *class_id.entry(r).or_insert(next)
        })
        .collect();
    Ok(CubeBall {
        radius,
        vertices,
        index,
        edges,
        squares,
        hyperplane,
        hyperplane_count: class_id.len(),
        neighbours,
    })
}

impl CubeBall {
    pub fn stats(&self) -> BallStats {
        BallStats {
            radius: self.radius,
            vertices: self.vertices.len(),
            edges: self.edges.len(),
            squares: self.squares.len(),
            hyperplanes: self.hyperplane_count,
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.index.contains_key(w)
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.neighbours[i]
    }

    /// Vertices with `|x| <= r`.
    pub fn interior(&self, r: usize) -> impl Iterator<Item = &Word> {
        self.vertices.iter().take_while(move |w| w.len() <= r)
    }

    /// Distances inside the ball graph from a set of sources.
    pub fn bfs_from(&self, sources: impl IntoIterator<Item = usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued vertices have distances");
            for &v in &self.neighbours[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn require(&self, w: &Word, what: &str) -> Result<usize> {
        self.index_of(w)
            .ok_or_else(|| RaagError::Clipped(format!("{what} has length {} > radius {}", w.len(), self.radius)))
    }
}

pub fn distance(g: &Graph, x: &[Letter], y: &[Letter]) -> usize {
    g.multiply(&[&Word::new(x.to_vec()).inverse(), y]).len()
}

/// Every `z'` with `z = z' z''` and `|z| = |z'| + |z''|`, in normal form.
pub fn prefixes(g: &Graph, z: &[Letter]) -> BTreeSet<Word> {
    let z = g.reduce(z);
    let mut out = BTreeSet::new();
    let mut stack = vec![(Vec::new(), z.into_letters())];
    while let Some((pre, rest)) = stack.pop() {
        let key = Word::new(g.normal_form(&pre));
        if !out.insert(key) {
            continue;
        }
        for i in g.front_movable(&rest) {
            let mut p = pre.clone();
            p.push(rest[i]);
            let mut r = rest.clone();
            r.remove(i);
            stack.push((p, r));
        }
    }
    out
}

/// `{p : d(u,p) + d(p,v) = d(u,v)}`.
pub fn interval(g: &Graph, u: &[Letter], v: &[Letter]) -> BallSet {
    let z = g.multiply(&[&Word::new(u.to_vec()).inverse(), v]);
    prefixes(g, &z).into_iter().map(|p| g.multiply(&[u, &p])).collect()
}

/// The median of three vertices; the intervals must fit in the ball.
pub fn median(ball: &CubeBall, g: &Graph, x: &Word, y: &Word, z: &Word) -> Result<Word> {
    let xy = interval(g, x, y);
    let yz = interval(g, y, z);
    let xz = interval(g, x, z);
    for p in xy.iter().chain(&yz).chain(&xz) {
        ball.require(p, "interval vertex")?;
    }
    let mut common = xy.iter().filter(|p| yz.contains(*p) && xz.contains(*p));
    match (common.next(), common.next()) {
        (Some(m), None) => Ok(m.clone()),
        (None, _) => Err(RaagError::Internal("empty median".into())),
        _ => Err(RaagError::Internal("median is not unique".into())),
    }
}

/// Whether `x` lies in `Min(g)`: `|x^-1 g x| = ℓ(g)`.
pub fn in_minset(gr: &Graph, g: &[Letter], x: &[Letter]) -> bool {
    let xi = Word::new(x.to_vec()).inverse();
    gr.multiply(&[&xi, g, x]).len() == gr.translation_length(g)
}

pub fn minset(ball: &CubeBall, gr: &Graph, g: &[Letter]) -> BallSet {
    ball.vertices
        .par_iter()
        .filter(|x| in_minset(gr, g, x))
        .cloned()
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Interval closure test; errors if an interval leaves the ball.
pub fn is_convex(ball: &CubeBall, g: &Graph, s: &BallSet) -> Result<bool> {
    let members: Vec<&Word> = s.iter().collect();
    for (i, x) in members.iter().enumerate() {
        for y in &members[i + 1..] {
            for p in interval(g, x, y) {
                ball.require(&p, "interval vertex")?;
                if !s.contains(&p) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Convexity of `Min(g)` on the interior `|x| <= interior`, with membership
/// decided by the minset predicate so that no clipping can occur.
pub fn minset_convexity(ball: &CubeBall, gr: &Graph, g: &[Letter], interior: usize) -> bool {
    let members: Vec<&Word> = ball.interior(interior).filter(|x| in_minset(gr, g, x)).collect();
    members.par_iter().enumerate().all(|(i, x)| {
        members[i + 1..]
            .iter()
            .all(|y| interval(gr, x, y).iter().all(|p| in_minset(gr, g, p)))
    })
}

/// `Min(g)` is nonempty and `g^{±1} x` stays in it whenever visible.
pub fn minset_invariance(ball: &CubeBall, gr: &Graph, g: &[Letter]) -> bool {
    let min = minset(ball, gr, g);
    let gi = Word::new(g.to_vec()).inverse();
    !min.is_empty()
        && min.iter().all(|x| {
            [gr.multiply(&[g, x]), gr.multiply(&[&gi, x])]
                .iter()
                .all(|y| !ball.contains(y) || min.contains(y))
        })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceCheck {
    pub distance: usize,
    pub bound: f64,
    pub ok: bool,
}

/// `d(Min(g), Min(h))` over the ball, against `ℓ(gh)/2`.
pub fn minset_distance_check(ball: &CubeBall, gr: &Graph, g: &[Letter], h: &[Letter]) -> Result<DistanceCheck> {
    let mg = minset(ball, gr, g);
    let mh = minset(ball, gr, h);
    if mg.is_empty() || mh.is_empty() {
        return Err(RaagError::Clipped("a minset misses the ball".into()));
    }
    let dist = ball.bfs_from(mg.iter().map(|x| ball.index[x]));
    let distance = mh
        .iter()
        .filter_map(|y| dist[ball.index[y]])
        .min()
        .ok_or_else(|| RaagError::Internal("ball graph is disconnected".into()))?;
    let bound = gr.translation_length(&gr.multiply(&[g, h])) as f64 / 2.0;
    Ok(DistanceCheck {
        distance,
        bound,
        ok: distance as f64 <= bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub vertex: Word,
    pub bound: f64,
    pub displacements: Vec<usize>,
}

/// `2M` for `M = max ℓ(a_i) + (n/2) max_{i<j} ℓ(a_i a_j) + 3n/2`.
pub fn displacement_bound_doubled(gr: &Graph, elements: &[Word]) -> usize {
    let n = gr.clique_number();
    let single = elements.iter().map(|a| gr.translation_length(a)).max().unwrap_or(0);
    let mut pair = 0;
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            pair = pair.max(gr.translation_length(&gr.multiply(&[&elements[i], &elements[j]])));
        }
    }
    2 * single + n * pair + 3 * n
}

/// First ball vertex (BFS order) displaced at most `M` by every element.
pub fn bounded_displacement_witness(ball: &CubeBall, gr: &Graph, elements: &[Word]) -> Result<Witness> {
    let m2 = displacement_bound_doubled(gr, elements);
    let displace = |x: &Word| -> Vec<usize> { elements.iter().map(|a| distance(gr, x, &gr.multiply(&[a, x]))).collect() };
    ball.vertices
        .iter()
        .find_map(|x| {
            let d = displace(x);
            d.iter().all(|&d| 2 * d <= m2).then(|| Witness {
                vertex: x.clone(),
                bound: m2 as f64 / 2.0,
                displacements: d,
            })
        })
        .ok_or(RaagError::NoWitness {
            radius: ball.radius,
            bound: m2 as f64 / 2.0,
        })
}

/// Interval-closure hull of a vertex set; errors if it leaves the ball.
pub fn hull(ball: &CubeBall, g: &Graph, s: &BallSet) -> Result<BallSet> {
    let mut out = s.clone();
    loop {
        let members: Vec<&Word> = out.iter().collect();
        let mut added = BallSet::new();
        for (i, x) in members.iter().enumerate() {
            for y in &members[i + 1..] {
                for p in interval(g, x, y) {
                    if !out.contains(&p) {
                        ball.require(&p, "hull vertex")?;
                        added.insert(p);
                    }
                }
            }
        }
        if added.is_empty() {
            return Ok(out);
        }
        out.extend(added);
    }
}

/// The hull of `N_r(C)` stays within `n·r` of `C`.
pub fn hull_neighborhood_check(ball: &CubeBall, g: &Graph, c: &BallSet, r: usize) -> Result<bool> {
    let sources: Vec<usize> = c.iter().map(|x| ball.require(x, "convex set vertex")).collect::<Result<_>>()?;
    let dist = ball.bfs_from(sources);
    let near: BallSet = ball
        .vertices
        .iter()
        .zip(&dist)
        .filter(|(_, d)| d.is_some_and(|d| d <= r))
        .map(|(w, _)| w.clone())
        .collect();
    let h = hull(ball, g, &near)?;
    let n = g.clique_number();
    Ok(h.iter().all(|p| dist[ball.index[p]].is_some_and(|d| d <= n * r)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionCheck {
    pub projection: Word,
    pub lhs: usize,
    pub rhs: usize,
    pub ok: bool,
}

/// Projects `x` to `Min(g)` by BFS in the ball (the gate must be unique)
/// and checks `d(x,p) + d(p,gp) + d(gp,gx) = d(x,gx)`.
pub fn geodesic_through_projection_check(ball: &CubeBall, gr: &Graph, g: &[Letter], x: &Word) -> Result<ProjectionCheck> {
    let dist = ball.bfs_from([ball.require(x, "base vertex")?]);
    let mut best: Option<(usize, Vec<&Word>)> = None;
    for (w, d) in ball.vertices.iter().zip(&dist) {
        let Some(d) = *d else { continue };
        if !in_minset(gr, g, w) {
            continue;
        }
        match &mut best {
            Some((bd, ws)) if d == *bd => ws.push(w),
            Some((bd, _)) if d > *bd => {}
            _ => best = Some((d, vec![w])),
        }
    }
    let (_, gates) = best.ok_or_else(|| RaagError::Clipped("minset misses the ball".into()))?;
    if gates.len() != 1 {
        return Err(RaagError::Internal(format!("{} nearest minset vertices", gates.len())));
    }
    let p = gates[0].clone();
    let gp = gr.multiply(&[g, &p]);
    let gx = gr.multiply(&[g, x]);
    let lhs = distance(gr, x, &p) + distance(gr, &p, &gp) + distance(gr, &gp, &gx);
    let rhs = distance(gr, x, &gx);
    Ok(ProjectionCheck {
        projection: p,
        lhs,
        rhs,
        ok: lhs == rhs,
    })
}

/// Exact hyperplane of the edge `(w, w x)`: the label and the shortest
/// representative of the coset `u A_{lk(v)}`, where `(u, u v)` is the edge
/// written with a positive letter.
pub fn hyperplane_key(gr: &Graph, w: &[Letter], x: Letter) -> (Vertex, Word) {
    let v = x.vertex();
    let u = if x.is_inverse() { gr.multiply(&[w, &[x]]) } else { gr.reduce(w) };
    let link = gr.neighbours(v);
    let mut u = u.into_letters();
    while let Some(i) = gr.back_movable(&u).into_iter().find(|&i| link.contains(u[i].vertex())) {
        u.remove(i);
    }
    (v, Word::new(gr.normal_form(&u)))
}

/// Hyperplanes crossed by a geodesic from `x` to `y`.
pub fn separating(gr: &Graph, x: &[Letter], y: &[Letter]) -> Vec<(Vertex, Word)> {
    let z = gr.multiply(&[&Word::new(x.to_vec()).inverse(), y]);
    let mut here = gr.reduce(x);
    let mut out = Vec::with_capacity(z.len());
    for &l in z.iter() {
        out.push(hyperplane_key(gr, &here, l));
        here = gr.multiply(&[&here, &[l]]);
    }
    out
}

fn translate(gr: &Graph, g: &Word, k: i64, key: &(Vertex, Word)) -> (Vertex, Word) {
    let step = if k >= 0 { g.clone() } else { g.inverse() };
    let mut u = key.1.clone();
    for _ in 0..k.unsigned_abs() {
        u = gr.multiply(&[&step, &u]);
    }
    hyperplane_key(gr, &u, key.0.letter())
}

/// For `x, y ∈ Min(g)`: every hyperplane separating `x, gx` has exactly one
/// `⟨g⟩`-translate separating `y, gy`, and this is a bijection.
pub fn axes_bijection(gr: &Graph, g: &Word, x: &Word, y: &Word) -> bool {
    let gx = gr.multiply(&[g, x]);
    let gy = gr.multiply(&[g, y]);
    let sx = separating(gr, x, &gx);
    let sy: HashSet<(Vertex, Word)> = separating(gr, y, &gy).into_iter().collect();
    if sx.len() != sy.len() {
        return false;
    }
    let span = (x.len() + y.len() + 2) as i64;
    let mut hit = HashSet::new();
    for h in &sx {
        let found: Vec<_> = (-span..=span)
            .map(|k| translate(gr, g, k, h))
            .filter(|t| sy.contains(t))
            .collect();
        if found.len() != 1 || !hit.insert(found[0].clone()) {
            return false;
        }
    }
    true
}
