//! Slow, direct reference computations for right-angled Artin groups.
//!
//! Nothing in here shares code with `raag-core`. Elements are identified by
//! pilings (one stack per generator), words are `Vec<i32>` with `+(v+1)` for
//! the generator `v` and `-(v+1)` for its inverse, and graphs are plain
//! adjacency matrices. Everything is brute force on purpose.

use std::collections::{HashMap, HashSet, VecDeque};

pub type OWord = Vec<i32>;

/// Simple graph as an adjacency matrix.
#[derive(Clone, Debug)]
pub struct Adj {
    pub n: usize,
    pub m: Vec<Vec<bool>>,
}

impl Adj {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Adj {
        let mut m = vec![vec![false; n]; n];
        for &(a, b) in edges {
            assert!(a != b);
            m[a][b] = true;
            m[b][a] = true;
        }
        Adj { n, m }
    }

    /// Letters `x`, `y` commute (as elements) iff same generator or adjacent.
    pub fn commute(&self, x: i32, y: i32) -> bool {
        let (a, b) = (gen(x), gen(y));
        a == b || self.m[a][b]
    }

    pub fn letters(&self) -> Vec<i32> {
        let mut out = Vec::new();
        for v in 0..self.n {
            out.push(v as i32 + 1);
            out.push(-(v as i32 + 1));
        }
        out
    }

    pub fn clique_number(&self) -> usize {
        let mut best = 0;
        for mask in 0u32..(1 << self.n) {
            let vs: Vec<usize> = (0..self.n).filter(|&i| mask >> i & 1 == 1).collect();
            let ok = vs
                .iter()
                .all(|&a| vs.iter().all(|&b| a == b || self.m[a][b]));
            if ok {
                best = best.max(vs.len());
            }
        }
        best
    }
}

pub fn gen(x: i32) -> usize {
    (x.unsigned_abs() - 1) as usize
}

pub fn inverse(w: &[i32]) -> OWord {
    w.iter().rev().map(|x| -x).collect()
}

pub fn concat(parts: &[&[i32]]) -> OWord {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Piling normal form: column `v` holds `+1`, `-1` or the `0` marker left
/// by a non-commuting letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piling(pub Vec<Vec<i8>>);

impl Piling {
    pub fn identity(n: usize) -> Piling {
        Piling(vec![Vec::new(); n])
    }

    pub fn push(&mut self, adj: &Adj, x: i32) {
        let v = gen(x);
        let s: i8 = if x > 0 { 1 } else { -1 };
        let cancels = self.0[v].last() == Some(&-s);
        if cancels {
            self.0[v].pop();
        } else {
            self.0[v].push(s);
        }
        for u in 0..adj.n {
            if u != v && !adj.m[u][v] {
                if cancels {
                    let top = self.0[u].pop();
                    debug_assert_eq!(top, Some(0));
                } else {
                    self.0[u].push(0);
                }
            }
        }
    }

    pub fn of(adj: &Adj, w: &[i32]) -> Piling {
        let mut p = Piling::identity(adj.n);
        for &x in w {
            p.push(adj, x);
        }
        p
    }

    /// Length of the element (number of non-marker entries).
    pub fn len(&self) -> usize {
        self.0.iter().flatten().filter(|&&e| e != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Generators appearing in reduced words for the element.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len())
            .filter(|&v| self.0[v].iter().any(|&e| e != 0))
            .collect()
    }

    /// Extract a reduced word by repeatedly removing letters from the top.
    pub fn word(&self, adj: &Adj) -> OWord {
        let mut p = self.clone();
        let mut rev = Vec::new();
        'outer: while !p.is_empty() {
            for v in 0..adj.n {
                if let Some(&s) = p.0[v].last() {
                    if s != 0 {
                        let x = if s > 0 { v as i32 + 1 } else { -(v as i32 + 1) };
                        // undo by multiplying with the inverse letter
                        p.push(adj, -x);
                        rev.push(x);
                        continue 'outer;
                    }
                }
            }
            unreachable!("piling without removable top letter");
        }
        rev.reverse();
        rev
    }
}

pub fn reduced_length(adj: &Adj, w: &[i32]) -> usize {
    Piling::of(adj, w).len()
}

pub fn equal_elements(adj: &Adj, u: &[i32], v: &[i32]) -> bool {
    Piling::of(adj, u) == Piling::of(adj, v)
}

/// Breadth-first Cayley ball: element -> word distance from the identity.
pub fn cayley_ball(adj: &Adj, radius: usize) -> HashMap<Piling, usize> {
    let mut dist = HashMap::new();
    let start = Piling::identity(adj.n);
    dist.insert(start.clone(), 0);
    let mut queue = VecDeque::from([start]);
    let letters = adj.letters();
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        if d == radius {
            continue;
        }
        for &x in &letters {
            let mut q = p.clone();
            q.push(adj, x);
            if !dist.contains_key(&q) {
                dist.insert(q.clone(), d + 1);
                queue.push_back(q);
            }
        }
    }
    dist
}

/// Ball elements as reduced words, in breadth-first order.
pub fn ball_words(adj: &Adj, radius: usize) -> Vec<OWord> {
    let mut seen = HashSet::new();
    let start = Piling::identity(adj.n);
    seen.insert(start.clone());
    let mut order = vec![Vec::new()];
    let mut frontier = vec![(start, Vec::new())];
    let letters = adj.letters();
    for _ in 0..radius {
        let mut next = Vec::new();
        for (p, w) in &frontier {
            for &x in &letters {
                let mut q = p.clone();
                q.push(adj, x);
                if seen.insert(q.clone()) {
                    let mut w2: OWord = w.clone();
                    w2.push(x);
                    order.push(w2.clone());
                    next.push((q, w2));
                }
            }
        }
        frontier = next;
    }
    order
}

/// All words of cyclically minimal length conjugate to `w` that are reachable
/// by rotations and swaps of adjacent commuting letters, starting from a
/// cyclically reduced `w`.
pub fn rotation_shuffle_closure(adj: &Adj, w: &[i32]) -> HashSet<OWord> {
    let mut seen = HashSet::new();
    seen.insert(w.to_vec());
    let mut queue = VecDeque::from([w.to_vec()]);
    while let Some(u) = queue.pop_front() {
        let mut nexts = Vec::new();
        if !u.is_empty() {
            let mut r = u[1..].to_vec();
            r.push(u[0]);
            nexts.push(r);
        }
        for i in 0..u.len().saturating_sub(1) {
            if gen(u[i]) != gen(u[i + 1]) && adj.commute(u[i], u[i + 1]) {
                let mut s = u.clone();
                s.swap(i, i + 1);
                nexts.push(s);
            }
        }
        for n in nexts {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Minimal length of a conjugate of `w`, by searching conjugators in a ball.
pub fn conjugacy_length_by_search(adj: &Adj, w: &[i32], radius: usize) -> usize {
    ball_words(adj, radius)
        .iter()
        .map(|g| reduced_length(adj, &concat(&[g, w, &inverse(g)])))
        .min()
        .unwrap_or(0)
}

/// Search a conjugator `g` with `|g| <= radius` and `g^-1 x g` equal to `y`.
pub fn conjugate_by_search(adj: &Adj, x: &[i32], y: &[i32], radius: usize) -> bool {
    let target = Piling::of(adj, y);
    ball_words(adj, radius)
        .iter()
        .any(|g| Piling::of(adj, &concat(&[&inverse(g), x, g])) == target)
}

/// Search a common conjugator `g` (|g| <= radius) with every
/// `g^-1 images[i] g` in the standard subgroup on `delta`.
pub fn common_conjugator_into(
    adj: &Adj,
    ball: &[OWord],
    images: &[OWord],
    delta: &[usize],
) -> Option<OWord> {
    'next: for g in ball {
        let gi = inverse(g);
        for im in images {
            let p = Piling::of(adj, &concat(&[&gi, im, g]));
            if p.support().iter().any(|v| !delta.contains(v)) {
                continue 'next;
            }
        }
        return Some(g.clone());
    }
    None
}

/// Whitehead-type partition data found by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OPartition {
    /// Sorted letters of the two sides, smaller side-vector first.
    pub sides: (Vec<i32>, Vec<i32>),
    pub link: Vec<i32>,
}

fn link_of(adj: &Adj, x: i32) -> Vec<i32> {
    let mut out: Vec<i32> = adj
        .letters()
        .into_iter()
        .filter(|&y| gen(y) != gen(x) && adj.m[gen(x)][gen(y)])
        .collect();
    out.sort();
    out
}

/// Checks the four based-partition axioms literally.
pub fn is_based_partition(adj: &Adj, p: &[i32], q: &[i32], l: &[i32], b: i32) -> bool {
    if !(p.contains(&b) && q.contains(&-b)) {
        return false;
    }
    let mut ls = l.to_vec();
    ls.sort();
    if ls != link_of(adj, b) {
        return false;
    }
    for &x in p.iter().chain(q) {
        let split = (p.contains(&x) && q.contains(&-x)) || (q.contains(&x) && p.contains(&-x));
        if split && !link_of(adj, x).iter().all(|y| l.contains(y)) {
            return false;
        }
    }
    for &x in p {
        for &y in q {
            if x != -y && adj.commute(x, y) {
                return false;
            }
        }
    }
    p.len() >= 2 && q.len() >= 2
}

/// Every Whitehead partition by brute force over all 3^(2n) assignments.
pub fn all_partitions(adj: &Adj) -> Vec<(OPartition, Vec<i32>)> {
    let letters = adj.letters();
    let k = letters.len();
    let mut found: HashMap<OPartition, Vec<i32>> = HashMap::new();
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let (mut p, mut q, mut l) = (vec![], vec![], vec![]);
        for &x in &letters {
            match c % 3 {
                0 => p.push(x),
                1 => q.push(x),
                _ => l.push(x),
            }
            c /= 3;
        }
        let bases: Vec<i32> = letters
            .iter()
            .copied()
            .filter(|&b| is_based_partition(adj, &p, &q, &l, b))
            .collect();
        if bases.is_empty() {
            continue;
        }
        let (mut a, mut bb) = (p.clone(), q.clone());
        a.sort();
        bb.sort();
        let sides = if a <= bb { (a, bb) } else { (bb, a) };
        l.sort();
        let key = OPartition { sides, link: l };
        let entry = found.entry(key).or_default();
        for b in bases {
            if !entry.contains(&b) {
                entry.push(b);
            }
        }
    }
    let mut out: Vec<_> = found.into_iter().collect();
    for (_, b) in out.iter_mut() {
        b.sort();
    }
    out.sort();
    out
}

/// Shortest loop in the single blow-up along the partition `(p, q, l)`,
/// minus the letters it spends: the number of partition-hyperplane edges.
///
/// The blow-up has two vertices (+ for `p`, - for `q`) joined by the
/// partition edge. A letter `x` with generator outside the link runs from the
/// side holding `x^-1` to the side holding `x`; link letters are loops at
/// both vertices. Every word of length `len` conjugate to `w` (within the
/// rotation/shuffle closure) is tried as the letter sequence of a closed walk.
pub fn blowup_crossings(adj: &Adj, p: &[i32], l: &[i32], cyclic_word: &[i32]) -> usize {
    if cyclic_word.is_empty() {
        return 0;
    }
    let side = |x: i32| -> Option<bool> {
        if l.contains(&x) {
            None
        } else {
            Some(p.contains(&x))
        }
    };
    let mut best = usize::MAX;
    for w in rotation_shuffle_closure(adj, cyclic_word) {
        // Closed walk starting at either vertex: dynamic programme over the
        // current vertex, counting partition edges.
        for start in [true, false] {
            let mut cost: [usize; 2] = [usize::MAX, usize::MAX];
            cost[start as usize] = 0;
            for &x in &w {
                let mut next = [usize::MAX, usize::MAX];
                for at in [false, true] {
                    let c = cost[at as usize];
                    if c == usize::MAX {
                        continue;
                    }
                    match (side(-x), side(x)) {
                        (None, None) => {
                            next[at as usize] = next[at as usize].min(c);
                            next[!at as usize] = next[!at as usize].min(c + 1);
                        }
                        (Some(from), Some(to)) => {
                            let extra = usize::from(from != at);
                            next[to as usize] = next[to as usize].min(c + extra);
                            let other = !to;
                            next[other as usize] = next[other as usize].min(c + extra + 1);
                        }
                        _ => unreachable!("link is closed under inversion"),
                    }
                }
                cost = next;
            }
            best = best.min(cost[start as usize]);
        }
    }
    best
}

/// Median-graph interval computed by scanning a list of vertices with the
/// word metric.
pub fn interval_scan(adj: &Adj, vertices: &[OWord], u: &[i32], v: &[i32]) -> Vec<usize> {
    let d = |a: &[i32], b: &[i32]| reduced_length(adj, &concat(&[&inverse(a), b]));
    let duv = d(u, v);
    (0..vertices.len())
        .filter(|&i| d(u, &vertices[i]) + d(&vertices[i], v) == duv)
        .collect()
}

/// Exponent sum of each generator.
pub fn exponent_sums(n: usize, w: &[i32]) -> Vec<i64> {
    let mut out = vec![0; n];
    for &x in w {
        out[gen(x)] += if x > 0 { 1 } else { -1 };
    }
    out
}
