#![allow(dead_code)]

use raag::{Graph, Letter, Vertex, Word};
use raag_oracles::{Adj, OWord};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn adj_of(g: &Graph) -> Adj {
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|(a, b)| (a.index(), b.index())).collect();
    Adj::new(g.len(), &edges)
}

pub fn to_oracle(w: &[Letter]) -> OWord {
    w.iter()
        .map(|x| {
            let v = x.vertex().index() as i32 + 1;
            if x.is_inverse() {
                -v
            } else {
                v
            }
        })
        .collect()
}

pub fn from_oracle(w: &[i32]) -> Word {
    Word::new(
        w.iter()
            .map(|&x| Letter::new(Vertex((x.unsigned_abs() - 1) as u8), x < 0))
            .collect(),
    )
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    let names = &["a", "b", "c", "d", "e"][..n];
    let e: Vec<(&str, &str)> = edges.iter().map(|&(a, b)| (names[a], names[b])).collect();
    Graph::new(names, &e).unwrap()
}

pub fn free(n: usize) -> Graph {
    graph(n, &[])
}

pub fn path(n: usize) -> Graph {
    let e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    graph(n, &e)
}

/// One graph per isomorphism class on `n` vertices.
pub fn graphs_up_to_iso(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                    .collect();
                e.sort();
                e
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(graph(n, &edges));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn random_word<R: Rng>(rng: &mut R, g: &Graph, len: usize) -> Word {
    let letters: Vec<Letter> = g.all_letters().iter().collect();
    Word::new((0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect())
}

/// A random word whose free reduction has no immediate cancellation.
pub fn random_nontrivial<R: Rng>(rng: &mut R, g: &Graph, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let w = g.reduce(&random_word(rng, g, len));
        if !w.is_empty() {
            return w;
        }
    }
}

/// A random (unreduced) word with length drawn from `lens`.
pub fn random_word_in<R: Rng>(rng: &mut R, g: &Graph, lens: std::ops::RangeInclusive<usize>) -> Word {
    let len = rng.gen_range(lens);
    random_word(rng, g, len)
}
