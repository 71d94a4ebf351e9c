//! Blow-up simplices, the Whitehead move graph of marked Salvettis, and the
//! single-partition norm change identity.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::automorphism::Automorphism;
use crate::error::Result;
use crate::graph::{Graph, VertexSet};
use crate::mccool::{preserves_standard_family, signed_automorphisms};
use crate::partition::{based_partitions, enumerate, BasedPartition, WhiteheadPartition};
use crate::word::Word;
use crate::Verdict;

pub const DEFAULT_NODE_CAP: usize = 5_000;

/// All sets of at most `max_size` pairwise compatible partitions, by size
/// and then in enumeration order.
pub fn enumerate_simplices(g: &Graph, max_size: usize) -> Vec<Vec<WhiteheadPartition>> {
    let parts: Vec<WhiteheadPartition> = enumerate(g).into_iter().map(|(p, _)| p).collect();
    let n = parts.len();
    let compat: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| i != j && parts[i].compatible(g, &parts[j]).expect("distinct partitions"))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for _ in 0..max_size {
        if layer.is_empty() {
            break;
        }
        out.extend(layer.iter().map(|c| c.iter().map(|&i| parts[i]).collect()));
        layer = layer
            .iter()
            .flat_map(|c| {
                let last = *c.last().expect("cliques are nonempty");
                (last + 1..n)
                    .filter(|&j| c.iter().all(|&i| compat[i][j]))
                    .map(|j| {
                        let mut d = c.clone();
                        d.push(j);
                        d
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug)]
pub struct MoveGraphNode {
    pub marking: Automorphism,
    /// Targets pulled back by the marking, cyclically reduced.
    pub pulled: Vec<Word>,
    pub in_sg: Verdict,
}

impl MoveGraphNode {
    pub fn head(&self) -> Vec<usize> {
        self.pulled.iter().map(|w| w.len()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct MoveGraph {
    pub nodes: Vec<MoveGraphNode>,
    /// `(from, to, partition)`, with `from < to` and no repeats.
    pub edges: Vec<(usize, usize, BasedPartition)>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveGraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub sg_nodes: usize,
    pub unknown_nodes: usize,
    pub components: usize,
    /// Components of the subgraph induced on `S^G` nodes.
    pub sg_components: usize,
    pub truncated: bool,
}

/// Whether `[S, m]` lies in `S^G`: some signed graph automorphism `σ` makes
/// `σ ∘ m^-1` preserve the family.
pub fn in_sg(g: &Graph, marking: &Automorphism, family: &[VertexSet]) -> Verdict {
    if family.is_empty() {
        return Verdict::Yes;
    }
    let inv = marking.inverse();
    let mut verdict = Verdict::No;
    for sigma in signed_automorphisms(g) {
        let s = Automorphism::graph_permutation(g, sigma).expect("graph automorphism");
        match preserves_standard_family(g, &s.compose(g, &inv).expect("same graph"), family) {
            Verdict::Yes => return Verdict::Yes,
            Verdict::Unknown => verdict = Verdict::Unknown,
            Verdict::No => {}
        }
    }
    verdict
}

/// BFS over every Whitehead move from the identity marking, keeping marked
/// Salvettis whose head is at most `bound` entrywise (the identity is
/// always kept). Markings are identified up to inner automorphisms and
/// graph symmetries.
pub fn move_graph(g: &Graph, targets: &[Word], family: &[VertexSet], bound: &[usize], cap: usize) -> Result<MoveGraph> {
    let moves: Vec<(BasedPartition, Automorphism)> = based_partitions(g)
        .into_iter()
        .map(|bp| Automorphism::whitehead(g, &bp).map(|w| (bp, w)))
        .collect::<Result<_>>()?;
    let within = |head: &[usize]| head.len() == bound.len() && head.iter().zip(bound).all(|(h, b)| h <= b);
    let identity = Automorphism::identity(g);
    let mut nodes = vec![MoveGraphNode {
        in_sg: in_sg(g, &identity, family),
        marking: identity,
        pulled: targets.iter().map(|t| g.cyclic_reduce(t)).collect(),
    }];
    let mut buckets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::from([(nodes[0].head(), vec![0])]);
    let mut edges: BTreeSet<(usize, usize, BasedPartition)> = BTreeSet::new();
    let mut truncated = false;
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let here = nodes[n].clone();
        let succ: Vec<(BasedPartition, Automorphism, Vec<Word>)> = moves
            .par_iter()
            .filter_map(|(bp, w)| {
                let pulled: Vec<Word> = here.pulled.iter().map(|t| g.cyclic_reduce(&w.apply(g, t))).collect();
                if !within(&pulled.iter().map(|w| w.len()).collect::<Vec<_>>()) {
                    return None;
                }
                Some((*bp, here.marking.compose(g, w).expect("same graph"), pulled))
            })
            .collect();
        for (bp, marking, pulled) in succ {
            let head: Vec<usize> = pulled.iter().map(|w| w.len()).collect();
            let bucket = buckets.entry(head).or_default();
            let mut found = None;
            for &m in bucket.iter() {
                if nodes[m].marking.is_graph_perm_equivalent(g, &marking)? {
                    found = Some(m);
                    break;
                }
            }
            let m = match found {
                Some(m) => m,
                None => {
                    if nodes.len() >= cap {
                        truncated = true;
                        continue;
                    }
                    let m = nodes.len();
                    bucket.push(m);
                    nodes.push(MoveGraphNode {
                        in_sg: in_sg(g, &marking, family),
                        marking,
                        pulled,
                    });
                    queue.push_back(m);
                    m
                }
            };
            if m != n {
                edges.insert((n.min(m), n.max(m), bp));
            }
        }
    }
    Ok(MoveGraph {
        nodes,
        edges: edges.into_iter().collect(),
        truncated,
    })
}

impl MoveGraph {
    fn components(&self, keep: impl Fn(usize) -> bool) -> usize {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b, _) in &self.edges {
            if keep(a) && keep(b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in (0..n).filter(|&s| keep(s)) {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    pub fn stats(&self) -> MoveGraphStats {
        let sg = |i: usize| self.nodes[i].in_sg == Verdict::Yes;
        MoveGraphStats {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            sg_nodes: (0..self.nodes.len()).filter(|&i| sg(i)).count(),
            unknown_nodes: self.nodes.iter().filter(|n| n.in_sg == Verdict::Unknown).count(),
            components: self.components(|_| true),
            sg_components: self.components(sg),
            truncated: self.truncated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChangeNorm {
    pub before: Vec<usize>,
    pub after: Vec<usize>,
    pub predicted: Vec<usize>,
    pub ok: bool,
}

/// `ℓ(W(t)) = ℓ(t) + crossings of the blow-up hyperplane − occurrences of
/// the basepoint's generator`, entrywise over the pulled targets.
pub fn verify_changenorm(g: &Graph, pulled: &[Word], bp: &BasedPartition) -> Result<ChangeNorm> {
    let w = Automorphism::whitehead(g, bp)?;
    let part = bp.partition();
    let base = bp.base().vertex();
    let mut out = ChangeNorm {
        before: Vec::new(),
        after: Vec::new(),
        predicted: Vec::new(),
        ok: true,
    };
    for t in pulled {
        let t = g.cyclic_reduce(t);
        let after = g.translation_length(&w.apply(g, &t));
        let predicted = (t.len() + part.crossing_count(g, &t))
            .checked_sub(t.iter().filter(|x| x.vertex() == base).count());
        out.ok &= predicted == Some(after);
        out.before.push(t.len());
        out.after.push(after);
        out.predicted.push(predicted.unwrap_or(0));
    }
    Ok(out)
}
