//! Simple undirected graphs on `0..n` with packed bitset adjacency rows.
//!
//! Clique detection is Bron–Kerbosch with Tomita pivoting, run from each
//! vertex of a degeneracy ordering over its later neighbours, stopping as
//! soon as the current clique reaches the requested size. Independent sets
//! are counted by size with the recurrence `I(G) = I(G - v) + x I(G - N[v])`,
//! splitting into connected components and memoising on vertex masks.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Vertex cap for exact independent-set counting.
pub const EXACT_VERTEX_CAP: usize = 40;

/// A fixed-width bitset over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = BitSet::new(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn intersection_len(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn difference(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// A simple undirected graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<BitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            rows: vec![BitSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        if n >= 3 {
            for i in 0..n {
                g.add_edge(i, (i + 1) % n);
            }
        } else if n == 2 {
            g.add_edge(0, 1);
        }
        g
    }

    /// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
    pub fn petersen() -> Self {
        let mut g = Graph::empty(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(5 + i, 5 + (i + 2) % 5);
            g.add_edge(i, 5 + i);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Domain(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Adds `uv`; self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.rows[u].insert(v);
            self.rows[v].insert(u);
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u].remove(v);
        self.rows[v].remove(u);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.rows[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let pairs = self.n as f64 * (self.n as f64 - 1.0) / 2.0;
        self.edge_count() as f64 / pairs
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u != v && self.has_edge(u, v))
        })
    }

    /// True when no two distinct listed vertices are adjacent.
    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u == v || !self.has_edge(u, v))
        })
    }

    /// Vertices in degeneracy order (repeatedly remove a minimum-degree vertex).
    pub fn degeneracy_order(&self) -> Vec<usize> {
        let n = self.n;
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let max_deg = deg.iter().copied().max().unwrap_or(0);
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
        for v in 0..n {
            buckets[deg[v]].push(v);
        }
        let mut removed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut cur = 0;
        while order.len() < n {
            cur = cur.min(max_deg);
            while buckets[cur].is_empty() {
                cur += 1;
            }
            let v = buckets[cur].pop().unwrap();
            if removed[v] || deg[v] != cur {
                continue;
            }
            removed[v] = true;
            order.push(v);
            for u in self.rows[v].iter() {
                if !removed[u] {
                    deg[u] -= 1;
                    buckets[deg[u]].push(u);
                    if deg[u] < cur {
                        cur = deg[u];
                    }
                }
            }
        }
        order
    }

    /// The complement graph.
    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }
}

/// Searches for a clique on `t` vertices.
///
/// Returns a verified witness (sorted) or `None`.
pub fn contains_clique(graph: &Graph, t: usize) -> Option<Vec<usize>> {
    let n = graph.n_vertices();
    if t == 0 {
        return Some(Vec::new());
    }
    if n < t {
        return None;
    }
    if t == 1 {
        return Some(vec![0]);
    }
    let order = graph.degeneracy_order();
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    for &v in &order {
        let nbrs = graph.neighbors(v);
        if nbrs.len() + 1 < t {
            continue;
        }
        let mut later = BitSet::new(n);
        let mut earlier = BitSet::new(n);
        for u in nbrs.iter() {
            if position[u] > position[v] {
                later.insert(u);
            } else {
                earlier.insert(u);
            }
        }
        let mut clique = vec![v];
        if expand(graph, &mut clique, later, earlier, t) {
            clique.sort_unstable();
            debug_assert!(graph.is_clique(&clique));
            return Some(clique);
        }
    }
    None
}

fn expand(graph: &Graph, clique: &mut Vec<usize>, mut cand: BitSet, mut excl: BitSet, t: usize) -> bool {
    if clique.len() == t {
        return true;
    }
    if clique.len() + cand.len() < t {
        return false;
    }
    let pivot = cand
        .union(&excl)
        .iter()
        .max_by_key(|&u| cand.intersection_len(graph.neighbors(u)))
        .expect("candidate set is nonempty");
    let branch: Vec<usize> = cand.difference(graph.neighbors(pivot)).iter().collect();
    for v in branch {
        let nbrs = graph.neighbors(v);
        clique.push(v);
        if expand(graph, clique, cand.intersection(nbrs), excl.intersection(nbrs), t) {
            return true;
        }
        clique.pop();
        cand.remove(v);
        excl.insert(v);
    }
    false
}

/// Number of independent vertex sets of each size.
///
/// Entry `k` counts independent sets with exactly `k` vertices, so entry 0 is
/// always 1 and the vector has length `n + 1`.
pub fn count_independent_sets_by_size(graph: &Graph) -> Result<Vec<u128>> {
    let n = graph.n_vertices();
    if n > EXACT_VERTEX_CAP {
        return Err(Error::ExactCapExceeded {
            n,
            cap: EXACT_VERTEX_CAP,
        });
    }
    let nbr: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, u| m | 1 << u))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut counter = IndependentCounter {
        nbr: &nbr,
        memo: HashMap::new(),
    };
    let mut poly = counter.count(full);
    poly.resize(n + 1, 0);
    Ok(poly)
}

struct IndependentCounter<'a> {
    nbr: &'a [u64],
    memo: HashMap<u64, Vec<u128>>,
}

impl IndependentCounter<'_> {
    fn count(&mut self, mask: u64) -> Vec<u128> {
        if mask == 0 {
            return vec![1];
        }
        if let Some(p) = self.memo.get(&mask) {
            return p.clone();
        }
        let comp = self.component(mask);
        let result = if comp != mask {
            poly_mul(&self.count(comp), &self.count(mask & !comp))
        } else {
            let (v, deg) = bits(mask)
                .map(|v| (v, (self.nbr[v] & mask).count_ones()))
                .max_by_key(|&(_, d)| d)
                .unwrap();
            if deg == 0 {
                binomial_row(mask.count_ones() as usize)
            } else {
                let without = self.count(mask & !(1 << v));
                let with = self.count(mask & !(1 << v) & !self.nbr[v]);
                let mut out = without;
                if out.len() < with.len() + 1 {
                    out.resize(with.len() + 1, 0);
                }
                for (k, c) in with.iter().enumerate() {
                    out[k + 1] += c;
                }
                out
            }
        };
        self.memo.insert(mask, result.clone());
        result
    }

    /// The connected component of the lowest vertex in `mask`.
    fn component(&self, mask: u64) -> u64 {
        let start = mask & mask.wrapping_neg();
        let mut seen = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.nbr[v] & mask;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}

fn binomial_row(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for k in 1..=n {
        let prev = row[k - 1];
        row.push(prev * (n + 1 - k) as u128 / k as u128);
    }
    row
}

fn poly_mul(a: &[u128], b: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
