//! Maximum cardinality matching on general graphs (Edmonds' blossom algorithm)
//! and an exhaustive reference for small instances.

use std::collections::VecDeque;

use thiserror::Error;

/// Largest graph accepted by [`brute_force_matching`].
pub const BRUTE_FORCE_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("graph has {0} vertices, exhaustive matching is limited to {BRUTE_FORCE_LIMIT}")]
    TooLarge(usize),
}

/// Simple undirected graph on vertices `1..=n`. Slot 0 exists but is never
/// connected, which keeps vehicle indices usable as vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    bits: Vec<bool>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            n,
            adj: vec![Vec::new(); n + 1],
            bits: vec![false; (n + 1) * (n + 1)],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = SimpleGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `{u, v}`; self loops and repeats are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(
            (1..=self.n).contains(&u) && (1..=self.n).contains(&v),
            "vertex out of range"
        );
        if u == v || self.has_edge(u, v) {
            return;
        }
        let stride = self.n + 1;
        self.bits[u * stride + v] = true;
        self.bits[v * stride + u] = true;
        // Keep neighbour lists sorted so exploration order is ascending.
        let pos = self.adj[u].partition_point(|&x| x < v);
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].partition_point(|&x| x < u);
        self.adj[v].insert(pos, u);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u <= self.n && v <= self.n && self.bits[u * (self.n + 1) + v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..=self.n)
            .flat_map(|u| {
                self.adj[u]
                    .iter()
                    .filter(move |&&v| v > u)
                    .map(move |&v| (u, v))
            })
            .collect()
    }

    /// Copy of the graph with every edge touching `drop` removed.
    pub fn without_vertices(&self, drop: impl Fn(usize) -> bool) -> SimpleGraph {
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| !drop(u) && !drop(v))
            .collect();
        SimpleGraph::from_edges(self.n, &edges)
    }
}

/// A set of vertex-disjoint edges, each stored as `(min, max)` and sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        pairs.sort_unstable();
        Matching { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True if every pair is an edge of `graph` and no vertex repeats.
    pub fn is_valid_in(&self, graph: &SimpleGraph) -> bool {
        let mut seen = vec![false; graph.vertex_count() + 1];
        for &(a, b) in &self.pairs {
            if !graph.has_edge(a, b) || seen[a] || seen[b] {
                return false;
            }
            seen[a] = true;
            seen[b] = true;
        }
        true
    }

    /// `mate[v]` is the partner of `v`, if any.
    pub fn mates(&self, n: usize) -> Vec<Option<usize>> {
        let mut mate = vec![None; n + 1];
        for &(a, b) in &self.pairs {
            mate[a] = Some(b);
            mate[b] = Some(a);
        }
        mate
    }
}

const NONE: usize = usize::MAX;

/// Blossom search state, reused across roots.
struct Blossom<'g> {
    g: &'g SimpleGraph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'g> Blossom<'g> {
    fn new(g: &'g SimpleGraph) -> Self {
        let size = g.vertex_count() + 1;
        Blossom {
            g,
            mate: vec![NONE; size],
            parent: vec![NONE; size],
            base: (0..size).collect(),
            used: vec![false; size],
            in_blossom: vec![false; size],
            queue: VecDeque::new(),
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut on_path = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            on_path[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if on_path[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn contract(&mut self, v: usize, u: usize) {
        let b = self.lca(v, u);
        self.in_blossom.iter_mut().for_each(|x| *x = false);
        self.mark_path(v, b, u);
        self.mark_path(u, b, v);
        for w in 1..self.mate.len() {
            if self.in_blossom[self.base[w]] {
                self.base[w] = b;
                if !self.used[w] {
                    self.used[w] = true;
                    self.queue.push_back(w);
                }
            }
        }
    }

    /// Breadth-first search for an augmenting path from `root`. Returns the
    /// free endpoint reached, if any.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.queue.clear();
        self.used[root] = true;
        self.queue.push_back(root);

        while let Some(v) = self.queue.pop_front() {
            for &to in self.g.neighbors(v) {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    self.contract(v, to);
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// Maximum cardinality matching via Edmonds' blossom algorithm, O(V^3).
///
/// Roots are tried in ascending order and neighbours are scanned in
/// ascending order, so the result is deterministic for a given graph.
pub fn maximum_matching(graph: &SimpleGraph) -> Matching {
    let mut b = Blossom::new(graph);
    for root in 1..=graph.vertex_count() {
        if b.mate[root] == NONE {
            if let Some(end) = b.find_path(root) {
                b.augment(end);
            }
        }
    }
    Matching::from_pairs(
        (1..=graph.vertex_count())
            .filter(|&v| b.mate[v] != NONE && v < b.mate[v])
            .map(|v| (v, b.mate[v])),
    )
}

/// Exact maximum matching size by exhaustive recursion. Intended as a test
/// oracle; refuses graphs with more than [`BRUTE_FORCE_LIMIT`] vertices.
pub fn brute_force_matching(graph: &SimpleGraph) -> Result<usize, MatchingError> {
    let n = graph.vertex_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(MatchingError::TooLarge(n));
    }
    let mut free = vec![true; n + 1];
    Ok(enumerate(graph, &mut free, 1))
}

fn enumerate(g: &SimpleGraph, free: &mut [bool], from: usize) -> usize {
    let Some(v) = (from..free.len()).find(|&v| free[v]) else {
        return 0;
    };
    free[v] = false;
    // Either v stays unmatched...
    let mut best = enumerate(g, free, v + 1);
    // ...or it is matched to a free neighbour.
    for &u in g.neighbors(v) {
        if free[u] {
            free[u] = false;
            best = best.max(1 + enumerate(g, free, v + 1));
            free[u] = true;
        }
    }
    free[v] = true;
    best
}
