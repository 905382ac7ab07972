//! Conflict directed graph (CDG) and coexisting undirected graph (CUG).
//!
//! The CDG has vertices `0..=n`, where 0 is the virtual leader. Diverging
//! conflicts become unidirectional edges `(i, j)` meaning `i` must pass
//! before `j`; crossing conflicts become bidirectional edges. The CUG is the
//! complement of the CDG on the vehicles `1..=n`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::ConflictTable;
use crate::matching::SimpleGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vehicle index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("no conflict sets for vehicle {0}")]
    MissingVehicle(usize),
    #[error("conflict set of vehicle {owner} lists {member}, which is not an earlier vehicle")]
    NotEarlier { owner: usize, member: usize },
    #[error("vehicles {0} and {1} are related by more than one edge")]
    DuplicateRelation(usize, usize),
    #[error("vertex 0 cannot take part in a crossing edge")]
    LeaderCrossing,
    #[error("malformed graph text at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Relation between two CDG vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    None,
    /// Same lane; the smaller index is ahead.
    Diverging,
    Crossing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictDirectedGraph {
    n: usize,
    uni: Vec<(usize, usize)>,
    bi: Vec<(usize, usize)>,
    relation: Vec<Relation>,
    diverging_parents: Vec<Vec<usize>>,
    crossing_parents: Vec<Vec<usize>>,
}

impl ConflictDirectedGraph {
    /// Builds a CDG from explicit edge lists. Pairs are normalised to
    /// `(smaller, larger)`; a pair may appear in at most one list.
    pub fn from_edges(
        n: usize,
        uni: &[(usize, usize)],
        bi: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let stride = n + 1;
        let mut relation = vec![Relation::None; stride * stride];
        let mut diverging_parents = vec![Vec::new(); stride];
        let mut crossing_parents = vec![Vec::new(); stride];
        let mut uni_edges = Vec::with_capacity(uni.len());
        let mut bi_edges = Vec::with_capacity(bi.len());

        let mut put = |a: usize, b: usize, rel: Relation| -> Result<(usize, usize), GraphError> {
            let (i, j) = (a.min(b), a.max(b));
            if j > n || j == 0 {
                return Err(GraphError::IndexOutOfRange { index: j, n });
            }
            if i == j {
                return Err(GraphError::DuplicateRelation(i, j));
            }
            if relation[i * stride + j] != Relation::None {
                return Err(GraphError::DuplicateRelation(i, j));
            }
            relation[i * stride + j] = rel;
            relation[j * stride + i] = rel;
            Ok((i, j))
        };

        for &(a, b) in uni {
            let (i, j) = put(a, b, Relation::Diverging)?;
            diverging_parents[j].push(i);
            uni_edges.push((i, j));
        }
        for &(a, b) in bi {
            if a == 0 || b == 0 {
                return Err(GraphError::LeaderCrossing);
            }
            let (i, j) = put(a, b, Relation::Crossing)?;
            crossing_parents[j].push(i);
            bi_edges.push((i, j));
        }
        uni_edges.sort_unstable();
        bi_edges.sort_unstable();
        diverging_parents.iter_mut().for_each(|v| v.sort_unstable());
        crossing_parents.iter_mut().for_each(|v| v.sort_unstable());

        Ok(ConflictDirectedGraph {
            n,
            uni: uni_edges,
            bi: bi_edges,
            relation,
            diverging_parents,
            crossing_parents,
        })
    }

    pub fn vehicle_count(&self) -> usize {
        self.n
    }

    pub fn uni_edges(&self) -> &[(usize, usize)] {
        &self.uni
    }

    pub fn bi_edges(&self) -> &[(usize, usize)] {
        &self.bi
    }

    pub fn relation(&self, a: usize, b: usize) -> Relation {
        self.relation[a * (self.n + 1) + b]
    }

    /// True if `a` and `b` may not pass the intersection together.
    pub fn conflicts(&self, a: usize, b: usize) -> bool {
        self.relation(a, b) != Relation::None
    }

    /// Smaller-index vertices `m` with a unidirectional edge `(m, i)`.
    pub fn diverging_parents(&self, i: usize) -> &[usize] {
        &self.diverging_parents[i]
    }

    /// Smaller-index vehicles sharing a crossing conflict with `i`.
    pub fn crossing_parents(&self, i: usize) -> &[usize] {
        &self.crossing_parents[i]
    }

    /// Closest same-lane vehicle ahead of `i`, if any.
    pub fn lane_predecessor(&self, i: usize) -> Option<usize> {
        self.diverging_parents[i]
            .iter()
            .copied()
            .filter(|&m| m != 0)
            .max()
    }

    /// Same-lane groups: `group[i]` is the smallest vehicle connected to `i`
    /// through unidirectional edges (vertex 0 excluded).
    pub fn lane_groups(&self) -> Vec<usize> {
        let mut group: Vec<usize> = (0..=self.n).collect();
        fn find(g: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while g[r] != r {
                r = g[r];
            }
            let mut c = x;
            while g[c] != r {
                let next = g[c];
                g[c] = r;
                c = next;
            }
            r
        }
        for &(i, j) in &self.uni {
            if i == 0 {
                continue;
            }
            let (ri, rj) = (find(&mut group, i), find(&mut group, j));
            let (lo, hi) = (ri.min(rj), ri.max(rj));
            group[hi] = lo;
        }
        (0..=self.n).map(|i| find(&mut group, i)).collect()
    }

    /// True if every vertex is reachable from 0, following unidirectional
    /// edges forwards and bidirectional edges either way.
    pub fn has_rooted_spanning_tree(&self) -> bool {
        let mut out = vec![Vec::new(); self.n + 1];
        for &(i, j) in &self.uni {
            out[i].push(j);
        }
        for &(i, j) in &self.bi {
            out[i].push(j);
            out[j].push(i);
        }
        let mut seen = vec![false; self.n + 1];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &w in &out[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Plain-text dump: `cdg N`, then `u i j` and `b i j` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("cdg {}\n", self.n);
        for &(i, j) in &self.uni {
            let _ = writeln!(s, "u {i} {j}");
        }
        for &(i, j) in &self.bi {
            let _ = writeln!(s, "b {i} {j}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let (n, lines) = parse_header(text, "cdg")?;
        let mut uni = Vec::new();
        let mut bi = Vec::new();
        for (line, kind, i, j) in lines {
            match kind {
                "u" => uni.push((i, j)),
                "b" => bi.push((i, j)),
                other => {
                    return Err(GraphError::Parse {
                        line,
                        reason: format!("unexpected edge kind `{other}`"),
                    })
                }
            }
        }
        Self::from_edges(n, &uni, &bi)
    }
}

type EdgeLine<'a> = (usize, &'a str, usize, usize);

fn parse_header<'a>(text: &'a str, tag: &str) -> Result<(usize, Vec<EdgeLine<'a>>), GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let err = |line: usize, reason: String| GraphError::Parse {
        line: line + 1,
        reason,
    };
    let (hl, header) = lines.next().ok_or_else(|| err(0, "empty input".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(err(hl, format!("expected `{tag} N` header")));
    }
    let n = parts
        .next()
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| err(hl, "missing vertex count".into()))?;
    let mut edges = Vec::new();
    for (ln, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(ln, "expected `kind i j`".into()));
        }
        let i = f[1]
            .parse()
            .map_err(|_| err(ln, format!("bad vertex `{}`", f[1])))?;
        let j = f[2]
            .parse()
            .map_err(|_| err(ln, format!("bad vertex `{}`", f[2])))?;
        edges.push((ln + 1, f[0], i, j));
    }
    Ok((n, edges))
}

/// Builds the CDG from frozen conflict sets of vehicles `1..=n`.
pub fn build_cdg(table: &ConflictTable, n: usize) -> Result<ConflictDirectedGraph, GraphError> {
    let mut uni = Vec::new();
    let mut bi = Vec::new();
    for (index, sets) in table.iter() {
        if index == 0 || index > n {
            return Err(GraphError::IndexOutOfRange { index, n });
        }
        for &m in &sets.diverging {
            if m >= index {
                return Err(GraphError::NotEarlier {
                    owner: index,
                    member: m,
                });
            }
            uni.push((m, index));
        }
        for &m in &sets.crossing {
            if m >= index || m == 0 {
                return Err(GraphError::NotEarlier {
                    owner: index,
                    member: m,
                });
            }
            bi.push((m, index));
        }
    }
    if let Some(missing) = (1..=n).find(|&i| table.get(i).is_none()) {
        return Err(GraphError::MissingVehicle(missing));
    }
    ConflictDirectedGraph::from_edges(n, &uni, &bi)
}

/// Complement of the CDG on vehicles `1..=n`: an edge means the two
/// vehicles may occupy the intersection at the same time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoexistingUndirectedGraph {
    graph: SimpleGraph,
}

impl CoexistingUndirectedGraph {
    pub fn from_graph(graph: SimpleGraph) -> Self {
        CoexistingUndirectedGraph { graph }
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn vehicle_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn coexist(&self, a: usize, b: usize) -> bool {
        self.graph.has_edge(a, b)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges()
    }

    /// Plain-text dump: `cug N`, then `e i j` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("cug {}\n", self.vehicle_count());
        for (i, j) in self.edges() {
            let _ = writeln!(s, "e {i} {j}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let (n, lines) = parse_header(text, "cug")?;
        let mut g = SimpleGraph::new(n);
        for (line, kind, i, j) in lines {
            if kind != "e" {
                return Err(GraphError::Parse {
                    line,
                    reason: format!("unexpected edge kind `{kind}`"),
                });
            }
            if i == 0 || j == 0 || i > n || j > n {
                return Err(GraphError::IndexOutOfRange { index: i.max(j), n });
            }
            g.add_edge(i, j);
        }
        Ok(CoexistingUndirectedGraph { graph: g })
    }
}

pub fn build_cug(cdg: &ConflictDirectedGraph) -> CoexistingUndirectedGraph {
    let n = cdg.vehicle_count();
    let mut g = SimpleGraph::new(n);
    for i in 1..=n {
        for j in i + 1..=n {
            if !cdg.conflicts(i, j) {
                g.add_edge(i, j);
            }
        }
    }
    CoexistingUndirectedGraph { graph: g }
}
