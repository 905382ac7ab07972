//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{FRAC_PI_2, PI};

use intersched::{Approach, Lane, Turn, VehicleRecord};
use proptest::prelude::*;

// ---------------------------------------------------------------------------
// Analytic movement paths.

#[derive(Debug, Clone, Copy)]
pub enum Shape {
    Segment {
        a: (f64, f64),
        b: (f64, f64),
    },
    /// Arc of the circle `(c, r)` swept from angle `t0` to `t1`.
    Arc {
        c: (f64, f64),
        r: f64,
        t0: f64,
        t1: f64,
    },
}

fn rotate(p: (f64, f64), approach: Approach) -> (f64, f64) {
    let (x, y) = p;
    match approach {
        Approach::South => (x, y),
        Approach::West => (y, -x),
        Approach::North => (-x, -y),
        Approach::East => (-y, x),
    }
}

fn rotation_angle(approach: Approach) -> f64 {
    match approach {
        Approach::South => 0.0,
        Approach::West => -FRAC_PI_2,
        Approach::North => PI,
        Approach::East => FRAC_PI_2,
    }
}

/// Exact path of a lane's movement in a box of half-side `h`, lane width `w`.
pub fn analytic_path(lane: Lane, h: f64, w: f64) -> Shape {
    let (k_left, k_straight, k_right) = (0.5 * w, 1.5 * w, 2.5 * w);
    let rot = rotation_angle(lane.approach);
    match lane.turn {
        Turn::Straight => Shape::Segment {
            a: rotate((k_straight, -h), lane.approach),
            b: rotate((k_straight, h), lane.approach),
        },
        Turn::Left => Shape::Arc {
            c: rotate((-h, -h), lane.approach),
            r: h + k_left,
            t0: rot,
            t1: rot + FRAC_PI_2,
        },
        Turn::Right => Shape::Arc {
            c: rotate((h, -h), lane.approach),
            r: h - k_right,
            t0: rot + PI,
            t1: rot + FRAC_PI_2,
        },
    }
}

pub fn analytic_length(shape: &Shape) -> f64 {
    match *shape {
        Shape::Segment { a, b } => ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt(),
        Shape::Arc { r, t0, t1, .. } => r * (t1 - t0).abs(),
    }
}

fn point_at(shape: &Shape, s: f64) -> (f64, f64) {
    match *shape {
        Shape::Segment { a, b } => (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)),
        Shape::Arc { c, r, t0, t1 } => {
            let t = t0 + s * (t1 - t0);
            (c.0 + r * t.cos(), c.1 + r * t.sin())
        }
    }
}

/// Parameter in [0, 1] of `p` along `shape`, if `p` lies on it.
fn param_of(shape: &Shape, p: (f64, f64)) -> Option<f64> {
    const TOL: f64 = 1e-7;
    let s = match *shape {
        Shape::Segment { a, b } => {
            let d = (b.0 - a.0, b.1 - a.1);
            let len2 = d.0 * d.0 + d.1 * d.1;
            ((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1) / len2
        }
        Shape::Arc { c, t0, t1, .. } => {
            let ang = (p.1 - c.1).atan2(p.0 - c.0);
            // Bring the angle into the sweep's window.
            let lo = t0.min(t1);
            let mut a = ang;
            while a < lo - 1e-9 {
                a += 2.0 * PI;
            }
            while a > lo + 2.0 * PI - 1e-9 {
                a -= 2.0 * PI;
            }
            (a - t0) / (t1 - t0)
        }
    };
    if !(-TOL..=1.0 + TOL).contains(&s) {
        return None;
    }
    let q = point_at(shape, s.clamp(0.0, 1.0));
    (((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt() < 1e-6).then_some(s)
}

fn circle_of(shape: &Shape) -> Option<((f64, f64), f64)> {
    match *shape {
        Shape::Arc { c, r, .. } => Some((c, r)),
        Shape::Segment { .. } => None,
    }
}

/// Candidate intersection points of the supporting line/circle pairs.
fn candidates(a: &Shape, b: &Shape) -> Vec<(f64, f64)> {
    match (a, b) {
        (Shape::Segment { a: p, b: q }, Shape::Segment { a: r, b: s }) => {
            let d1 = (q.0 - p.0, q.1 - p.1);
            let d2 = (s.0 - r.0, s.1 - r.1);
            let den = d1.0 * d2.1 - d1.1 * d2.0;
            if den.abs() < 1e-12 {
                return Vec::new();
            }
            let t = ((r.0 - p.0) * d2.1 - (r.1 - p.1) * d2.0) / den;
            vec![(p.0 + t * d1.0, p.1 + t * d1.1)]
        }
        (Shape::Segment { a: p, b: q }, arc @ Shape::Arc { .. })
        | (arc @ Shape::Arc { .. }, Shape::Segment { a: p, b: q }) => {
            let (c, r) = circle_of(arc).unwrap();
            let d = (q.0 - p.0, q.1 - p.1);
            let f = (p.0 - c.0, p.1 - c.1);
            let qa = d.0 * d.0 + d.1 * d.1;
            let qb = 2.0 * (f.0 * d.0 + f.1 * d.1);
            let qc = f.0 * f.0 + f.1 * f.1 - r * r;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return Vec::new();
            }
            let sq = disc.sqrt();
            [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)]
                .iter()
                .map(|t| (p.0 + t * d.0, p.1 + t * d.1))
                .collect()
        }
        (x, y) => {
            let (c1, r1) = circle_of(x).unwrap();
            let (c2, r2) = circle_of(y).unwrap();
            let dx = c2.0 - c1.0;
            let dy = c2.1 - c1.1;
            let d = (dx * dx + dy * dy).sqrt();
            if d < 1e-12 || d > r1 + r2 || d < (r1 - r2).abs() {
                return Vec::new();
            }
            let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
            let hh = (r1 * r1 - a * a).max(0.0).sqrt();
            let m = (c1.0 + a * dx / d, c1.1 + a * dy / d);
            vec![
                (m.0 + hh * dy / d, m.1 - hh * dx / d),
                (m.0 - hh * dy / d, m.1 + hh * dx / d),
            ]
        }
    }
}

/// True if the two paths meet at a point interior to both.
pub fn analytic_cross(a: &Shape, b: &Shape) -> bool {
    const END: f64 = 1e-6;
    candidates(a, b).into_iter().any(|p| {
        matches!(
            (param_of(a, p), param_of(b, p)),
            (Some(s), Some(t)) if s > END && s < 1.0 - END && t > END && t < 1.0 - END
        )
    })
}

/// Pairwise lane relation from the analytic paths: 2 crossing, 1 same lane, 0 none.
pub fn oracle_relation(a: Lane, b: Lane) -> u8 {
    if a == b {
        return 1;
    }
    let (pa, pb) = (analytic_path(a, 10.0, 3.0), analytic_path(b, 10.0, 3.0));
    if analytic_cross(&pa, &pb) {
        2
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// Conflict sets and graphs, recomputed directly.

pub struct OracleFleet {
    pub n: usize,
    /// `cross[i][j]` for 1-based i, j.
    pub cross: Vec<Vec<bool>>,
    /// `same[i][j]`: i and j share a lane.
    pub same: Vec<Vec<bool>>,
}

impl OracleFleet {
    pub fn new(lanes: &[Lane]) -> Self {
        let n = lanes.len();
        let mut cross = vec![vec![false; n + 1]; n + 1];
        let mut same = vec![vec![false; n + 1]; n + 1];
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    let r = oracle_relation(lanes[i - 1], lanes[j - 1]);
                    cross[i][j] = r == 2;
                    same[i][j] = r == 1;
                }
            }
        }
        OracleFleet { n, cross, same }
    }

    pub fn crossing_set(&self, i: usize) -> BTreeSet<usize> {
        (1..i).filter(|&j| self.cross[i][j]).collect()
    }

    pub fn diverging_set(&self, i: usize) -> BTreeSet<usize> {
        let s: BTreeSet<usize> = (1..i).filter(|&j| self.same[i][j]).collect();
        if s.is_empty() {
            BTreeSet::from([0])
        } else {
            s
        }
    }

    pub fn coexist(&self, i: usize, j: usize) -> bool {
        i != j && !self.cross[i][j] && !self.same[i][j]
    }

    /// Fewest layers over all orderings of the fleet into groups of
    /// pairwise-coexisting vehicles, where each vehicle's earlier same-lane
    /// vehicles sit in strictly earlier groups. Breadth-first search over
    /// the set of already scheduled vehicles.
    pub fn min_layers(&self) -> usize {
        let n = self.n;
        assert!(n <= 14, "exhaustive search is exponential");
        let full = (1u32 << n) - 1;
        let mut need = vec![0u32; n];
        for i in 1..=n {
            for j in 1..i {
                if self.same[i][j] {
                    need[i - 1] |= 1 << (j - 1);
                }
            }
        }
        let mut dist = vec![usize::MAX; 1 << n];
        dist[0] = 0;
        let mut frontier = vec![0u32];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for done in frontier {
                if done == full {
                    return dist[done as usize];
                }
                let ready: Vec<usize> = (0..n)
                    .filter(|&v| done & (1 << v) == 0 && need[v] & !done == 0)
                    .collect();
                // Every non-empty pairwise-coexisting subset of the ready set.
                for mask in 1u32..(1 << ready.len()) {
                    let members: Vec<usize> = (0..ready.len())
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| ready[b])
                        .collect();
                    let ok = members.iter().enumerate().all(|(x, &a)| {
                        members[x + 1..].iter().all(|&b| self.coexist(a + 1, b + 1))
                    });
                    if !ok {
                        continue;
                    }
                    let set = members.iter().fold(done, |acc, &v| acc | (1 << v));
                    if dist[set as usize] == usize::MAX {
                        dist[set as usize] = dist[done as usize] + 1;
                        next.push(set);
                    }
                }
            }
            frontier = next;
        }
        unreachable!("the all-singletons order is always feasible")
    }
}

// ---------------------------------------------------------------------------
// Maximum matching by memoised search over vertex subsets.

pub fn matching_size_oracle(n: usize, edges: &[(usize, usize)]) -> usize {
    assert!(n <= 20);
    let mut adj = vec![0u32; n];
    for &(a, b) in edges {
        adj[a - 1] |= 1 << (b - 1);
        adj[b - 1] |= 1 << (a - 1);
    }
    fn go(mask: u32, adj: &[u32], memo: &mut HashMap<u32, usize>) -> usize {
        if mask == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << v);
        let mut best = go(rest, adj, memo);
        let mut cand = adj[v] & rest;
        while cand != 0 {
            let u = cand.trailing_zeros();
            cand &= cand - 1;
            best = best.max(1 + go(rest & !(1 << u), adj, memo));
        }
        memo.insert(mask, best);
        best
    }
    go(
        if n == 0 { 0 } else { (1u32 << n) - 1 },
        &adj,
        &mut HashMap::new(),
    )
}

// ---------------------------------------------------------------------------
// Generators.

pub fn lane_strategy() -> impl Strategy<Value = Lane> {
    (0usize..12).prop_map(|id| Lane::from_id(id).unwrap())
}

pub fn left_straight_strategy() -> impl Strategy<Value = Lane> {
    (0usize..12)
        .prop_map(|id| Lane::from_id(id).unwrap())
        .prop_filter("no right turns", |l| l.turn != Turn::Right)
}

pub fn records(lanes: &[Lane]) -> Vec<VehicleRecord> {
    intersched::fleet::fleet_from_lanes(lanes)
}

/// Random simple graph on `1..=n` as an edge list.
pub fn graph_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
            .collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |bits| {
            let edges = pairs
                .iter()
                .zip(bits)
                .filter(|(_, b)| *b)
                .map(|(&e, _)| e)
                .collect();
            (n, edges)
        })
    })
}

/// Random simple graph with a random edge density.
pub fn random_graph<R: rand::Rng>(rng: &mut R, max_n: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_n);
    let density: f64 = rng.gen();
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}
