//! Passing-order schedulers.
//!
//! A schedule is a spanning tree rooted at the virtual leader 0. A vehicle's
//! depth is the layer it crosses in; vehicles of equal depth cross together.
//!
//! * [`dfst`]: baseline depth-first spanning tree, every conflict treated alike.
//! * [`opt_dfst`]: first-in-first-out tree that separates crossing from
//!   diverging conflicts and picks the shallowest admissible depth.
//! * [`mm_schedule`]: pairs coexisting vehicles with a maximum matching and
//!   orders the pairs, dropping first-in-first-out entirely.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{build_cug, CoexistingUndirectedGraph, ConflictDirectedGraph};
use crate::matching::maximum_matching;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    #[error("vehicle {0} has no depth")]
    Unscheduled(usize),
    #[error("vehicle {0} has parent {1}, which is not a shallower tree vertex")]
    BadParent(usize, usize),
    #[error("vehicle {0} depth is not its parent's depth plus one")]
    DepthMismatch(usize),
    #[error("vehicle {1} is scheduled no later than {0}, which is ahead of it on the same lane")]
    PrecedenceViolated(usize, usize),
    #[error("vehicles {0} and {1} share a depth but conflict")]
    SameDepthConflict(usize, usize),
    #[error("schedule covers {got} vehicles, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("vehicle {0} is missing from the units or appears twice")]
    UnitsDoNotCover(usize),
    #[error("unit contains vehicle {0}, which is outside the graph")]
    UnknownVehicle(usize),
}

/// Rooted spanning tree over vertices `0..=n` with per-vertex depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassingSchedule {
    parent: Vec<usize>,
    depth: Vec<usize>,
}

impl PassingSchedule {
    pub fn from_parts(parent: Vec<usize>, depth: Vec<usize>) -> Self {
        assert_eq!(parent.len(), depth.len());
        PassingSchedule { parent, depth }
    }

    pub fn vehicle_count(&self) -> usize {
        self.depth.len().saturating_sub(1)
    }

    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depth[1..]
    }

    pub fn d_all(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// `layers()[k]` holds the vehicles of depth `k + 1`, ascending.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers = vec![Vec::new(); self.d_all()];
        for v in 1..self.depth.len() {
            layers[self.depth[v] - 1].push(v);
        }
        layers
    }

    /// One `i parent depth` line per vehicle, sorted by `i`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in 1..self.depth.len() {
            let _ = writeln!(s, "{v} {} {}", self.parent[v], self.depth[v]);
        }
        s
    }

    /// Checks tree shape, depth arithmetic, same-lane precedence and that
    /// every pair sharing a depth coexists.
    pub fn audit(&self, cdg: &ConflictDirectedGraph) -> Result<(), ScheduleViolation> {
        let n = cdg.vehicle_count();
        if self.vehicle_count() != n {
            return Err(ScheduleViolation::SizeMismatch {
                expected: n,
                got: self.vehicle_count(),
            });
        }
        for v in 1..=n {
            if self.depth[v] == 0 {
                return Err(ScheduleViolation::Unscheduled(v));
            }
            let p = self.parent[v];
            if p > n || p == v || self.depth[p] >= self.depth[v] {
                return Err(ScheduleViolation::BadParent(v, p));
            }
            if self.depth[v] != self.depth[p] + 1 {
                return Err(ScheduleViolation::DepthMismatch(v));
            }
        }
        for &(i, j) in cdg.uni_edges() {
            if self.depth[i] >= self.depth[j] {
                return Err(ScheduleViolation::PrecedenceViolated(i, j));
            }
        }
        for layer in self.layers() {
            for (a, &x) in layer.iter().enumerate() {
                for &y in &layer[a + 1..] {
                    if cdg.conflicts(x, y) {
                        return Err(ScheduleViolation::SameDepthConflict(x, y));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Tree under construction, grown one vehicle at a time.
#[derive(Debug, Clone)]
pub struct PartialTree {
    parent: Vec<usize>,
    depth: Vec<usize>,
    by_depth: Vec<Vec<usize>>,
}

impl PartialTree {
    pub fn new(n: usize) -> Self {
        PartialTree {
            parent: vec![0; n + 1],
            depth: vec![0; n + 1],
            by_depth: vec![vec![0]],
        }
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Tree vertices at `depth`, in insertion (= ascending index) order.
    pub fn at_depth(&self, depth: usize) -> &[usize] {
        self.by_depth.get(depth).map_or(&[], Vec::as_slice)
    }

    pub fn attach(&mut self, v: usize, parent: usize) {
        let d = self.depth[parent] + 1;
        self.parent[v] = parent;
        self.depth[v] = d;
        if self.by_depth.len() <= d {
            self.by_depth.resize(d + 1, Vec::new());
        }
        self.by_depth[d].push(v);
    }

    pub fn finish(self) -> PassingSchedule {
        PassingSchedule {
            parent: self.parent,
            depth: self.depth,
        }
    }
}

/// Baseline: depth is one more than the deepest conflicting earlier vertex.
pub fn dfst(cdg: &ConflictDirectedGraph) -> PassingSchedule {
    let n = cdg.vehicle_count();
    let mut tree = PartialTree::new(n);
    for i in 1..=n {
        let parent = cdg
            .diverging_parents(i)
            .iter()
            .chain(cdg.crossing_parents(i))
            .copied()
            .max_by_key(|&m| (tree.depth(m), Reverse(m)))
            .unwrap_or(0);
        tree.attach(i, parent);
    }
    tree.finish()
}

/// Result of the optimal-parent search for one vehicle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptParentChoice {
    pub parent: usize,
    pub depth: usize,
    /// Deepest diverging (same-lane or leader) parent.
    pub d_div: usize,
    /// Depths already taken by crossing parents.
    pub d_swap: BTreeSet<usize>,
}

/// Picks the shallowest depth that is below every diverging parent and not
/// shared with any crossing parent.
///
/// The depth is `d_k + 1` for the shallowest admissible candidate `k` among
/// the parents. The tree parent is then taken from the vertices one level
/// up, preferring one the vehicle does not conflict with; failing that, the
/// smallest-index admissible candidate.
pub fn find_opt_parent(
    tree: &PartialTree,
    diverging: &[usize],
    crossing: &[usize],
) -> OptParentChoice {
    let d_div = diverging.iter().map(|&m| tree.depth(m)).max().unwrap_or(0);
    let d_swap: BTreeSet<usize> = crossing.iter().map(|&m| tree.depth(m)).collect();

    let best = diverging
        .iter()
        .chain(crossing)
        .copied()
        .filter(|&k| {
            let d = tree.depth(k) + 1;
            d > d_div && !d_swap.contains(&d)
        })
        .min_by_key(|&k| (tree.depth(k), k));

    let Some(k) = best else {
        return OptParentChoice {
            parent: 0,
            depth: 1,
            d_div,
            d_swap,
        };
    };
    let depth = tree.depth(k) + 1;
    let is_parent = |m: usize| diverging.contains(&m) || crossing.contains(&m);
    let parent = tree
        .at_depth(depth - 1)
        .iter()
        .copied()
        .filter(|&m| !is_parent(m))
        .min()
        .unwrap_or(k);
    OptParentChoice {
        parent,
        depth,
        d_div,
        d_swap,
    }
}

/// First-in-first-out tree with separated conflict types.
pub fn opt_dfst(cdg: &ConflictDirectedGraph) -> PassingSchedule {
    let n = cdg.vehicle_count();
    let mut tree = PartialTree::new(n);
    for i in 1..=n {
        let choice = find_opt_parent(&tree, cdg.diverging_parents(i), cdg.crossing_parents(i));
        tree.attach(i, choice.parent);
        debug_assert_eq!(tree.depth(i), choice.depth);
    }
    tree.finish()
}

/// A group of vehicles scheduled into the same layer: a matched pair or a
/// single vehicle.
pub type Unit = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub units: Vec<Unit>,
    pub exchanges: usize,
}

/// Swaps same-lane vehicles between units until, read in sequence order,
/// every lane's vehicles appear front to back.
///
/// Each swap turns `(i, j), (n, m)` with `m` ahead of `j` on one lane into
/// `(i, m), (j, n)`. Coexistence depends only on lanes, so the swapped
/// pairs remain coexisting and the unit count never changes. At most
/// `n` swaps are performed.
pub fn repair_infeasible_pairs(units: &[Unit], cdg: &ConflictDirectedGraph) -> RepairOutcome {
    let n = cdg.vehicle_count();
    let groups = cdg.lane_groups();
    let mut units: Vec<Unit> = units.to_vec();
    let mut exchanges = 0;

    let mut slots_by_group: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for (u, unit) in units.iter().enumerate() {
        for (s, &v) in unit.iter().enumerate() {
            slots_by_group[groups[v]].push((u, s));
        }
    }
    for slots in slots_by_group.iter().filter(|s| s.len() > 1) {
        let mut want: Vec<usize> = slots.iter().map(|&(u, s)| units[u][s]).collect();
        want.sort_unstable();
        for t in 0..slots.len() {
            let (ut, st) = slots[t];
            if units[ut][st] == want[t] {
                continue;
            }
            if exchanges >= n {
                return RepairOutcome { units, exchanges };
            }
            let &(us, ss) = slots[t + 1..]
                .iter()
                .find(|&&(u, s)| units[u][s] == want[t])
                .expect("wanted vehicle sits in a later slot");
            let tmp = units[ut][st];
            units[ut][st] = units[us][ss];
            units[us][ss] = tmp;
            exchanges += 1;
        }
    }
    RepairOutcome { units, exchanges }
}

/// Topological order of units under same-lane precedence, smallest
/// contained vehicle first among ready units.
fn order_units(units: &[Unit], cdg: &ConflictDirectedGraph) -> Result<Vec<usize>, Stalled> {
    let n = cdg.vehicle_count();
    let mut unit_of = vec![usize::MAX; n + 1];
    for (u, unit) in units.iter().enumerate() {
        for &v in unit {
            unit_of[v] = u;
        }
    }
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); units.len()];
    let mut self_loop = vec![false; units.len()];
    for &(i, j) in cdg.uni_edges() {
        if i == 0 || unit_of[i] == usize::MAX || unit_of[j] == usize::MAX {
            continue;
        }
        let (a, b) = (unit_of[i], unit_of[j]);
        if a == b {
            self_loop[a] = true;
        } else {
            succ[a].insert(b);
        }
    }
    let mut indeg = vec![0usize; units.len()];
    for s in &succ {
        for &b in s {
            indeg[b] += 1;
        }
    }
    let key = |u: usize| units[u].iter().copied().min().unwrap_or(usize::MAX);
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..units.len())
        .filter(|&u| indeg[u] == 0 && !self_loop[u])
        .map(|u| Reverse((key(u), u)))
        .collect();
    let mut order = Vec::with_capacity(units.len());
    while let Some(Reverse((_, u))) = ready.pop() {
        order.push(u);
        for &b in &succ[u] {
            indeg[b] -= 1;
            if indeg[b] == 0 && !self_loop[b] {
                ready.push(Reverse((key(b), b)));
            }
        }
    }
    if order.len() == units.len() {
        return Ok(order);
    }
    let emitted = order.len();
    let mut rest: Vec<usize> = (0..units.len()).filter(|u| !order.contains(u)).collect();
    rest.sort_by_key(|&u| key(u));
    order.extend(rest);
    Err(Stalled { order, emitted })
}

/// A topological pass that hit a cycle: `order[..emitted]` is a valid
/// prefix, the rest are the blocked units by smallest vehicle.
struct Stalled {
    order: Vec<usize>,
    emitted: usize,
}

/// Layering produced by [`spanning_layers`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningOutcome {
    pub layers: Vec<Unit>,
    pub exchanges: usize,
    /// Pairs that could not be ordered even after repair and were split.
    pub split_pairs: Vec<(usize, usize)>,
}

/// Orders units into layers respecting same-lane precedence. A precedence
/// cycle triggers [`repair_infeasible_pairs`]; a cycle that survives the
/// repair is broken by splitting pairs into single-vehicle units.
pub fn spanning_layers(units: &[Unit], cdg: &ConflictDirectedGraph) -> SpanningOutcome {
    let mut units: Vec<Unit> = units.to_vec();
    let mut exchanges = 0;
    let mut split_pairs = Vec::new();

    let order = match order_units(&units, cdg) {
        Ok(order) => order,
        Err(stalled) => {
            let sequence: Vec<Unit> = stalled.order.iter().map(|&u| units[u].clone()).collect();
            let repaired = repair_infeasible_pairs(&sequence, cdg);
            exchanges = repaired.exchanges;
            units = repaired.units;
            loop {
                match order_units(&units, cdg) {
                    Ok(order) => break order,
                    Err(stalled) => {
                        let stuck = stalled.order[stalled.emitted..]
                            .iter()
                            .copied()
                            .find(|&u| units[u].len() > 1)
                            .expect("a precedence cycle needs a multi-vehicle unit");
                        let unit = units.remove(stuck);
                        split_pairs.push((unit[0], unit[1]));
                        units.extend(unit.into_iter().map(|v| vec![v]));
                    }
                }
            }
        }
    };
    let layers = order
        .into_iter()
        .map(|u| {
            let mut l = units[u].clone();
            l.sort_unstable();
            l
        })
        .collect();
    SpanningOutcome {
        layers,
        exchanges,
        split_pairs,
    }
}

/// Turns layers into a tree. A vehicle's parent is its same-lane
/// predecessor when that vehicle sits one layer up, otherwise the smallest
/// coexisting vehicle one layer up, otherwise the smallest vehicle there.
pub fn schedule_from_layers(layers: &[Unit], cdg: &ConflictDirectedGraph) -> PassingSchedule {
    let n = cdg.vehicle_count();
    let mut parent = vec![0; n + 1];
    let mut depth = vec![0; n + 1];
    for (k, layer) in layers.iter().enumerate() {
        for &v in layer {
            depth[v] = k + 1;
            if k == 0 {
                continue;
            }
            let above = &layers[k - 1];
            parent[v] = cdg
                .lane_predecessor(v)
                .filter(|p| above.contains(p))
                .or_else(|| {
                    above
                        .iter()
                        .copied()
                        .filter(|&m| !cdg.conflicts(m, v))
                        .min()
                })
                .or_else(|| above.iter().copied().min())
                .expect("layers are non-empty");
        }
    }
    PassingSchedule { parent, depth }
}

/// Orders `units` (which must cover `1..=n` exactly once) and builds the tree.
pub fn spanning(
    units: &[Unit],
    cdg: &ConflictDirectedGraph,
) -> Result<PassingSchedule, ScheduleError> {
    check_cover(units.iter().flatten().copied(), cdg.vehicle_count())?;
    let out = spanning_layers(units, cdg);
    Ok(schedule_from_layers(&out.layers, cdg))
}

fn check_cover(vehicles: impl Iterator<Item = usize>, n: usize) -> Result<(), ScheduleError> {
    let mut seen = vec![false; n + 1];
    for v in vehicles {
        if v == 0 || v > n {
            return Err(ScheduleError::UnknownVehicle(v));
        }
        if seen[v] {
            return Err(ScheduleError::UnitsDoNotCover(v));
        }
        seen[v] = true;
    }
    match (1..=n).find(|&v| !seen[v]) {
        Some(v) => Err(ScheduleError::UnitsDoNotCover(v)),
        None => Ok(()),
    }
}

/// Output of the matching scheduler with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmOutcome {
    pub schedule: PassingSchedule,
    /// Maximum matching as returned by the blossom search.
    pub matching: Vec<(usize, usize)>,
    /// Pairs actually scheduled, in layer order.
    pub scheduled_pairs: Vec<(usize, usize)>,
    pub exchanges: usize,
    pub split_pairs: Vec<(usize, usize)>,
    /// Vehicles without any crossing conflict, placed greedily.
    pub free_vehicles: Vec<usize>,
}

/// Maximum-matching scheduler.
///
/// Vehicles with no crossing conflict in the graph (right turns always
/// qualify) stay out of the matching; every other layer holds at most two
/// vehicles, so a maximum matching yields the fewest layers. Matched pairs
/// come first, leftover single vehicles after them, then [`spanning_layers`]
/// orders everything. Conflict-free vehicles are finally dropped into the
/// earliest layer after their lane predecessor.
pub fn mm_schedule(cug: &CoexistingUndirectedGraph, cdg: &ConflictDirectedGraph) -> MmOutcome {
    let n = cdg.vehicle_count();
    let mut has_crossing = vec![false; n + 1];
    for &(i, j) in cdg.bi_edges() {
        has_crossing[i] = true;
        has_crossing[j] = true;
    }
    let free: Vec<usize> = (1..=n).filter(|&v| !has_crossing[v]).collect();

    let sub = cug.graph().without_vertices(|v| !has_crossing[v]);
    let matching = maximum_matching(&sub);
    let mates = matching.mates(n);

    let mut units: Vec<Unit> = matching.pairs().iter().map(|&(a, b)| vec![a, b]).collect();
    units.extend(
        (1..=n)
            .filter(|&v| has_crossing[v] && mates[v].is_none())
            .map(|v| vec![v]),
    );
    let spanned = spanning_layers(&units, cdg);
    let mut layers = spanned.layers;
    let scheduled_pairs = layers
        .iter()
        .filter(|l| l.len() == 2)
        .map(|l| (l[0], l[1]))
        .collect();

    let mut layer_of = vec![0usize; n + 1];
    for (k, layer) in layers.iter().enumerate() {
        for &v in layer {
            layer_of[v] = k + 1;
        }
    }
    for &v in &free {
        let earliest = cdg
            .diverging_parents(v)
            .iter()
            .map(|&m| layer_of[m])
            .max()
            .unwrap_or(0)
            + 1;
        let mut k = earliest;
        while k <= layers.len() && layers[k - 1].iter().any(|&m| cdg.conflicts(m, v)) {
            k += 1;
        }
        if k > layers.len() {
            layers.push(Vec::new());
        }
        layers[k - 1].push(v);
        layer_of[v] = k;
    }
    for l in &mut layers {
        l.sort_unstable();
    }

    MmOutcome {
        schedule: schedule_from_layers(&layers, cdg),
        matching: matching.pairs().to_vec(),
        scheduled_pairs,
        exchanges: spanned.exchanges,
        split_pairs: spanned.split_pairs,
        free_vehicles: free,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheduler {
    Dfst,
    OptDfst,
    Mm,
}

impl Scheduler {
    pub const ALL: [Scheduler; 3] = [Scheduler::Dfst, Scheduler::OptDfst, Scheduler::Mm];

    pub fn name(self) -> &'static str {
        match self {
            Scheduler::Dfst => "dfst",
            Scheduler::OptDfst => "opt_dfst",
            Scheduler::Mm => "mm",
        }
    }

    pub fn schedule(self, cdg: &ConflictDirectedGraph) -> PassingSchedule {
        match self {
            Scheduler::Dfst => dfst(cdg),
            Scheduler::OptDfst => opt_dfst(cdg),
            Scheduler::Mm => mm_schedule(&build_cug(cdg), cdg).schedule,
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheduler {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dfst" => Ok(Scheduler::Dfst),
            "opt_dfst" | "opt-dfst" => Ok(Scheduler::OptDfst),
            "mm" => Ok(Scheduler::Mm),
            other => Err(format!(
                "unknown scheduler `{other}` (expected dfst, opt_dfst or mm)"
            )),
        }
    }
}
