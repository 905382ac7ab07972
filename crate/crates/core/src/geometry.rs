//! Intersection geometry and pairwise conflict classification.
//!
//! The intersection is a square box centred on the origin with right-hand
//! traffic. Every approach has three dedicated incoming lanes (left turn
//! innermost, then straight, then right turn) and three outgoing lanes laid
//! out the same way, so two movements never share an exit point.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used by the segment intersection predicates, in metres.
pub const INTERSECTION_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("box side {box_side} m cannot fit six lanes of width {lane_width} m")]
    LanesDoNotFit { box_side: f64, lane_width: f64 },
    #[error("arc resolution must be at least 8 segments, got {0}")]
    ArcTooCoarse(usize),
    #[error("movements {0} and {1} share an exit point (converging conflict)")]
    SharedExit(Lane, Lane),
    #[error("movement {0} has a self-intersecting path")]
    SelfIntersecting(Lane),
    #[error("movement {0} path endpoint is off the box boundary")]
    EndpointOffBoundary(Lane),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FleetError {
    #[error("vehicle index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("vehicle index {0} is out of order or zero")]
    UnsortedIndex(usize),
    #[error("vehicles {ahead} and {behind} on lane {lane} have inconsistent lane ranks")]
    InconsistentLaneOrder {
        lane: Lane,
        ahead: usize,
        behind: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    North,
    East,
    South,
    West,
}

impl Approach {
    pub const ALL: [Approach; 4] = [
        Approach::North,
        Approach::East,
        Approach::South,
        Approach::West,
    ];

    fn name(self) -> &'static str {
        match self {
            Approach::North => "north",
            Approach::East => "east",
            Approach::South => "south",
            Approach::West => "west",
        }
    }

    /// Maps a point of the south-approach template onto this approach.
    fn rotate(self, p: Point) -> Point {
        match self {
            Approach::South => p,
            Approach::West => Point::new(p.y, -p.x),
            Approach::North => Point::new(-p.x, -p.y),
            Approach::East => Point::new(-p.y, p.x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Left,
    Straight,
    Right,
}

impl Turn {
    pub const ALL: [Turn; 3] = [Turn::Left, Turn::Straight, Turn::Right];

    fn name(self) -> &'static str {
        match self {
            Turn::Left => "left",
            Turn::Straight => "straight",
            Turn::Right => "right",
        }
    }

    /// Lateral offset of the lane from the road centreline, in lane widths.
    fn lane_offset(self) -> f64 {
        match self {
            Turn::Left => 0.5,
            Turn::Straight => 1.5,
            Turn::Right => 2.5,
        }
    }
}

/// One incoming lane, identified by where it comes from and where it turns.
/// Each lane carries exactly one movement through the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lane {
    pub approach: Approach,
    pub turn: Turn,
}

impl Lane {
    pub const fn new(approach: Approach, turn: Turn) -> Self {
        Lane { approach, turn }
    }

    /// All twelve lanes in a fixed order (approach-major).
    pub fn all() -> impl Iterator<Item = Lane> {
        Approach::ALL
            .into_iter()
            .flat_map(|a| Turn::ALL.into_iter().map(move |t| Lane::new(a, t)))
    }

    /// Dense id in `0..12`, matching the order of [`Lane::all`].
    pub fn id(self) -> usize {
        self.approach as usize * 3 + self.turn as usize
    }

    pub fn from_id(id: usize) -> Option<Lane> {
        if id >= 12 {
            return None;
        }
        Some(Lane::new(Approach::ALL[id / 3], Turn::ALL[id % 3]))
    }
}

impl fmt::Display for Lane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.approach.name(), self.turn.name())
    }
}

impl FromStr for Lane {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, t) = s
            .split_once('-')
            .ok_or_else(|| format!("lane `{s}` is not of the form approach-turn"))?;
        let approach = Approach::ALL
            .into_iter()
            .find(|x| x.name() == a)
            .ok_or_else(|| format!("unknown approach `{a}`"))?;
        let turn = Turn::ALL
            .into_iter()
            .find(|x| x.name() == t)
            .ok_or_else(|| format!("unknown turn `{t}`"))?;
        Ok(Lane::new(approach, turn))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConflictClass {
    Crossing,
    Diverging,
    None,
}

/// A lane's path through the box as a polyline from entry to exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Movement {
    pub lane: Lane,
    pub path: Vec<Point>,
}

impl Movement {
    pub fn length(&self) -> f64 {
        self.path.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub fn entry(&self) -> Point {
        self.path[0]
    }

    pub fn exit(&self) -> Point {
        *self.path.last().expect("paths have at least two points")
    }

    /// True if the two paths meet at a point that is interior to both.
    pub fn crosses(&self, other: &Movement) -> bool {
        let ends = [self.entry(), self.exit(), other.entry(), other.exit()];
        for a in self.path.windows(2) {
            for b in other.path.windows(2) {
                if let Some(p) = segment_intersection(a[0], a[1], b[0], b[1]) {
                    if ends.iter().all(|e| e.dist(p) > INTERSECTION_EPS) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn is_simple(&self) -> bool {
        let segs: Vec<_> = self.path.windows(2).collect();
        for i in 0..segs.len() {
            for j in i + 2..segs.len() {
                if segment_intersection(segs[i][0], segs[i][1], segs[j][0], segs[j][1]).is_some() {
                    return false;
                }
            }
        }
        true
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Intersection point of closed segments `p1p2` and `q1q2`, if any.
/// Collinear overlaps report one shared point.
pub fn segment_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Option<Point> {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    let eps = INTERSECTION_EPS;

    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        let t = d1 / (d1 - d2);
        return Some(Point::new(
            p1.x + t * (p2.x - p1.x),
            p1.y + t * (p2.y - p1.y),
        ));
    }

    let on_segment = |a: Point, b: Point, c: Point| {
        c.x >= a.x.min(b.x) - eps
            && c.x <= a.x.max(b.x) + eps
            && c.y >= a.y.min(b.y) - eps
            && c.y <= a.y.max(b.y) + eps
    };
    if d1.abs() <= eps && on_segment(q1, q2, p1) {
        return Some(p1);
    }
    if d2.abs() <= eps && on_segment(q1, q2, p2) {
        return Some(p2);
    }
    if d3.abs() <= eps && on_segment(p1, p2, q1) {
        return Some(q1);
    }
    if d4.abs() <= eps && on_segment(p1, p2, q2) {
        return Some(q2);
    }
    None
}

/// Parameters of the square intersection box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntersectionGeometry {
    /// Side length of the box in metres.
    pub box_side: f64,
    pub lane_width: f64,
    /// Number of straight segments used for each quarter-circle turn.
    pub arc_segments: usize,
}

impl Default for IntersectionGeometry {
    fn default() -> Self {
        IntersectionGeometry {
            box_side: 20.0,
            lane_width: 3.0,
            arc_segments: 16,
        }
    }
}

impl IntersectionGeometry {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.lane_width > 0.0 && 6.0 * self.lane_width <= self.box_side) {
            return Err(GeometryError::LanesDoNotFit {
                box_side: self.box_side,
                lane_width: self.lane_width,
            });
        }
        if self.arc_segments < 8 {
            return Err(GeometryError::ArcTooCoarse(self.arc_segments));
        }
        Ok(())
    }

    /// Path for the south approach (heading +y); other approaches are rotations.
    fn template_path(&self, turn: Turn) -> Vec<Point> {
        let h = self.box_side / 2.0;
        let k = turn.lane_offset() * self.lane_width;
        match turn {
            Turn::Straight => vec![Point::new(k, -h), Point::new(k, h)],
            // Quarter circle about the south-west corner, exiting westbound.
            Turn::Left => arc(Point::new(-h, -h), h + k, 0.0, FRAC_PI_2, self.arc_segments),
            // Quarter circle about the south-east corner, exiting eastbound.
            Turn::Right => arc(
                Point::new(h, -h),
                h - k,
                2.0 * FRAC_PI_2,
                FRAC_PI_2,
                self.arc_segments,
            ),
        }
    }

    pub fn movement(&self, lane: Lane) -> Movement {
        let path = self
            .template_path(lane.turn)
            .into_iter()
            .map(|p| lane.approach.rotate(p))
            .collect();
        Movement { lane, path }
    }

    /// The twelve movement paths, validated for simplicity, boundary endpoints
    /// and distinct exits.
    pub fn canonical_movement_paths(&self) -> Result<BTreeMap<Lane, Movement>, GeometryError> {
        self.validate()?;
        let h = self.box_side / 2.0;
        let on_boundary = |p: Point| {
            (p.x.abs() - h).abs() <= INTERSECTION_EPS || (p.y.abs() - h).abs() <= INTERSECTION_EPS
        };

        let paths: BTreeMap<Lane, Movement> = Lane::all().map(|l| (l, self.movement(l))).collect();
        for m in paths.values() {
            if !m.is_simple() {
                return Err(GeometryError::SelfIntersecting(m.lane));
            }
            if !on_boundary(m.entry()) || !on_boundary(m.exit()) {
                return Err(GeometryError::EndpointOffBoundary(m.lane));
            }
        }
        let all: Vec<&Movement> = paths.values().collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if a.exit().dist(b.exit()) <= INTERSECTION_EPS {
                    return Err(GeometryError::SharedExit(a.lane, b.lane));
                }
            }
        }
        Ok(paths)
    }
}

fn arc(center: Point, radius: f64, from: f64, to: f64, segments: usize) -> Vec<Point> {
    (0..=segments)
        .map(|s| {
            let theta = from + (to - from) * s as f64 / segments as f64;
            Point::new(
                center.x + radius * theta.cos(),
                center.y + radius * theta.sin(),
            )
        })
        .collect()
}

/// Lane-level conflict table derived from the movement paths.
#[derive(Debug, Clone)]
pub struct ConflictMatrix {
    classes: [[ConflictClass; 12]; 12],
    path_lengths: [f64; 12],
}

impl ConflictMatrix {
    pub fn from_geometry(geometry: &IntersectionGeometry) -> Result<Self, GeometryError> {
        let paths = geometry.canonical_movement_paths()?;
        let mut classes = [[ConflictClass::None; 12]; 12];
        let mut path_lengths = [0.0; 12];
        for (a, ma) in &paths {
            path_lengths[a.id()] = ma.length();
            for (b, mb) in &paths {
                classes[a.id()][b.id()] = if a == b {
                    ConflictClass::Diverging
                } else if ma.crosses(mb) {
                    ConflictClass::Crossing
                } else {
                    ConflictClass::None
                };
            }
        }
        Ok(ConflictMatrix {
            classes,
            path_lengths,
        })
    }

    /// Matrix for the default geometry, computed once.
    pub fn standard() -> &'static ConflictMatrix {
        static STANDARD: OnceLock<ConflictMatrix> = OnceLock::new();
        STANDARD.get_or_init(|| {
            ConflictMatrix::from_geometry(&IntersectionGeometry::default())
                .expect("default geometry is valid")
        })
    }

    pub fn lane_class(&self, a: Lane, b: Lane) -> ConflictClass {
        self.classes[a.id()][b.id()]
    }

    pub fn classify(&self, a: &VehicleRecord, b: &VehicleRecord) -> ConflictClass {
        debug_assert_ne!(a.index, b.index);
        self.lane_class(a.lane, b.lane)
    }

    pub fn path_length(&self, lane: Lane) -> f64 {
        self.path_lengths[lane.id()]
    }

    /// Unordered lane pairs classified as crossing.
    pub fn crossing_pairs(&self) -> Vec<(Lane, Lane)> {
        let lanes: Vec<Lane> = Lane::all().collect();
        let mut out = Vec::new();
        for (i, &a) in lanes.iter().enumerate() {
            for &b in &lanes[i + 1..] {
                if self.lane_class(a, b) == ConflictClass::Crossing {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// A vehicle as seen at control-zone entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub index: usize,
    pub lane: Lane,
    /// Distance to the stop line along the lane, metres.
    pub position: f64,
    /// 0 for the vehicle closest to the intersection on its lane.
    pub same_lane_rank: usize,
}

impl VehicleRecord {
    pub fn new(index: usize, lane: Lane, position: f64, same_lane_rank: usize) -> Self {
        VehicleRecord {
            index,
            lane,
            position,
            same_lane_rank,
        }
    }
}

/// Crossing set and diverging set of one vehicle. Members are smaller
/// indices; vertex 0 (the virtual leader) may appear in `diverging`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConflictSets {
    pub crossing: BTreeSet<usize>,
    pub diverging: BTreeSet<usize>,
}

/// Frozen conflict sets of a fleet, keyed by vehicle index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConflictTable {
    sets: BTreeMap<usize, ConflictSets>,
}

impl ConflictTable {
    pub fn get(&self, index: usize) -> Option<&ConflictSets> {
        self.sets.get(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &ConflictSets)> {
        self.sets.iter().map(|(&i, s)| (i, s))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.sets.keys().next_back().copied().unwrap_or(0)
    }
}

/// Builds the crossing/diverging sets of every vehicle against the vehicles
/// that arrived before it. Vehicle 0 joins the diverging set of whoever
/// leads its lane within this fleet.
pub fn build_conflict_sets(
    matrix: &ConflictMatrix,
    vehicles: &[VehicleRecord],
) -> Result<ConflictTable, FleetError> {
    let mut last = 0;
    for v in vehicles {
        if v.index == last && last != 0 {
            return Err(FleetError::DuplicateIndex(v.index));
        }
        if v.index <= last {
            return Err(FleetError::UnsortedIndex(v.index));
        }
        last = v.index;
    }

    let mut sets = BTreeMap::new();
    for (pos, vi) in vehicles.iter().enumerate() {
        let mut s = ConflictSets::default();
        for vj in &vehicles[..pos] {
            match matrix.classify(vi, vj) {
                ConflictClass::Crossing => {
                    s.crossing.insert(vj.index);
                }
                ConflictClass::Diverging => {
                    if vj.same_lane_rank >= vi.same_lane_rank {
                        return Err(FleetError::InconsistentLaneOrder {
                            lane: vi.lane,
                            ahead: vj.index,
                            behind: vi.index,
                        });
                    }
                    s.diverging.insert(vj.index);
                }
                ConflictClass::None => {}
            }
        }
        if s.diverging.is_empty() {
            s.diverging.insert(0);
        }
        sets.insert(vi.index, s);
    }
    Ok(ConflictTable { sets })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane(a: Approach, t: Turn) -> Lane {
        Lane::new(a, t)
    }

    fn rec(index: usize, l: Lane, rank: usize) -> VehicleRecord {
        VehicleRecord::new(index, l, 100.0 + 10.0 * rank as f64, rank)
    }

    #[test]
    fn straight_is_a_single_segment_across_the_box() {
        let g = IntersectionGeometry::default();
        let m = g.movement(lane(Approach::East, Turn::Straight));
        assert_eq!(m.path.len(), 2);
        assert!((m.entry().x - 10.0).abs() < 1e-12);
        assert!((m.exit().x + 10.0).abs() < 1e-12);
        assert!((m.entry().y - m.exit().y).abs() < 1e-12);
        assert!((m.length() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn sixteen_crossing_pairs_and_free_right_turns() {
        let m = ConflictMatrix::standard();
        let pairs = m.crossing_pairs();
        assert_eq!(pairs.len(), 16);
        assert!(pairs
            .iter()
            .all(|(a, b)| a.turn != Turn::Right && b.turn != Turn::Right));
    }

    #[test]
    fn conflict_classes_from_the_worked_example() {
        let m = ConflictMatrix::standard();
        let ss = rec(1, lane(Approach::South, Turn::Straight), 0);
        let ss2 = rec(2, lane(Approach::South, Turn::Straight), 1);
        assert_eq!(m.classify(&ss, &ss2), ConflictClass::Diverging);
        let es = rec(3, lane(Approach::East, Turn::Straight), 0);
        let ws = rec(4, lane(Approach::West, Turn::Straight), 0);
        assert_eq!(m.classify(&es, &ws), ConflictClass::None);
        assert_eq!(m.classify(&ss, &es), ConflictClass::Crossing);
        assert_eq!(m.classify(&es, &ss), ConflictClass::Crossing);
    }

    #[test]
    fn single_vehicle_leads_its_lane() {
        let m = ConflictMatrix::standard();
        let t = build_conflict_sets(m, &[rec(1, lane(Approach::North, Turn::Left), 0)]).unwrap();
        let s = t.get(1).unwrap();
        assert!(s.crossing.is_empty());
        assert_eq!(s.diverging, BTreeSet::from([0]));
    }

    #[test]
    fn rejects_duplicate_and_unsorted_indices() {
        let m = ConflictMatrix::standard();
        let l = lane(Approach::North, Turn::Left);
        let dup = [rec(1, l, 0), rec(1, lane(Approach::East, Turn::Left), 0)];
        assert_eq!(
            build_conflict_sets(m, &dup),
            Err(FleetError::DuplicateIndex(1))
        );
        let unsorted = [rec(2, l, 0), rec(1, lane(Approach::East, Turn::Left), 0)];
        assert_eq!(
            build_conflict_sets(m, &unsorted),
            Err(FleetError::UnsortedIndex(1))
        );
    }

    #[test]
    fn rejects_overtaking_rank() {
        let m = ConflictMatrix::standard();
        let l = lane(Approach::North, Turn::Left);
        let bad = [rec(1, l, 1), rec(2, l, 0)];
        assert!(matches!(
            build_conflict_sets(m, &bad),
            Err(FleetError::InconsistentLaneOrder { .. })
        ));
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        let g = IntersectionGeometry {
            box_side: 10.0,
            lane_width: 3.0,
            arc_segments: 16,
        };
        assert!(matches!(
            g.validate(),
            Err(GeometryError::LanesDoNotFit { .. })
        ));
        let g = IntersectionGeometry {
            arc_segments: 4,
            ..Default::default()
        };
        assert_eq!(g.validate(), Err(GeometryError::ArcTooCoarse(4)));
    }

    #[test]
    fn lane_ids_round_trip() {
        for l in Lane::all() {
            assert_eq!(Lane::from_id(l.id()), Some(l));
            assert_eq!(l.to_string().parse::<Lane>(), Ok(l));
        }
    }
}
