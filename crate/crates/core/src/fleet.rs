//! Fleet constructors: the six-vehicle reference scenario and seeded random fleets.

use rand::Rng;

use crate::geometry::{Approach, Lane, Turn, VehicleRecord};

/// Spacing between consecutive queued vehicles when a fleet is laid out on lanes.
pub const QUEUE_SPACING: f64 = 30.0;

/// Builds records for lanes listed in arrival order. Vehicle `i` (1-based)
/// gets the `i`-th lane; same-lane ranks follow arrival order.
pub fn fleet_from_lanes(lanes: &[Lane]) -> Vec<VehicleRecord> {
    let mut per_lane = [0usize; 12];
    lanes
        .iter()
        .enumerate()
        .map(|(k, &lane)| {
            let rank = per_lane[lane.id()];
            per_lane[lane.id()] += 1;
            VehicleRecord::new(k + 1, lane, QUEUE_SPACING * (rank + 1) as f64, rank)
        })
        .collect()
}

/// Lanes of the reference scenario: east straight, east left, south straight,
/// west straight, then two on the north straight lane.
pub fn example1_lanes() -> Vec<Lane> {
    vec![
        Lane::new(Approach::East, Turn::Straight),
        Lane::new(Approach::East, Turn::Left),
        Lane::new(Approach::South, Turn::Straight),
        Lane::new(Approach::West, Turn::Straight),
        Lane::new(Approach::North, Turn::Straight),
        Lane::new(Approach::North, Turn::Straight),
    ]
}

pub fn example1() -> Vec<VehicleRecord> {
    fleet_from_lanes(&example1_lanes())
}

/// Lanes allowed in a random fleet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneMix {
    All,
    /// Left-turn and straight lanes only.
    NoRightTurns,
}

impl LaneMix {
    pub fn lanes(self) -> Vec<Lane> {
        Lane::all()
            .filter(|l| self == LaneMix::All || l.turn != Turn::Right)
            .collect()
    }
}

pub fn random_lanes<R: Rng + ?Sized>(rng: &mut R, n: usize, mix: LaneMix) -> Vec<Lane> {
    let pool = mix.lanes();
    (0..n).map(|_| pool[rng.gen_range(0..pool.len())]).collect()
}

pub fn random_fleet<R: Rng + ?Sized>(rng: &mut R, n: usize, mix: LaneMix) -> Vec<VehicleRecord> {
    fleet_from_lanes(&random_lanes(rng, n, mix))
}
