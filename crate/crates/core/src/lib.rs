//! Conflict-free passing orders for an unsignalized four-way intersection
//! with twelve dedicated lanes, plus a virtual-platoon simulator to measure
//! how long each order takes to clear the intersection.
//!
//! The pipeline runs: [`geometry`] classifies lane pairs and freezes each
//! vehicle's conflict sets, [`graphs`] turns them into the conflict directed
//! graph and its complement, [`schedule`] builds a passing-order tree with
//! one of three schedulers, and [`sim`] drives the vehicles through it.

pub mod experiment;
pub mod fleet;
pub mod geometry;
pub mod graphs;
pub mod matching;
pub mod schedule;
pub mod sim;

pub use geometry::{
    build_conflict_sets, Approach, ConflictClass, ConflictMatrix, ConflictSets, ConflictTable,
    IntersectionGeometry, Lane, Movement, Turn, VehicleRecord,
};
pub use graphs::{build_cdg, build_cug, CoexistingUndirectedGraph, ConflictDirectedGraph};
pub use matching::{brute_force_matching, maximum_matching, Matching, SimpleGraph};
pub use schedule::{dfst, mm_schedule, opt_dfst, PassingSchedule, Scheduler};

/// Conflict sets and CDG for a fleet of records indexed `1..=n`.
pub fn graphs_for(
    matrix: &ConflictMatrix,
    vehicles: &[VehicleRecord],
) -> Result<(ConflictTable, ConflictDirectedGraph), Box<dyn std::error::Error + Send + Sync>> {
    let table = build_conflict_sets(matrix, vehicles)?;
    let cdg = build_cdg(&table, vehicles.len())?;
    Ok((table, cdg))
}
