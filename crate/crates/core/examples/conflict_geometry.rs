//! Builds the twelve movement paths, prints their lengths and the lane-pair
//! conflict classes.

use intersched::{ConflictClass, ConflictMatrix, IntersectionGeometry, Lane};

fn main() {
    let geometry = IntersectionGeometry::default();
    let matrix = ConflictMatrix::from_geometry(&geometry).expect("default geometry is valid");

    println!("movement lengths (m):");
    for lane in Lane::all() {
        let m = geometry.movement(lane);
        println!(
            "  {:<16} {:6.2}  entry {:?}  exit {:?}",
            lane.to_string(),
            m.length(),
            m.entry(),
            m.exit()
        );
    }

    println!("\ncrossing pairs ({}):", matrix.crossing_pairs().len());
    for (a, b) in matrix.crossing_pairs() {
        println!("  {a} x {b}");
    }

    println!("\nclass matrix (X crossing, D same lane, . none):");
    let lanes: Vec<Lane> = Lane::all().collect();
    for &a in &lanes {
        let row: String = lanes
            .iter()
            .map(|&b| match matrix.lane_class(a, b) {
                ConflictClass::Crossing => 'X',
                ConflictClass::Diverging => 'D',
                ConflictClass::None => '.',
            })
            .collect();
        println!("  {row}  {a}");
    }
}
