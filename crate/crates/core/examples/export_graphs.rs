//! Writes conflict sets, both graphs and the three passing orders of a
//! random fleet as text files.

use intersched::experiment::export_graphs;
use intersched::fleet::{random_fleet, LaneMix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let records = random_fleet(&mut rng, 12, LaneMix::All);
    let dir = std::env::temp_dir().join("intersched_graphs");
    for path in export_graphs(&records, &dir)? {
        println!("--- {}", path.display());
        print!("{}", std::fs::read_to_string(&path)?);
    }
    Ok(())
}
