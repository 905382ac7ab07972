//! Drives the reference fleet and a random arrival stream through the
//! virtual-platoon controller and prints the resulting metrics.

use intersched::sim::{
    simulate, write_trajectory_file, ArrivalModel, SimConfig, SimInput, SimOptions,
};
use intersched::{fleet, Scheduler};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SimConfig::default();

    let input = SimInput::from_records(&fleet::example1());
    for s in Scheduler::ALL {
        let m = simulate(&input, s, &cfg, SimOptions::default())?.metrics;
        let exits: Vec<String> = m.exit_times.iter().map(|t| format!("{t:.1}")).collect();
        println!(
            "{:<9} d_all={} evac={:.2}s exits=[{}]",
            s.name(),
            m.d_all,
            m.evacuation_time,
            exits.join(", ")
        );
    }

    let arrivals = SimInput::Arrivals(ArrivalModel {
        p: 0.3,
        seed: 7,
        n_total: 40,
    });
    let options = SimOptions {
        trajectory_interval: Some(0.5),
    };
    let out = simulate(&arrivals, Scheduler::Mm, &cfg, options)?;
    println!(
        "\n{}",
        serde_json::to_string_pretty(&out.metrics.to_flat_json())?
    );

    let path = std::env::temp_dir().join("intersched_trajectory.csv");
    write_trajectory_file(&out.trajectory, &path)?;
    println!(
        "trajectory ({} rows) written to {}",
        out.trajectory.len(),
        path.display()
    );
    Ok(())
}
