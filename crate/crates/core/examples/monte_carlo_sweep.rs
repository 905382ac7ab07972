//! A small Monte Carlo sweep comparing evacuation times of the three
//! schedulers. Pass a fleet size and seed count to change the workload.

use intersched::experiment::{run_sweep, ScenarioSpec};
use intersched::Scheduler;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(40);
    let seeds: u64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(10);

    let spec = ScenarioSpec {
        n: vec![n],
        seeds: (1..=seeds).collect(),
        ..Default::default()
    };
    let result = run_sweep(&spec)?;
    result.write_summary_csv(std::io::stdout())?;

    let opt = result
        .evac_saving(Scheduler::Dfst, Scheduler::OptDfst, n)
        .unwrap();
    let mm = result
        .evac_saving(Scheduler::OptDfst, Scheduler::Mm, n)
        .unwrap();
    println!("\nopt_dfst vs dfst: {:.1}% shorter evacuation", 100.0 * opt);
    println!("mm vs opt_dfst:   {:.1}% shorter evacuation", 100.0 * mm);
    Ok(())
}
