//! The six-vehicle reference scenario through all three schedulers.

use intersched::{build_cug, fleet, graphs_for, mm_schedule, ConflictMatrix, Scheduler};

fn main() {
    let records = fleet::example1();
    let (table, cdg) =
        graphs_for(ConflictMatrix::standard(), &records).expect("reference fleet is valid");

    println!("vehicle  lane             C_i        D_i");
    for r in &records {
        let s = table.get(r.index).unwrap();
        println!(
            "{:>7}  {:<15}  {:<9}  {:?}",
            r.index,
            r.lane.to_string(),
            format!("{:?}", s.crossing),
            s.diverging
        );
    }
    println!("\n{}", cdg.to_text());
    let cug = build_cug(&cdg);
    println!("{}", cug.to_text());

    for s in Scheduler::ALL {
        let schedule = s.schedule(&cdg);
        schedule
            .audit(&cdg)
            .expect("schedulers produce valid orders");
        println!(
            "{:<9} d_all={}  layers={:?}",
            s.name(),
            schedule.d_all(),
            schedule.layers()
        );
    }

    let mm = mm_schedule(&cug, &cdg);
    println!("\nmatching on the coexisting graph: {:?}", mm.matching);
    println!("pairs kept in the order: {:?}", mm.scheduled_pairs);
}
