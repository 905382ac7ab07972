//! Repairing pairs whose precedence constraints form a cycle, then layering
//! them into a passing order.

use intersched::schedule::{repair_infeasible_pairs, schedule_from_layers, spanning_layers};
use intersched::{fleet, graphs_for, ConflictMatrix};

fn main() {
    let (_, cdg) = graphs_for(ConflictMatrix::standard(), &fleet::example1()).unwrap();

    // 6 trails 5 on the same lane, so {3,6} cannot pass before {2,5}.
    let units = vec![vec![1, 4], vec![3, 6], vec![2, 5]];
    let repaired = repair_infeasible_pairs(&units, &cdg);
    println!("input    {units:?}");
    println!(
        "repaired {:?} after {} exchange(s)",
        repaired.units, repaired.exchanges
    );

    let spanned = spanning_layers(&repaired.units, &cdg);
    let schedule = schedule_from_layers(&spanned.layers, &cdg);
    schedule.audit(&cdg).unwrap();
    println!("layers   {:?}", spanned.layers);
    print!("{}", schedule.to_text());

    // A pair inside one lane can never share a depth; it is split.
    let split = spanning_layers(&[vec![1, 4], vec![5, 6], vec![2], vec![3]], &cdg);
    println!(
        "split pairs {:?} -> layers {:?}",
        split.split_pairs, split.layers
    );
}
