//! Maximum matching on graphs that need blossom contraction, checked against
//! exhaustive search.

use intersched::{brute_force_matching, maximum_matching, SimpleGraph};

fn report(name: &str, g: &SimpleGraph) {
    let m = maximum_matching(g);
    let best = brute_force_matching(g).expect("small graph");
    assert!(m.is_valid_in(g));
    println!(
        "{name:<22} |M| = {} (exhaustive {})  {:?}",
        m.len(),
        best,
        m.pairs()
    );
}

fn main() {
    let mut c5 = SimpleGraph::new(5);
    for i in 1..=5 {
        c5.add_edge(i, i % 5 + 1);
    }
    report("5-cycle", &c5);

    // Triangle 1-2-3 with tails 3-4 and 1-5-6: the augmenting path to 6
    // runs through the contracted triangle.
    let mut g = SimpleGraph::new(6);
    for (a, b) in [(1, 2), (2, 3), (3, 1), (3, 4), (1, 5), (5, 6)] {
        g.add_edge(a, b);
    }
    report("triangle with tails", &g);

    let mut petersen = SimpleGraph::new(10);
    for i in 0..5 {
        petersen.add_edge(i + 1, (i + 1) % 5 + 1);
        petersen.add_edge(i + 1, i + 6);
        petersen.add_edge(i + 6, (i + 2) % 5 + 6);
    }
    report("Petersen", &petersen);
}
