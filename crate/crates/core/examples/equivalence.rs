//! Ratio bounds between two martingale measures on one tree.

use mfmart::build_measure;
use mfmart::lattice::LatticeSpec;
use mfmart::measures::{enumerate_extremes, equivalence_bounds, Boltzmann, UniformFeasible};

fn show(label: &str, r: &mfmart::measures::EquivalenceReport) {
    println!(
        "{label}: C = {:?}, D = {:?}, equivalent = {}",
        r.c, r.d, r.equivalent
    );
    if !r.offending.is_empty() {
        println!("    one-sided null cells: {}", r.offending.join(", "));
    }
}

fn main() {
    let tree = LatticeSpec::trinomial(2, 1.0, 1.5, 1.0, 0.5)
        .generate()
        .unwrap();
    let boltz = build_measure(&tree, &Boltzmann::default(), None).unwrap();
    let near_uniform = build_measure(&tree, &UniformFeasible, None).unwrap();
    let (_, extreme) = enumerate_extremes(&tree, 1, None).unwrap().next().unwrap();

    show(
        "boltzmann vs itself",
        &equivalence_bounds(&tree, &boltz, &boltz),
    );
    show(
        "uniform-feasible vs boltzmann",
        &equivalence_bounds(&tree, &near_uniform, &boltz),
    );
    show(
        "extreme vs boltzmann",
        &equivalence_bounds(&tree, &extreme, &boltz),
    );
}
