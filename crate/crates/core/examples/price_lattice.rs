//! Risk-neutral probabilities on a binomial and a trinomial price lattice.

use mfmart::lattice::LatticeSpec;
use mfmart::measures::Boltzmann;
use mfmart::{build_measure, envelope};

fn main() {
    let binomial = LatticeSpec::binomial(3, 1.0, 2.0, 0.5);
    let tree = binomial.generate().unwrap();
    let m = build_measure(&tree, &Boltzmann::default(), None).unwrap();
    let root = tree.roots()[0];
    println!(
        "binomial: {} cells, root conditional {:?}",
        tree.len(),
        m.conditional(&tree, root).unwrap()
    );

    // a European call struck at 1, priced as the expectation over terminal cells
    let call: f64 = tree
        .leaves()
        .iter()
        .map(|&l| m.mass(l) * (tree.value(l) - 1.0).max(0.0))
        .sum();
    println!("call(K=1) = {call:.6}");

    let trinomial = LatticeSpec::trinomial(2, 1.0, 1.5, 1.0, 0.5);
    let tree = trinomial.generate().unwrap();
    let m = build_measure(&tree, &Boltzmann::default(), None).unwrap();
    let root = tree.roots()[0];
    println!(
        "trinomial: {} cells, root conditional {:?}",
        tree.len(),
        m.conditional(&tree, root).unwrap()
    );

    let drifting = LatticeSpec::binomial(3, 1.0, 2.0, 1.1);
    println!(
        "d = 1.1: brackets = {}, envelope ok = {}",
        drifting.brackets(),
        envelope(&drifting.generate().unwrap()).ok
    );
}
