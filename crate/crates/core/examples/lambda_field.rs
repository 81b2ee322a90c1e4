//! The field of Boltzmann tilts over a tree, and whether it is itself a
//! measure-free martingale.

use mfmart::experiments::lambda_field;
use mfmart::lattice::{additive_tree, LatticeSpec};
use mfmart::FiltrationTree;

fn report(label: &str, tree: &FiltrationTree) {
    let r = lambda_field(tree).unwrap();
    println!("== {label}");
    for e in r.field.entries.iter().take(8) {
        println!("  {:<8} level {}  lambda {}", e.id, e.level, e.lambda);
    }
    if r.field.entries.len() > 8 {
        println!("  ... {} cells", r.field.entries.len());
    }
    println!(
        "  envelope of g: ok = {}, {} checked, {} excluded",
        r.envelope.ok,
        r.envelope.records.len(),
        r.excluded.len()
    );
}

fn main() {
    report(
        "symmetric additive",
        &additive_tree(4, 0.0, &[-1.0, 0.0, 1.0]).unwrap(),
    );
    report(
        "trinomial u=2 m=1 d=0.5",
        &LatticeSpec::trinomial(3, 1.0, 2.0, 1.0, 0.5)
            .generate()
            .unwrap(),
    );
    report(
        "skewed additive",
        &additive_tree(4, 0.0, &[-1.0, 0.2, 3.0]).unwrap(),
    );
}
