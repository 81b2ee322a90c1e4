//! Enumerate the extreme martingale measures of a small tree.

use mfmart::measures::enumerate_extremes;
use mfmart::tree::TreeBuilder;

fn main() {
    let tree = TreeBuilder::new(3)
        .cell("q", 1, None, 1.0)
        .cell("q.0", 2, Some("q"), 0.0)
        .cell("q.1", 2, Some("q"), 1.0)
        .cell("q.2", 2, Some("q"), 2.0)
        .cell("q.2.0", 3, Some("q.2"), 1.0)
        .cell("q.2.1", 3, Some("q.2"), 2.5)
        .cell("q.2.2", 3, Some("q.2"), 3.0)
        .cell("q.0.0", 3, Some("q.0"), 0.0)
        .cell("q.1.0", 3, Some("q.1"), 1.0)
        .build()
        .unwrap();

    let en = enumerate_extremes(&tree, 100, None).unwrap();
    for (id, options) in en.per_cell_options() {
        println!("cell {id}: {} extreme conditionals", options.len());
        for o in options {
            println!("    {:?} -> {:?}", o.support, o.probs);
        }
    }
    println!("{} extreme measures", en.total());
    for (i, (_, m)) in en.enumerate() {
        let leaves: Vec<String> = tree
            .leaves()
            .iter()
            .map(|&l| format!("{:.3}", m.mass(l)))
            .collect();
        println!("  #{i}: leaf masses [{}]", leaves.join(", "));
    }
}
