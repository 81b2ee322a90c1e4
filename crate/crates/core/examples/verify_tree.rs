//! Load a tree document and run the envelope check on it.
//!
//! cargo run --example verify_tree -- path/to/tree.json

use mfmart::tree::TreeBuilder;
use mfmart::{envelope, FiltrationTree};

fn main() {
    let tree = match std::env::args().nth(1) {
        Some(path) => FiltrationTree::from_json(&std::fs::read_to_string(path).unwrap()).unwrap(),
        None => {
            // root 3 is above both children, so this is not a measure-free martingale
            TreeBuilder::new(2)
                .cell("a", 1, None, 3.0)
                .cell("a0", 2, Some("a"), 1.0)
                .cell("a1", 2, Some("a"), 2.0)
                .build()
                .unwrap()
        }
    };

    let report = envelope(&tree);
    for r in &report.records {
        let mark = if r.ok { "ok " } else { "BAD" };
        println!("{mark} {:<12} {} <= {} <= {}", r.id, r.min, r.value, r.max);
    }
    println!(
        "depth {}, {} cells, hash {}",
        tree.depth(),
        tree.len(),
        tree.content_hash()
    );
    match report.first_violation() {
        None => println!("measure-free martingale"),
        Some(id) => println!("violation at `{id}`"),
    }
}
