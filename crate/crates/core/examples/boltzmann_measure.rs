//! Build martingale measures on a small tree with each conditional rule.

use mfmart::measures::{
    consistency_error, measure_entropy_profile, Boltzmann, ConditionalRule, TwoPoint,
    UniformFeasible,
};
use mfmart::tree::TreeBuilder;
use mfmart::{build_measure, check_martingale};

fn main() {
    let tree = TreeBuilder::new(3)
        .cell("q", 1, None, 1.0)
        .cell("q.0", 2, Some("q"), 0.0)
        .cell("q.1", 2, Some("q"), 1.5)
        .cell("q.2", 2, Some("q"), 4.0)
        .cell("q.0.0", 3, Some("q.0"), -1.0)
        .cell("q.0.1", 3, Some("q.0"), 2.0)
        .cell("q.1.0", 3, Some("q.1"), 1.5)
        .cell("q.2.0", 3, Some("q.2"), 3.0)
        .cell("q.2.1", 3, Some("q.2"), 4.0)
        .cell("q.2.2", 3, Some("q.2"), 6.0)
        .build()
        .unwrap();

    let rules: [&dyn ConditionalRule; 3] = [
        &Boltzmann::default(),
        &UniformFeasible,
        &TwoPoint::lowest_feasible(),
    ];
    for rule in rules {
        let m = build_measure(&tree, rule, None).unwrap();
        println!("== {}", rule.name());
        for q in tree.cells_in_order() {
            println!(
                "  {:<7} value {:>5}  mass {:.6}",
                tree.cell(q).id(),
                tree.value(q),
                m.mass(q)
            );
        }
        let total: f64 = measure_entropy_profile(&tree, &m)
            .iter()
            .map(|e| e.entropy)
            .sum();
        println!(
            "  martingale error {:.1e}, consistency {:.1e}, conditional entropy {total:.6}",
            check_martingale(&tree, &m).max_error,
            consistency_error(&tree, &m)
        );
    }
}
