//! Tail oscillation of random trees whose increments shrink geometrically.
//!
//! cargo run --example convergence -- 7

use mfmart::experiments::{convergence_report, generate_equicontinuous, EquicontinuousSpec};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .map_or(7, |s| s.parse().expect("seed"));
    let spec = EquicontinuousSpec::new(12, 1.0, 0.5, 2, seed);
    let tree = generate_equicontinuous(&spec).unwrap();
    let report = convergence_report(&tree);

    println!("{} atoms, seed {seed}", report.atoms.len());
    println!("level  max osc          bound");
    for (i, o) in report.max_osc.iter().enumerate() {
        println!("{:>5}  {o:<15.9e}  {:.9e}", i + 1, spec.tail_bound(i + 1));
    }
    if let Some(rho) = report.fitted_ratio {
        println!(
            "fitted decay ratio {rho:.4} (construction ratio {})",
            spec.r
        );
    }
}
