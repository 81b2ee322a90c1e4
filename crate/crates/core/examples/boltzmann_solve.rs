//! Maximum-entropy distribution with a prescribed mean.
//!
//! cargo run --example boltzmann_solve -- 0 1 3 --alpha 1

use mfmart::boltzmann::DEFAULT_TOL;
use mfmart::solve_boltzmann;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (values, alpha) = match args.iter().position(|a| a == "--alpha") {
        Some(i) => (
            args[..i]
                .iter()
                .map(|s| s.parse().expect("number"))
                .collect::<Vec<f64>>(),
            args[i + 1].parse::<f64>().expect("number"),
        ),
        None => (vec![0.0, 1.0, 3.0], 1.0),
    };

    let sol = solve_boltzmann(&values, alpha, DEFAULT_TOL).expect("alpha inside the value range");
    println!("values   {:?}", values);
    println!("alpha    {alpha}");
    println!("lambda   {}", sol.lambda);
    println!("probs    {:?}", sol.distribution.probs());
    println!(
        "entropy  {:.12}  (log k = {:.12})",
        sol.entropy,
        (values.len() as f64).ln()
    );
    println!(
        "variance {:.6e}, {} iterations, residual {:.1e}",
        sol.variance, sol.iterations, sol.residual
    );

    // at the edge of the range the tilt runs off to infinity
    let edge = solve_boltzmann(&[0.0, 0.0, 1.0], 0.0, DEFAULT_TOL).unwrap();
    println!(
        "\n{{0, 0, 1}} at alpha = 0: lambda {}, probs {:?}",
        edge.lambda,
        edge.distribution.probs()
    );
}
