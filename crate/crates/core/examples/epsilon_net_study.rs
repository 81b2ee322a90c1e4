//! Boltzmann distributions on shrinking ε-nets of {0} ∪ [0.5, 1].

use mfmart::experiments::net_convergence_study;

fn main() {
    let mut sample = vec![0.0];
    sample.extend((0..=100).map(|i| 0.5 + i as f64 / 200.0));
    let eps = [0.2, 0.1, 0.05, 0.025, 0.0125];

    let rows = net_convergence_study(&sample, 0.4, &eps, &[0.3, 0.7]).unwrap();
    println!(
        "{:>8} {:>4} {:>9} {:>9} {:>9} {:>9}",
        "eps", "n", "lambda", "ks_prev", "w1_prev", "ks_cross"
    );
    for r in rows {
        let (ks, w1) = r
            .to_previous
            .map_or((f64::NAN, f64::NAN), |d| (d.kolmogorov, d.wasserstein1));
        let cross = r.cross_net.map_or(f64::NAN, |d| d.kolmogorov);
        println!(
            "{:>8} {:>4} {:>9.4} {ks:>9.4} {w1:>9.4} {cross:>9.4}",
            r.epsilon,
            r.net_size,
            r.lambda.finite().unwrap()
        );
    }
}
