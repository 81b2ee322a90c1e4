use mfmart::boltzmann::ProbabilityVector;
use mfmart::envelope;
use mfmart::experiments::{
    convergence_report, distribution_distance, epsilon_net, epsilon_net_anchored,
    generate_equicontinuous, EquicontinuousSpec,
};
use proptest::collection::vec;
use proptest::prelude::*;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn distribution() -> impl Strategy<Value = ProbabilityVector> {
    vec((-3.0..3.0f64, 0.0..1.0f64), 1..8).prop_filter_map("positive weight", |pts| {
        let total: f64 = pts.iter().map(|p| p.1).sum();
        if total <= 0.0 {
            return None;
        }
        let mut pts = pts;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let total: f64 = pts.iter().map(|p| p.1).sum();
        if total <= 0.0 {
            return None;
        }
        let values = pts.iter().map(|p| p.0).collect();
        let probs = pts.iter().map(|p| p.1 / total).collect();
        ProbabilityVector::new(values, probs).ok()
    })
}

fn check_cover(sample: &[f64], net: &[f64], eps: f64) -> Result<(), TestCaseError> {
    for &x in sample {
        prop_assert!(net.iter().any(|&c| (c - x).abs() <= eps), "{x} uncovered");
    }
    for w in net.windows(2) {
        prop_assert!(w[1] - w[0] > eps, "{} and {} too close", w[0], w[1]);
    }
    for c in net {
        prop_assert!(sample.contains(c));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn generated_trees_bracket_and_settle(
        depth in 2usize..=8,
        c in 0.1..5.0f64,
        r in 0.1..0.9f64,
        branching in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let spec = EquicontinuousSpec::new(depth, c, r, branching, seed);
        let tree = generate_equicontinuous(&spec).unwrap();
        prop_assert!(envelope(&tree).ok);
        let report = convergence_report(&tree);
        for atom in &report.atoms {
            for (i, &o) in atom.osc.iter().enumerate() {
                let bound = spec.tail_bound(i + 1);
                prop_assert!(o <= bound * (1.0 + 1e-12) + 1e-12, "osc({}) = {o} > {bound}", i + 1);
            }
        }
        let again = generate_equicontinuous(&spec).unwrap();
        prop_assert_eq!(again.content_hash(), tree.content_hash());
    }
}

proptest! {
    #[test]
    fn greedy_net_covers_and_separates(
        raw in vec(-10.0..10.0f64, 1..200),
        eps in 0.01..3.0f64,
        offset in 0.0..1.0f64,
    ) {
        let sample = sorted(raw);
        check_cover(&sample, &epsilon_net(&sample, eps).unwrap(), eps)?;
        check_cover(&sample, &epsilon_net_anchored(&sample, eps, offset).unwrap(), eps)?;
    }

    #[test]
    fn distances_are_metrics(a in distribution(), b in distribution(), c in distribution()) {
        let ab = distribution_distance(&a, &b);
        let ba = distribution_distance(&b, &a);
        let bc = distribution_distance(&b, &c);
        let ac = distribution_distance(&a, &c);
        let aa = distribution_distance(&a, &a);
        prop_assert_eq!(aa.kolmogorov, 0.0);
        prop_assert_eq!(aa.wasserstein1, 0.0);
        prop_assert!(ab.kolmogorov >= 0.0 && ab.wasserstein1 >= 0.0);
        prop_assert!((ab.kolmogorov - ba.kolmogorov).abs() <= 1e-12);
        prop_assert!((ab.wasserstein1 - ba.wasserstein1).abs() <= 1e-12);
        prop_assert!(ac.kolmogorov <= ab.kolmogorov + bc.kolmogorov + 1e-12);
        prop_assert!(ac.wasserstein1 <= ab.wasserstein1 + bc.wasserstein1 + 1e-12);
        prop_assert!(ab.kolmogorov <= 1.0 + 1e-12);
    }

    #[test]
    fn w1_matches_quantile_integral(a in distribution(), b in distribution()) {
        // W1 = ∫_0^1 |F_a^{-1}(u) - F_b^{-1}(u)| du, integrated piecewise
        let mut cuts: Vec<f64> = cumulative(&a).into_iter().chain(cumulative(&b)).collect();
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        let mut w1 = 0.0;
        for w in cuts.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            w1 += (w[1] - w[0]) * (quantile(&a, mid) - quantile(&b, mid)).abs();
        }
        let got = distribution_distance(&a, &b).wasserstein1;
        prop_assert!((got - w1).abs() <= 1e-9, "{got} vs {w1}");
    }
}

fn cumulative(p: &ProbabilityVector) -> Vec<f64> {
    let mut acc = 0.0;
    p.probs()
        .iter()
        .map(|x| {
            acc += x;
            acc.min(1.0)
        })
        .collect()
}

fn quantile(p: &ProbabilityVector, u: f64) -> f64 {
    let mut acc = 0.0;
    for (x, q) in p.values().iter().zip(p.probs()) {
        acc += q;
        if acc >= u {
            return *x;
        }
    }
    *p.values().last().unwrap()
}
