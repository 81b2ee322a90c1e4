mod common;

use common::{arbitrary_document, envelope_oracle, martingale_document, Shape};
use mfmart::{envelope, FiltrationTree};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn envelope_matches_brute_force(seed in any::<u64>()) {
        let doc = arbitrary_document(seed, 6, 5);
        let (ok, bad) = envelope_oracle(&doc);
        let tree = FiltrationTree::from_document(doc).unwrap();
        let report = envelope(&tree);
        prop_assert_eq!(report.ok, ok);
        let mut got = report.violations.clone();
        got.sort();
        prop_assert_eq!(got, bad);
    }

    #[test]
    fn envelope_bounds_are_child_values(seed in any::<u64>()) {
        let tree = FiltrationTree::from_document(arbitrary_document(seed, 5, 5)).unwrap();
        let report = envelope(&tree);
        for rec in &report.records {
            let kids: Vec<f64> = tree
                .children_values(&rec.id)
                .unwrap()
                .into_iter()
                .map(|(_, v)| v)
                .collect();
            prop_assert!(rec.min <= rec.max);
            prop_assert!(kids.contains(&rec.min));
            prop_assert!(kids.contains(&rec.max));
            prop_assert_eq!(rec.ok, rec.min <= rec.value && rec.value <= rec.max);
        }
        // idempotent
        prop_assert_eq!(envelope(&tree), report);
    }

    #[test]
    fn martingale_trees_pass(seed in any::<u64>()) {
        let tree = FiltrationTree::from_document(martingale_document(seed, Shape::default())).unwrap();
        let report = envelope(&tree);
        prop_assert!(report.ok, "violations: {:?}", report.violations);
    }

    #[test]
    fn json_round_trip_keeps_hash(seed in any::<u64>()) {
        let doc = martingale_document(seed, Shape { max_depth: 4, ..Shape::default() });
        let tree = FiltrationTree::from_document(doc.clone()).unwrap();
        let again = FiltrationTree::from_json(&tree.to_json_pretty()).unwrap();
        prop_assert_eq!(again.content_hash(), tree.content_hash());
        prop_assert_eq!(again.to_document(), tree.to_document());
        prop_assert_eq!(tree.len(), doc.cells.len());
    }
}
