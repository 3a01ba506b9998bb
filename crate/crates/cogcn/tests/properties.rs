//! Property tests over randomly generated graphs, score vectors and
//! partitions.

use std::collections::BTreeMap;

use cogcn::graph::{normalize_adjacency, AppGraph, RawMonolith};
use cogcn::matrix::DenseMatrix;
use cogcn::metrics::modularity;
use cogcn::partition::Partition;
use cogcn::synth::adjusted_rand_index;
use cogcn::trainer::update_outliers_structural;
use proptest::prelude::*;

/// A random but always-valid monolith description over up to 8 classes.
fn raw_monolith_strategy() -> impl Strategy<Value = RawMonolith> {
    (2usize..8).prop_flat_map(|n| {
        let names: Vec<String> = (0..n).map(|i| format!("C{i}")).collect();
        let pairs = prop::collection::vec((0..n, 0..n), 0..12);
        let inherit = prop::collection::vec(
            (0..n, 0..n).prop_filter("no self inheritance", |(a, b)| a != b),
            0..4,
        );
        let traces = prop::collection::vec(prop::collection::vec(0..n, 1..=n), 1..5);
        (Just(names), pairs, inherit, traces).prop_map(|(names, pairs, inherit, traces)| {
            let calls: Vec<(String, String)> = pairs
                .into_iter()
                .map(|(a, b)| (names[a].clone(), names[b].clone()))
                .collect();
            let inheritance: Vec<(String, String)> = inherit
                .into_iter()
                .map(|(a, b)| (names[a].clone(), names[b].clone()))
                .collect();
            let entrypoints: BTreeMap<String, Vec<String>> = traces
                .into_iter()
                .enumerate()
                .map(|(i, t)| {
                    (
                        format!("ep{i}"),
                        t.into_iter().map(|c| names[c].clone()).collect(),
                    )
                })
                .collect();
            RawMonolith::new(names, &calls, &inheritance, &entrypoints).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn attribute_rows_sum_to_one_or_zero(raw in raw_monolith_strategy()) {
        let graph = AppGraph::build(&raw).unwrap();
        let blocks = graph.blocks();
        let widths = [
            (0, blocks.entrypoint.cols()),
            (blocks.entrypoint.cols(), blocks.co_occurrence.cols()),
            (
                blocks.entrypoint.cols() + blocks.co_occurrence.cols(),
                blocks.inheritance.cols(),
            ),
        ];
        for i in 0..graph.node_count() {
            for (offset, width) in widths {
                let sum: f64 = graph.attributes().row(i)[offset..offset + width].iter().sum();
                prop_assert!(
                    sum.abs() < 1e-12 || (sum - 1.0).abs() < 1e-12,
                    "row {i} block at {offset} sums to {sum}"
                );
            }
        }
    }

    #[test]
    fn graph_symmetry_invariants(raw in raw_monolith_strategy()) {
        let graph = AppGraph::build(&raw).unwrap();
        let n = graph.node_count();
        let blocks = graph.blocks();
        for i in 0..n {
            prop_assert_eq!(graph.adjacency().get(i, i), 0.0, "diagonal must stay zero");
            prop_assert_eq!(blocks.inheritance.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(blocks.co_occurrence.get(i, j), blocks.co_occurrence.get(j, i));
                prop_assert_eq!(blocks.inheritance.get(i, j), blocks.inheritance.get(j, i));
            }
        }
        let a_hat = normalize_adjacency(graph.adjacency(), true);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((a_hat.get(i, j) - a_hat.get(j, i)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn prune_is_idempotent(raw in raw_monolith_strategy()) {
        let once = raw.prune_untraced().unwrap();
        prop_assert_eq!(once.prune_untraced().unwrap(), once);
    }

    #[test]
    fn modularity_stays_in_range(
        edges in prop::collection::vec((0usize..12, 0usize..12), 0..40),
        labels in prop::collection::vec(0usize..4, 12),
    ) {
        let mut a = DenseMatrix::zeros(12, 12);
        for (i, j) in edges {
            if i != j {
                a.set(i, j, 1.0);
                a.set(j, i, 1.0);
            }
        }
        let p = Partition::new(labels, 4);
        let q = modularity(&a, &p);
        prop_assert!((-0.5..=1.0).contains(&q), "modularity {q} out of range");
    }

    #[test]
    fn structural_scores_form_a_distribution(
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 2..10),
    ) {
        let n = rows.len();
        let z = DenseMatrix::from_rows(&rows);
        let a = DenseMatrix::zeros(n, n);
        let scores = update_outliers_structural(&a, &z);
        let sum: f64 = scores.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(scores.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn losses_are_non_negative_for_valid_scores(
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 3..8),
        raw_scores in prop::collection::vec(0.01f64..1.0, 8),
    ) {
        let n = rows.len();
        let z = DenseMatrix::from_rows(&rows);
        let a = DenseMatrix::zeros(n, n);
        let total: f64 = raw_scores[..n].iter().sum();
        let scores: Vec<f64> = raw_scores[..n].iter().map(|s| s / total).collect();
        let l = cogcn::gcn::loss_str(&a, &z, &scores);
        prop_assert!(l >= 0.0, "loss_str went negative: {l}");
    }

    #[test]
    fn ari_is_symmetric_and_permutation_invariant(
        labels_a in prop::collection::vec(0usize..4, 8),
        labels_b in prop::collection::vec(0usize..4, 8),
    ) {
        let ab = adjusted_rand_index(&labels_a, &labels_b);
        let ba = adjusted_rand_index(&labels_b, &labels_a);
        prop_assert!((ab - ba).abs() < 1e-12);
        // Relabeling one side must not change the index.
        let permuted: Vec<usize> = labels_b.iter().map(|&l| (l + 1) % 4).collect();
        let ap = adjusted_rand_index(&labels_a, &permuted);
        prop_assert!((ab - ap).abs() < 1e-12);
    }
}
