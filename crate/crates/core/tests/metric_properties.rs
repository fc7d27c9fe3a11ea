use std::collections::{BTreeMap, BTreeSet};

use foodkg_core::graphrag::{rank, FactEmbedding, FactIndex, RetrievalParams};
use foodkg_core::matching::{cosine, EmbeddingVector, VectorIndex};
use foodkg_core::metrics::{
    containment_accuracy, gestalt_similarity, mean_label_f1, set_f1, BinaryConfusion,
};
use foodkg_core::EdgeId;
use proptest::prelude::*;

fn word() -> impl Strategy<Value = String> {
    "[abcé ]{0,12}"
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4i8..=4, dim).prop_map(|v| v.into_iter().map(f64::from).collect())
}

fn embedding(values: Vec<f64>) -> EmbeddingVector {
    EmbeddingVector::new("m", values)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gestalt_is_symmetric_bounded_and_reflexive(a in word(), b in word()) {
        let s = gestalt_similarity(&a, &b);
        prop_assert_eq!(s, gestalt_similarity(&b, &a));
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s == 1.0, a == b);
    }

    #[test]
    fn gestalt_long_inputs_are_symmetric(a in "[ab]{60,80}", b in "[ab]{60,80}") {
        prop_assert_eq!(gestalt_similarity(&a, &b), gestalt_similarity(&b, &a));
    }

    #[test]
    fn set_f1_is_one_exactly_on_equal_sets(
        truth in prop::collection::btree_set(0u8..8, 0..6),
        pred in prop::collection::btree_set(0u8..8, 0..6),
    ) {
        prop_assert_eq!(set_f1(&truth, &pred) == 1.0, truth == pred);
    }

    #[test]
    fn adding_a_correct_label_never_hurts(
        truth in prop::collection::btree_set(0u8..12, 1..8),
        keep in prop::collection::vec(any::<bool>(), 12),
        extra in any::<prop::sample::Index>(),
    ) {
        let pred: BTreeSet<u8> = truth.iter().copied().filter(|&t| keep[t as usize]).collect();
        let added = *truth.iter().nth(extra.index(truth.len())).unwrap();
        let mut grown = pred.clone();
        grown.insert(added);
        prop_assert!(set_f1(&truth, &grown) >= set_f1(&truth, &pred));
    }

    #[test]
    fn mean_label_f1_ignores_label_order(
        counts in prop::collection::vec((0u64..20, 0u64..20, 0u64..20, 0u64..20), 1..10),
        order in Just(()).prop_perturb(|_, mut rng| rng.random::<u64>()),
    ) {
        let labels: Vec<String> = (0..counts.len()).map(|i| format!("label{i}")).collect();
        let table: BTreeMap<String, BinaryConfusion> = labels
            .iter()
            .zip(&counts)
            .map(|(l, &(tp, fp, fn_, tn))| (l.clone(), BinaryConfusion::new(tp, fp, fn_, tn)))
            .collect();
        let mut shuffled = labels.clone();
        shuffled.rotate_left((order as usize) % labels.len());
        shuffled.reverse();
        let a = mean_label_f1(&table, &labels).unwrap();
        let b = mean_label_f1(&table, &shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn containment_is_bounded_and_survives_appending(
        rows in prop::collection::vec(("[a-c ]{0,10}", "[a-c]{1,3}"), 1..8),
        suffix in "[a-c ]{0,6}",
    ) {
        let before = containment_accuracy(&rows).unwrap();
        prop_assert!((0.0..=1.0).contains(&before));
        let longer: Vec<(String, String)> =
            rows.iter().map(|(r, e)| (format!("{r}{suffix}"), e.clone())).collect();
        prop_assert!(containment_accuracy(&longer).unwrap() >= before);
    }

    #[test]
    fn cosine_is_symmetric_and_scale_free(a in vector(5), b in vector(5), k in 0.01f64..100.0) {
        let (va, vb) = (embedding(a.clone()), embedding(b));
        if let (Ok(x), Ok(y)) = (cosine(&va, &vb), cosine(&vb, &va)) {
            prop_assert_eq!(x, y);
        }
        if va.norm() > 0.0 {
            let scaled = embedding(a.iter().map(|x| x * k).collect());
            prop_assert!((cosine(&va, &scaled).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nearest_is_the_scan_argmax(
        rows in prop::collection::vec(vector(4), 1..1000),
        query in vector(4),
    ) {
        prop_assume!(query.iter().any(|&x| x != 0.0));
        let mut index = VectorIndex::new("m");
        let mut kept = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            if row.iter().any(|&x| x != 0.0) {
                index.insert(format!("k{i}"), embedding(row.clone())).unwrap();
                kept.push(row);
            }
        }
        prop_assume!(!kept.is_empty());
        let scan: Vec<f64> = kept
            .iter()
            .map(|row| {
                let dot: f64 = row.iter().zip(&query).map(|(a, b)| a * b).sum();
                let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
                (dot / (norm(row) * norm(&query))).clamp(-1.0, 1.0)
            })
            .collect();
        let best = scan.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = (0..scan.len()).filter(|&i| scan[i] == best).collect();
        let found = index.nearest(&embedding(query)).unwrap();
        prop_assert_eq!(found.positions, winners);
        prop_assert_eq!(found.score, best);
    }

    #[test]
    fn retrieval_is_bounded_and_ordered(
        rows in prop::collection::vec(vector(3), 0..500),
        query in vector(3),
        seeded_every in 1usize..30,
    ) {
        let facts: Vec<FactEmbedding> = rows
            .into_iter()
            .enumerate()
            .map(|(i, vector)| FactEmbedding { edge: EdgeId(i as u64), fact: format!("f{i}"), vector })
            .collect();
        let seeded: BTreeSet<EdgeId> =
            facts.iter().map(|f| f.edge).filter(|e| e.0 as usize % seeded_every == 0).collect();
        let index = FactIndex { model: "m".into(), dim: 3, facts };
        let params = RetrievalParams::default();
        let got = rank(&index, &query, &seeded, &params);
        prop_assert!(got.facts.len() <= params.k);
        for f in &got.facts {
            prop_assert!(f.seeded || f.score >= params.cutoff);
        }
        for pair in got.facts.windows(2) {
            prop_assert!(pair[0].score >= pair[1].score);
        }
    }
}
