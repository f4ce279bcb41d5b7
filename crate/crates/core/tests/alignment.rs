use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use samkit::alignment::{cluster_scores, sam_area};
use samkit::synthetic::{dataset_from_labels, gaussian_blobs, shuffled};
use samkit::{
    alignment_curve, alignment_score, aprc, ward_linkage, AlignmentMode, Dendrogram, KGrid,
    LabeledDataset, Partition,
};
use samkit_oracles::brute_force_ap;

fn random_labels(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> Vec<String> {
    loop {
        let labels: Vec<String> = (0..n).map(|_| format!("c{}", rng.random_range(0..classes))).collect();
        let mut distinct = labels.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() >= 2 {
            return labels;
        }
    }
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Dendrogram {
    let dim = rng.random_range(1..5);
    let rows: Vec<Vec<f32>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-3.0f32..3.0)).collect())
        .collect();
    ward_linkage(&samkit::EmbeddingMatrix::from_rows(&rows).unwrap()).unwrap()
}

#[test]
fn aprc_hand_cases() {
    assert!((aprc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap() - 1.0).abs() < 1e-9);
    let gold: Vec<bool> = (0..10).map(|i| i < 3).collect();
    assert!((aprc(&[0.5; 10], &gold).unwrap() - 0.3).abs() < 1e-9);
    assert!((brute_force_ap(&[0.5; 10], &gold) - 0.3).abs() < 1e-12);
    let v = aprc(&[0.9, 0.8, 0.7, 0.6], &[true, false, true, false]).unwrap();
    assert!((v - (0.5 + 0.5 * 2.0 / 3.0)).abs() < 1e-9);
}

#[test]
fn score_table_special_partitions() {
    let ds = dataset_from_labels(&["+", "+", "+", "-"]).unwrap();
    let one = cluster_scores(&Partition::from_assignment([0, 0, 0, 0]), &ds).unwrap();
    let plus = ds.class_index("+").unwrap();
    for i in 0..4 {
        assert_eq!(one.get(i, plus), 0.75);
        assert_eq!(one.get(i, 1 - plus), 0.25);
    }
    let singletons = cluster_scores(&Partition::from_assignment(0..4), &ds).unwrap();
    for i in 0..4 {
        let own = ds.label_codes()[i];
        assert_eq!(singletons.get(i, own), 1.0);
        assert_eq!(singletons.get(i, 1 - own), 0.0);
    }
}

#[test]
fn single_cluster_scores_prevalence() {
    let labels: Vec<&str> = (0..50).map(|i| if i % 10 == 0 { "rare" } else { "common" }).collect();
    let ds = dataset_from_labels(&labels).unwrap();
    let p = Partition::from_assignment(vec![0; 50]);
    let a = alignment_score(&p, &ds, &AlignmentMode::Target("rare".into())).unwrap();
    assert!((a - 0.1).abs() < 1e-12);
    let pure = Partition::from_assignment(labels.iter().copied());
    assert_eq!(alignment_score(&pure, &ds, &AlignmentMode::Balanced).unwrap(), 1.0);
    let singles = Partition::from_assignment(0..50);
    assert_eq!(alignment_score(&singles, &ds, &AlignmentMode::Balanced).unwrap(), 1.0);
}

fn two_blob_fixture(seed: u64) -> (samkit::EmbeddingMatrix, Vec<usize>) {
    gaussian_blobs(&[vec![0.0, 0.0, 0.0], vec![12.0, 0.0, 0.0]], 20, 1.0, seed).unwrap()
}

#[test]
fn pure_blobs_are_perfect_beyond_one_cluster() {
    let (m, blob) = two_blob_fixture(2);
    let ds = dataset_from_labels(&blob).unwrap();
    let d = ward_linkage(&m).unwrap();
    let curve = alignment_curve(&d, &ds, &KGrid::full(1, 40).unwrap(), &AlignmentMode::Balanced).unwrap();
    for p in &curve.points()[1..] {
        assert_eq!(p.a, 1.0, "k={}", p.k);
    }
    assert!(curve.sam() >= 0.99);
}

#[test]
fn aligned_labels_dominate_random_labels_at_small_k() {
    let (m, blob) = two_blob_fixture(8);
    let d = ward_linkage(&m).unwrap();
    let grid = KGrid::full(1, 40).unwrap();
    let aligned = dataset_from_labels(&blob).unwrap();
    let random = dataset_from_labels(&shuffled(&blob, 8)).unwrap();
    let a = alignment_curve(&d, &aligned, &grid, &AlignmentMode::Balanced).unwrap();
    let r = alignment_curve(&d, &random, &grid, &AlignmentMode::Balanced).unwrap();
    for k in 2..=5 {
        assert!(a.points()[k - 1].a > r.points()[k - 1].a, "k={k}");
    }
    assert!(a.sam() > r.sam());
}

#[test]
fn endpoints_on_random_datasets() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let n = rng.random_range(2..60);
        let labels = random_labels(&mut rng, n, 3);
        let ds = LabeledDataset::new((0..n).map(|i| i.to_string()).collect(), labels, None).unwrap();
        let d = random_tree(&mut rng, n);
        let target = ds.classes()[0].clone();
        let prevalence = ds.class_counts()[0] as f64 / n as f64;
        let curve = alignment_curve(
            &d,
            &ds,
            &KGrid::new(vec![1, n]).unwrap(),
            &AlignmentMode::Target(target),
        )
        .unwrap();
        assert_eq!(curve.points()[1].a, 1.0);
        assert!((curve.points()[0].a - prevalence).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn aprc_matches_threshold_enumeration(
        pairs in prop::collection::vec((0u8..12, any::<bool>()), 1..200),
    ) {
        prop_assume!(pairs.iter().any(|p| p.1));
        let scores: Vec<f64> = pairs.iter().map(|p| f64::from(p.0) / 11.0).collect();
        let gold: Vec<bool> = pairs.iter().map(|p| p.1).collect();
        let fast = aprc(&scores, &gold).unwrap();
        prop_assert!((fast - brute_force_ap(&scores, &gold)).abs() < 1e-9);
    }

    #[test]
    fn aprc_ignores_monotone_transforms(
        pairs in prop::collection::vec((-50i32..50, any::<bool>()), 1..80),
    ) {
        prop_assume!(pairs.iter().any(|p| p.1));
        let gold: Vec<bool> = pairs.iter().map(|p| p.1).collect();
        let raw: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let squashed: Vec<f64> = raw.iter().map(|&s| 1.0 / (1.0 + (-s / 7.0).exp())).collect();
        let cubed: Vec<f64> = raw.iter().map(|&s| s * s * s + 3.0).collect();
        let base = aprc(&raw, &gold).unwrap();
        prop_assert_eq!(base, aprc(&squashed, &gold).unwrap());
        prop_assert_eq!(base, aprc(&cubed, &gold).unwrap());
    }

    #[test]
    fn score_rows_sum_to_one(
        assignment in prop::collection::vec(0usize..6, 2..60),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = random_labels(&mut rng, assignment.len(), 4);
        let ds = dataset_from_labels(&labels).unwrap();
        let table = cluster_scores(&Partition::from_assignment(assignment), &ds).unwrap();
        for i in 0..table.rows() {
            prop_assert!((table.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_matches_recut_and_bounds_sam(n in 2usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = dataset_from_labels(&random_labels(&mut rng, n, 3)).unwrap();
        let d = random_tree(&mut rng, n);
        let curve = alignment_curve(&d, &ds, &KGrid::full(1, n).unwrap(), &AlignmentMode::Balanced).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in curve.points() {
            let direct = alignment_score(&d.cut(p.k).unwrap(), &ds, &AlignmentMode::Balanced).unwrap();
            prop_assert!((p.a - direct).abs() < 1e-12);
            lo = lo.min(p.a);
            hi = hi.max(p.a);
        }
        prop_assert!(curve.sam() >= lo - 1e-12 && curve.sam() <= hi + 1e-12);
        prop_assert_eq!(curve.sam(), sam_area(curve.points()).unwrap());
    }

    #[test]
    fn pure_partitions_score_one(
        labels in prop::collection::vec(0usize..3, 2..40),
        splits in prop::collection::vec(0usize..4, 40),
    ) {
        let mut distinct = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assume!(distinct.len() >= 2);
        let ds = dataset_from_labels(&labels).unwrap();
        // Refine the label classes arbitrarily; every cluster stays pure.
        let p = Partition::from_assignment(labels.iter().zip(&splits).map(|(&l, &s)| (l, s)));
        prop_assert_eq!(alignment_score(&p, &ds, &AlignmentMode::Balanced).unwrap(), 1.0);
        let target = AlignmentMode::Target(ds.classes()[0].clone());
        prop_assert_eq!(alignment_score(&p, &ds, &target).unwrap(), 1.0);
    }
}
