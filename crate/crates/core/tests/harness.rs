use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use samkit::harness::{
    cv_folds, learning_curve, learning_curve_with_split, mean, train_maxent, ExperimentConfig,
    LearningCurve, LearningPoint, MaxEntObjective, Metric, TrainTestSplit,
};
use samkit::synthetic::dataset_from_labels;
use samkit::{EmbeddingMatrix, LabeledDataset};
use samkit_oracles::central_gradient;

/// Two classes; the first coordinate carries `signal` standard deviations of
/// class separation, the remaining `dim - 1` are noise.
fn problem(n: usize, dim: usize, signal: f64, seed: u64) -> (LabeledDataset, EmbeddingMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let y = rng.random_bool(0.5);
        let row: Vec<f64> = (0..dim)
            .map(|j| {
                let z: f64 = StandardNormal.sample(&mut rng);
                if j == 0 && y {
                    z + signal
                } else {
                    z
                }
            })
            .collect();
        labels.push(if y { "pos" } else { "neg" });
        rows.push(row);
    }
    (dataset_from_labels(&labels).unwrap(), EmbeddingMatrix::from_f64_rows(&rows).unwrap())
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..20 {
        let classes = rng.random_range(2..5);
        let (n, d) = (rng.random_range(5..60), rng.random_range(1..10));
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let x = EmbeddingMatrix::from_f64_rows(&rows).unwrap();
        let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..classes)).collect();
        let obj = MaxEntObjective::new(&x, &y, classes, 10f64.powi(rng.random_range(-3..2)));
        let theta: Vec<f64> = (0..obj.num_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (_, analytic) = obj.value_and_gradient(&theta);
        let numeric = central_gradient(|t| obj.value(t), &theta, 1e-5);
        let worst = analytic
            .iter()
            .zip(&numeric)
            .map(|(&a, &b)| relative_error(a, b))
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "trial {trial}: {worst}");
    }
}

#[test]
fn training_never_ends_above_the_zero_start() {
    for seed in 0..10 {
        let (ds, x) = problem(80, 4, 1.0, seed);
        let obj = MaxEntObjective::new(&x, ds.label_codes(), 2, 0.1);
        let zero = obj.value(&vec![0.0; obj.num_params()]);
        let model = train_maxent(&x, ds.label_codes(), ds.classes(), 0.1).unwrap();
        assert!(model.loss <= zero);
        assert!(model.converged);
    }
}

#[test]
fn separable_and_regularized_limits() {
    let x = EmbeddingMatrix::from_rows(&[[-1.0f32], [-1.0], [1.0], [1.0]]).unwrap();
    let classes = vec!["neg".to_string(), "pos".to_string()];
    let y = [0, 0, 1, 1];
    let model = train_maxent(&x, &y, &classes, 1e-4).unwrap();
    let predicted: Vec<usize> = x.iter_rows().map(|r| model.predict(r)).collect();
    assert_eq!(predicted, y);

    let unbalanced = EmbeddingMatrix::from_rows(&[[-1.0f32], [0.5], [1.0], [2.0]]).unwrap();
    let strong = train_maxent(&unbalanced, &[0, 1, 1, 1], &classes, 1e6).unwrap();
    assert!(strong.weight_norm() < 1e-2);
    let p = strong.predict_proba(unbalanced.row(0));
    assert!((p[1] - 0.75).abs() < 1e-3);
}

#[test]
fn folds_partition_the_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for n in [10, 37, 100] {
        let folds = cv_folds(n, 5, &mut rng);
        let mut seen = HashSet::new();
        for f in &folds {
            let train: HashSet<_> = f.train.iter().collect();
            assert!(f.valid.iter().all(|v| !train.contains(v)));
            assert_eq!(f.train.len() + f.valid.len(), n);
            seen.extend(f.valid.iter().copied());
        }
        assert_eq!(seen.len(), n);
    }
    let split = TrainTestSplit::holdout(500, 0.2, 3).unwrap();
    let test: HashSet<_> = split.test.iter().collect();
    assert!(split.pool.iter().all(|i| !test.contains(i)));
    assert_eq!(split.pool.len() + split.test.len(), 500);
}

#[test]
fn constant_points_average_to_the_constant() {
    let points = (1..=10)
        .map(|i| LearningPoint {
            budget: i * 100,
            mean: 0.8,
            std: 0.0,
        })
        .collect();
    let curve = LearningCurve::new(Metric::Accuracy, points).unwrap();
    assert!((curve.alc - 0.8).abs() < 1e-15);
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        budgets: vec![20, 40, 80, 160],
        l2_grid: vec![1e-2, 1.0, 100.0],
        ..ExperimentConfig::default()
    }
}

#[test]
fn separable_data_learns_monotonically() {
    let (ds, x) = problem(600, 3, 12.0, 4);
    let run = learning_curve(&small_config(), &ds, &x).unwrap();
    let means: Vec<f64> = run.curve.points.iter().map(|p| p.mean).collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
    assert!(run.curve.alc >= means[0]);
    assert_eq!(run.curve.alc, mean(&means));
    assert_eq!(run.cells.len(), 4 * 5);
}

#[test]
fn informative_beats_noise_for_every_seed() {
    let (ds, informative) = problem(700, 4, 2.5, 8);
    let (_, noise) = problem(700, 4, 0.0, 9);
    let split = TrainTestSplit::holdout(700, 0.2, 0).unwrap();
    let config = small_config();
    let a = learning_curve_with_split(&config, &ds, &informative, &split).unwrap();
    let b = learning_curve_with_split(&config, &ds, &noise, &split).unwrap();
    for &seed in &config.seeds {
        let per_seed = |cells: &[samkit::harness::CellRecord]| -> f64 {
            mean(&cells.iter().filter(|c| c.seed == seed).map(|c| c.test_score).collect::<Vec<_>>())
        };
        assert!(per_seed(&a.cells) > per_seed(&b.cells), "seed {seed}");
    }
    assert!(a.curve.alc > b.curve.alc);
}

#[test]
fn reruns_are_bit_identical_regardless_of_threads() {
    let (ds, x) = problem(400, 5, 1.0, 2);
    let mut config = small_config();
    config.metric = Metric::F1Target;
    config.target = Some("pos".into());
    let a = learning_curve(&config, &ds, &x).unwrap();
    config.threads = Some(1);
    let b = learning_curve(&config, &ds, &x).unwrap();
    assert_eq!(a, b);
    for (p, q) in a.curve.points.iter().zip(&b.curve.points) {
        assert_eq!(p.mean.to_bits(), q.mean.to_bits());
    }
}

#[test]
fn oversized_budget_names_itself() {
    let (ds, x) = problem(100, 2, 1.0, 0);
    let err = learning_curve(&ExperimentConfig::default(), &ds, &x).unwrap_err();
    assert!(err.to_string().contains("budget 100"), "{err}");
}
