use super::*;
use crate::data::LabeledDataset;
use crate::rng::SimRng;
use proptest::prelude::*;

fn ds(rows: &[&[f64]], labels: &[usize]) -> LabeledDataset<f64> {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    LabeledDataset::from_rows(&rows, labels.to_vec()).unwrap()
}

fn gaussian_classes(n_per: usize, d: usize, shift: f64, seed: u64) -> LabeledDataset<f64> {
    let mut rng = SimRng::new(seed);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for class in 0..2 {
        let mu = if class == 0 { shift } else { -shift };
        for _ in 0..n_per {
            for _ in 0..d {
                values.push(rng.normal(mu, 1.0));
            }
            labels.push(class);
        }
    }
    LabeledDataset::new(values, d, labels).unwrap()
}

#[test]
fn knn_single_point_predicts_its_label() {
    let base = ds(&[&[0.5], &[3.0]], &[1, 0]);
    let one = base.select_rows(&[0]);
    let model = fit(&ClassifierSpec::Knn { neighbors: 1 }, &one).unwrap();
    for x in [-100.0, 0.0, 0.5, 42.0] {
        assert_eq!(model.predict(&[x]).unwrap(), 1);
    }
}

#[test]
fn knn_three_neighbours() {
    let train = ds(&[&[0.0], &[1.0], &[10.0]], &[0, 0, 1]);
    let model = fit(&ClassifierSpec::Knn { neighbors: 3 }, &train).unwrap();
    assert_eq!(model.predict(&[0.2]).unwrap(), 0);
}

#[test]
fn knn_vote_tie_goes_to_smaller_class() {
    let train = ds(&[&[0.0], &[1.0], &[2.0], &[3.0]], &[1, 1, 0, 0]);
    let model = fit(&ClassifierSpec::Knn { neighbors: 4 }, &train).unwrap();
    assert_eq!(model.predict(&[1.5]).unwrap(), 0);
}

#[test]
fn knn_distance_ties_widen_neighbourhood() {
    // k = 1 but two points sit at the same distance: both vote, 1-1 tie → 0.
    let train = ds(&[&[-1.0], &[1.0], &[5.0]], &[1, 0, 1]);
    let model = fit(&ClassifierSpec::Knn { neighbors: 1 }, &train).unwrap();
    assert_eq!(model.predict(&[0.0]).unwrap(), 0);
}

#[test]
fn knn_neighbours_beyond_n_uses_all() {
    let train = ds(&[&[0.0], &[1.0], &[2.0]], &[1, 1, 0]);
    let model = fit(&ClassifierSpec::Knn { neighbors: 15 }, &train).unwrap();
    let ModelKind::Knn(k) = model.kind() else { panic!() };
    assert_eq!(k.k(), 3);
    assert_eq!(model.predict(&[100.0]).unwrap(), 1);
}

#[test]
fn predict_dimension_mismatch() {
    let train = ds(&[&[0.0, 1.0], &[1.0, 0.0]], &[0, 1]);
    let model = fit(&ClassifierSpec::knn(), &train).unwrap();
    assert_eq!(
        model.predict(&[1.0]).unwrap_err(),
        Error::DimensionMismatch { expected: 2, found: 1 }
    );
}

#[test]
fn lda_equal_means_prefers_larger_prior() {
    // Symmetric classes around 0 with equal means.
    let train = ds(
        &[&[-1.0], &[1.0], &[-1.0], &[1.0], &[-2.0], &[2.0]],
        &[0, 0, 1, 1, 1, 1],
    );
    let model = fit(&ClassifierSpec::Lda { ridge: 0.0 }, &train).unwrap();
    assert_eq!(model.predict(&[0.3]).unwrap(), 1);

    let balanced = ds(&[&[-1.0], &[1.0], &[-1.0], &[1.0]], &[0, 0, 1, 1]);
    let model = fit(&ClassifierSpec::Lda { ridge: 0.0 }, &balanced).unwrap();
    assert_eq!(model.predict(&[0.7]).unwrap(), 0);
}

#[test]
fn qda_rejects_singleton_class() {
    let train = ds(&[&[0.0], &[1.0], &[2.0]], &[0, 0, 1]);
    assert!(matches!(
        fit(&ClassifierSpec::qda(), &train).unwrap_err(),
        Error::Precondition(_)
    ));
}

#[test]
fn discriminant_constant_feature_is_degenerate() {
    let train = ds(&[&[1.0], &[1.0], &[1.0], &[1.0]], &[0, 0, 1, 1]);
    assert!(matches!(
        fit(&ClassifierSpec::lda(), &train).unwrap_err(),
        Error::DegenerateCovariance { class: None }
    ));
    assert!(matches!(
        fit(&ClassifierSpec::qda(), &train).unwrap_err(),
        Error::DegenerateCovariance { class: Some(0) }
    ));
}

#[test]
fn lda_matches_population_rule() {
    // Classes N(±μ, I): the population LDA rule is sign(μᵀx).
    let mu = [0.8, -0.5, 0.3];
    let mut rng = SimRng::new(77);
    let n = 100_000;
    let mut values = Vec::with_capacity(n * 3);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let s = if class == 0 { 1.0 } else { -1.0 };
        for m in mu {
            values.push(rng.normal(s * m, 1.0));
        }
        labels.push(class);
    }
    let train = LabeledDataset::new(values, 3, labels).unwrap();
    let model = fit(&ClassifierSpec::Lda { ridge: 0.0 }, &train).unwrap();
    let mut agree = 0;
    let probes = 20_000;
    for _ in 0..probes {
        let x: Vec<f64> = (0..3).map(|_| rng.normal(0.0, 1.5)).collect();
        let rule = if mu.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() > 0.0 { 0 } else { 1 };
        if model.predict(&x).unwrap() == rule {
            agree += 1;
        }
    }
    assert!(agree as f64 / probes as f64 >= 0.99, "agreement {agree}/{probes}");
    assert_eq!(model.predict(&mu).unwrap(), 0);
}

#[test]
fn svm_separable_one_dimensional() {
    let xs = [-3.0, -2.0, -1.5, -1.0, 1.0, 1.2, 2.0, 3.5];
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let labels = xs.iter().map(|&x| usize::from(x > 0.0)).collect();
    let train = LabeledDataset::from_rows(&rows, labels).unwrap();
    let spec = ClassifierSpec::SvmRbf {
        cost: 1e6,
        gamma: Gamma::Auto,
        tol: 1e-3,
        max_passes: None,
    };
    let model = fit(&spec, &train).unwrap();
    assert_eq!(misclassification_rate(&model, &train).unwrap().misclassified(), 0);
}

#[test]
fn svm_multiclass_one_vs_rest() {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut rng = SimRng::new(5);
    for (c, center) in [(0usize, [0.0, 0.0]), (1, [4.0, 0.0]), (2, [0.0, 4.0])] {
        for _ in 0..20 {
            rows.push(vec![rng.normal(center[0], 0.3), rng.normal(center[1], 0.3)]);
            labels.push(c);
        }
    }
    let train = LabeledDataset::from_rows(&rows, labels).unwrap();
    let model = fit(&ClassifierSpec::svm(), &train).unwrap();
    assert_eq!(model.predict(&[4.1, 0.1]).unwrap(), 1);
    assert_eq!(model.predict(&[0.1, 3.9]).unwrap(), 2);
    assert_eq!(model.predict(&[0.0, 0.0]).unwrap(), 0);
}

#[test]
fn logistic_stationarity_at_solution() {
    let train = gaussian_classes(60, 4, 0.5, 21);
    for lambda in [0.2, 0.05, 0.01, 0.001] {
        let model = fit(&ClassifierSpec::logistic_fixed(lambda), &train).unwrap();
        assert!(model.converged());
        let grads = logistic_gradients(&model, &train).unwrap();
        let ModelKind::Logistic { ensemble, .. } = model.kind() else { panic!() };
        let w = ensemble.machines()[0].weights();
        let (g0, gw) = &grads[0];
        assert!(g0.abs() <= 1e-7);
        for (g, &wj) in gw.iter().zip(w) {
            assert!(g.abs() <= lambda + 1e-7, "|g| {g} > λ {lambda}");
            if wj != 0.0 {
                assert!((g + lambda * wj.signum()).abs() <= 1e-7);
            }
        }
    }
}

#[test]
fn logistic_above_lambda_max_is_empty() {
    let train = gaussian_classes(40, 3, 0.7, 4);
    let top = lambda_max(&train);
    let model = fit(&ClassifierSpec::logistic_fixed(top * 1.0001), &train).unwrap();
    let ModelKind::Logistic { ensemble, .. } = model.kind() else { panic!() };
    assert_eq!(ensemble.machines()[0].nonzero(), 0);
    let model = fit(&ClassifierSpec::logistic_fixed(top * 0.9), &train).unwrap();
    let ModelKind::Logistic { ensemble, .. } = model.kind() else { panic!() };
    assert!(ensemble.machines()[0].nonzero() > 0);
}

#[test]
fn logistic_sparsity_monotone_along_grid() {
    let train = gaussian_classes(80, 8, 0.4, 8);
    let grid = default_lambda_grid(&train);
    let mut previous = 0;
    for &lambda in &grid {
        let model = fit(&ClassifierSpec::logistic_fixed(lambda), &train).unwrap();
        let ModelKind::Logistic { ensemble, .. } = model.kind() else { panic!() };
        let nz = ensemble.machines()[0].nonzero();
        assert!(nz >= previous, "nonzeros fell from {previous} to {nz} at λ={lambda}");
        previous = nz;
    }
    assert_eq!(previous, 8);
}

#[test]
fn cv_lambda_single_value_and_validation() {
    let train = gaussian_classes(20, 2, 1.0, 1);
    assert_eq!(cv_select_lambda(&train, &[0.3], 5, 0).unwrap(), 0.3);
    assert!(cv_select_lambda(&train, &[], 5, 0).is_err());
    assert!(cv_select_lambda(&train, &[0.1, 0.3], 5, 0).is_err());
}

#[test]
fn cv_lambda_ties_prefer_larger() {
    // Perfectly separated data: every penalty below λ_max gets zero CV errors.
    let train = gaussian_classes(25, 1, 5.0, 2);
    let top = lambda_max(&train);
    let grid = [top * 0.5, top * 0.25, top * 0.1];
    assert_eq!(cv_select_lambda(&train, &grid, 5, 3).unwrap(), grid[0]);
}

#[test]
fn cv_lambda_prefers_heavy_penalty_on_noise() {
    let mut heavy = 0;
    let mut runs = 0;
    for seed in 0..100u64 {
        let mut rng = SimRng::new(1000 + seed);
        let n = 40;
        let p = 10;
        let values: Vec<f64> = (0..n * p).map(|_| rng.standard_normal()).collect();
        // Labels independent of the features, drawn i.i.d. fair coins.
        let mut labels: Vec<usize> = (0..n).map(|_| rng.below(2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        if labels.iter().filter(|&&y| y == 0).count() < 5 || labels.iter().filter(|&&y| y == 1).count() < 5 {
            continue;
        }
        let train = LabeledDataset::new(values, p, labels).unwrap();
        runs += 1;
        if cv_select_lambda(&train, &[10.0, 0.001], 5, seed).unwrap() == 10.0 {
            heavy += 1;
        }
    }
    assert!(heavy * 10 >= runs * 7, "heavy penalty chosen on {heavy}/{runs} seeds");
}

#[test]
fn logistic_cv_needs_enough_samples_per_class() {
    let train = ds(&[&[0.0], &[1.0], &[2.0], &[3.0]], &[0, 0, 1, 1]);
    assert!(matches!(
        fit(&ClassifierSpec::logistic(), &train).unwrap_err(),
        Error::Precondition(_)
    ));
}

#[test]
fn misclassification_examples() {
    let train = ds(&[&[0.0], &[10.0]], &[0, 1]);
    let model = fit(&ClassifierSpec::Knn { neighbors: 1 }, &train).unwrap();
    let all_right = ds(&[&[0.1], &[9.0], &[-1.0], &[12.0]], &[0, 1, 0, 1]);
    let all_wrong = ds(&[&[0.1], &[9.0], &[-1.0], &[12.0]], &[1, 0, 1, 0]);
    let one_wrong = ds(&[&[0.1], &[9.0], &[-1.0], &[12.0]], &[0, 1, 0, 0]);
    assert_eq!(misclassification_rate(&model, &all_right).unwrap().rate(), 0.0);
    assert_eq!(misclassification_rate(&model, &all_wrong).unwrap().rate(), 1.0);
    assert_eq!(misclassification_rate(&model, &one_wrong).unwrap().rate(), 0.25);
}

#[test]
fn f32_models_agree_with_f64_on_easy_data() {
    let train = gaussian_classes(50, 3, 1.5, 12);
    let train32 = train.cast::<f32>();
    for spec in [ClassifierSpec::knn(), ClassifierSpec::lda(), ClassifierSpec::qda(), ClassifierSpec::svm()] {
        let a = fit(&spec, &train).unwrap().predict_all(&train).unwrap();
        let b = fit(&spec, &train32).unwrap().predict_all(&train32).unwrap();
        let agree = a.iter().zip(&b).filter(|(x, y)| x == y).count();
        assert!(agree >= 98, "{}: {agree}/100", spec.name());
    }
}

/// Direct dense evaluation of `ln π + ln N(x; μ, Σ)` with Gauss-Jordan
/// inversion and an LU determinant.
fn dense_log_density(x: &[f64], mean: &[f64], cov: &[f64], log_prior: f64) -> f64 {
    let d = mean.len();
    let mut a = cov.to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    let mut log_det = 0.0;
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&r, &s| a[r * d + col].abs().partial_cmp(&a[s * d + col].abs()).unwrap())
            .unwrap();
        if piv != col {
            for k in 0..d {
                a.swap(piv * d + k, col * d + k);
                inv.swap(piv * d + k, col * d + k);
            }
        }
        let p = a[col * d + col];
        log_det += p.abs().ln();
        for k in 0..d {
            a[col * d + k] /= p;
            inv[col * d + k] /= p;
        }
        for r in 0..d {
            if r != col {
                let f = a[r * d + col];
                for k in 0..d {
                    a[r * d + k] -= f * a[col * d + k];
                    inv[r * d + k] -= f * inv[col * d + k];
                }
            }
        }
    }
    let diff: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    let mut maha = 0.0;
    for i in 0..d {
        for j in 0..d {
            maha += diff[i] * inv[i * d + j] * diff[j];
        }
    }
    log_prior - 0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + maha)
}

fn moments(rows: &[&[f64]], ridge: f64, pooled_with: Option<usize>) -> (Vec<f64>, Vec<f64>) {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut cov = vec![0.0; d * d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    let dof = pooled_with.unwrap_or(rows.len() - 1) as f64;
    cov.iter_mut().for_each(|v| *v /= dof);
    let _ = ridge;
    (mean, cov)
}

fn random_spd_data(seed: u64, d: usize, n_per: usize) -> LabeledDataset<f64> {
    // Correlated Gaussian classes via random mixing matrices.
    let mut rng = SimRng::new(seed);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for class in 0..2 {
        let mix: Vec<f64> = (0..d * d).map(|_| rng.normal(0.0, 1.0)).collect();
        let shift: Vec<f64> = (0..d).map(|_| rng.normal(0.0, 2.0)).collect();
        for _ in 0..n_per {
            let z: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
            for i in 0..d {
                values.push(shift[i] + (0..d).map(|k| mix[i * d + k] * z[k]).sum::<f64>());
            }
            labels.push(class);
        }
    }
    LabeledDataset::new(values, d, labels).unwrap()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub(crate) fn check_discriminants_against_dense(seed: u64) -> f64 {
    let mut rng = SimRng::new(seed ^ 0xabc);
    let d = 1 + rng.below(5);
    let n_per = d + 3 + rng.below(30);
    let train = random_spd_data(seed, d, n_per);
    let ridge = 0.0;
    let mut worst = 0.0f64;
    for shared in [true, false] {
        let model = DiscriminantModel::fit(&train, ridge, shared).unwrap();
        let members: Vec<Vec<&[f64]>> = (0..2)
            .map(|c| train.rows().zip(train.labels()).filter(|(_, &y)| y == c).map(|(r, _)| r).collect())
            .collect();
        let n = train.n_samples();
        let params: Vec<(Vec<f64>, Vec<f64>)> = if shared {
            let per: Vec<_> = members.iter().map(|m| moments(m, ridge, Some(n - 2))).collect();
            let pooled: Vec<f64> = (0..d * d).map(|k| per[0].1[k] + per[1].1[k]).collect();
            per.iter().map(|(m, _)| (m.clone(), pooled.clone())).collect()
        } else {
            members.iter().map(|m| moments(m, ridge, None)).collect()
        };
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.normal(0.0, 3.0)).collect();
            let got = model.log_discriminants(&x);
            for c in 0..2 {
                let prior = (members[c].len() as f64 / n as f64).ln();
                let want = dense_log_density(&x, &params[c].0, &params[c].1, prior);
                worst = worst.max(relative_gap(got[c], want));
            }
        }
    }
    worst
}

#[test]
fn discriminants_match_dense_gaussian() {
    for seed in 0..50 {
        let gap = check_discriminants_against_dense(seed);
        assert!(gap <= 1e-9, "seed {seed}: relative gap {gap}");
    }
}

/// Brute-force KNN: full sort by distance, radius at the k-th, vote.
pub(crate) fn knn_oracle(train: &LabeledDataset<f64>, k: usize, x: &[f64]) -> usize {
    let mut d: Vec<(f64, usize)> = train
        .rows()
        .zip(train.labels())
        .map(|(r, &y)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), y))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let k = k.min(d.len());
    let radius = d[k - 1].0;
    let mut votes = vec![0; train.n_classes()];
    for (dist, y) in d {
        if dist <= radius {
            votes[y] += 1;
        }
    }
    let max = *votes.iter().max().unwrap();
    votes.iter().position(|&v| v == max).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn knn_matches_brute_force(
        seed in any::<u64>(),
        n in 4usize..200,
        d in 1usize..6,
        k in 1usize..20,
        classes in 2usize..4,
    ) {
        let mut rng = SimRng::new(seed);
        // Integer grid coordinates make distance ties common.
        let values: Vec<f64> = (0..n * d).map(|_| rng.below(5) as f64).collect();
        let labels: Vec<usize> = (0..n).map(|i| if i < classes { i } else { rng.below(classes) }).collect();
        let train = LabeledDataset::new(values, d, labels).unwrap();
        let model = fit(&ClassifierSpec::Knn { neighbors: k }, &train).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = (0..d).map(|_| rng.below(5) as f64).collect();
            prop_assert_eq!(model.predict(&x).unwrap(), knn_oracle(&train, k, &x));
        }
    }

    #[test]
    fn predictions_ignore_training_order(seed in any::<u64>()) {
        let train = gaussian_classes(30, 3, 0.6, seed);
        let mut order: Vec<usize> = (0..train.n_samples()).collect();
        SimRng::new(seed ^ 1).shuffle(&mut order);
        let shuffled = train.select_rows(&order);
        let probes = gaussian_classes(10, 3, 0.6, seed ^ 2);
        for spec in [
            ClassifierSpec::Knn { neighbors: 5 },
            ClassifierSpec::lda(),
            ClassifierSpec::qda(),
            ClassifierSpec::logistic_fixed(0.01),
        ] {
            let a = fit(&spec, &train).unwrap().predict_all(&probes).unwrap();
            let b = fit(&spec, &shuffled).unwrap().predict_all(&probes).unwrap();
            prop_assert_eq!(a, b, "{}", spec.name());
        }
    }
}
