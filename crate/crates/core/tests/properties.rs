use latentprobe_core::features::{FeatureSource, LabeledFeatureSet, QualityLabel, Sample};
use latentprobe_core::latent::{lerp_latent, tri_grid, tri_latent, LatentCode};
use latentprobe_core::svm::{evaluate, rank_by_margin, train_svm, KernelConfig, SvmConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn blobs(seed: u64, n: usize, dim: usize, separation: f64) -> LabeledFeatureSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let samples = (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { QualityLabel::Good } else { QualityLabel::Bad };
            let mut x: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
            x[0] += label.sign() * separation / 2.0;
            Sample::new(format!("s{i:04}"), x, label)
        })
        .collect();
    LabeledFeatureSet::from_samples(FeatureSource::Latent, samples).unwrap()
}

fn finite_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_law(n in 2usize..=64) {
        prop_assert_eq!(tri_grid(n).unwrap().len(), n * (n + 1) / 2);
    }

    #[test]
    fn degenerate_corners_give_constant_plans(v in finite_vec(7), steps in 2usize..16) {
        let z = LatentCode::new(v).unwrap();
        let plan = tri_latent(&z, &z, &z, steps).unwrap();
        for p in plan.points() {
            for (a, b) in p.latent.as_slice().iter().zip(z.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
        prop_assert!(plan.has_degenerate_corners());
    }

    #[test]
    fn lerp_is_affine_in_gamma(a in finite_vec(5), b in finite_vec(5), steps in 3usize..40) {
        let plan = lerp_latent(&LatentCode::new(a).unwrap(), &LatentCode::new(b).unwrap(), steps).unwrap();
        for w in plan.points().windows(3) {
            for k in 0..5 {
                let d = w[0].latent.as_slice()[k] - 2.0 * w[1].latent.as_slice()[k] + w[2].latent.as_slice()[k];
                // values up to 1e3, so allow relative rounding
                prop_assert!(d.abs() <= 1e-10 * 1e3);
            }
        }
    }

    #[test]
    fn rescaling_a_trained_model_keeps_labels(seed in any::<u64>(), factor in 1e-3f64..1e3) {
        let data = blobs(seed, 40, 3, 1.5);
        let model = train_svm(&data, &SvmConfig::default()).unwrap();
        let scaled = model.rescaled(factor);
        for s in data.samples() {
            prop_assert_eq!(model.predict(&s.features).unwrap().label, scaled.predict(&s.features).unwrap().label);
        }
    }
}

#[test]
fn accuracy_equals_brute_force_recount() {
    for seed in 0..10 {
        let train = blobs(seed, 60, 4, 1.0);
        let test = blobs(seed + 100, 50, 4, 1.0);
        let model = train_svm(&train, &SvmConfig::default()).unwrap();
        let report = evaluate(&model, &test).unwrap();
        let recount = test
            .samples()
            .iter()
            .filter(|s| model.predict(&s.features).unwrap().label == s.label)
            .count();
        assert_eq!(report.accuracy, recount as f64 / test.len() as f64);
        assert_eq!(report.correct(), recount);
    }
}

#[test]
fn ranking_agrees_with_evaluation_report() {
    let train = blobs(3, 80, 3, 2.0);
    let test = blobs(4, 40, 3, 2.0);
    let model = train_svm(&train, &SvmConfig::default()).unwrap();
    let ranking = rank_by_margin(&model, &test).unwrap();
    let mut report = evaluate(&model, &test).unwrap().samples;
    report.sort_by(|a, b| b.distance.total_cmp(&a.distance).then_with(|| a.id.cmp(&b.id)));
    let ranked: Vec<_> = ranking.samples.iter().map(|s| (s.id.clone(), s.distance)).collect();
    let sorted: Vec<_> = report.iter().map(|s| (s.id.clone(), s.distance)).collect();
    assert_eq!(ranked, sorted);

    let mut ids: Vec<_> = ranking.samples.iter().map(|s| s.id.clone()).collect();
    ids.sort();
    let mut input: Vec<_> = test.samples().iter().map(|s| s.id.clone()).collect();
    input.sort();
    assert_eq!(ids, input);
}

#[test]
fn mirror_samples_have_opposite_distances() {
    let train = blobs(9, 60, 2, 3.0);
    let config = SvmConfig { normalize: false, ..Default::default() };
    let model = train_svm(&train, &config).unwrap();
    let w = model.weights().unwrap().to_vec();
    let b = model.bias();
    let norm_sq: f64 = w.iter().map(|v| v * v).sum();
    // point on the boundary, then step along the normal both ways
    let on: Vec<f64> = w.iter().map(|v| -b * v / norm_sq).collect();
    let up: Vec<f64> = on.iter().zip(&w).map(|(o, v)| o + 0.7 * v).collect();
    let down: Vec<f64> = on.iter().zip(&w).map(|(o, v)| o - 0.7 * v).collect();
    let (p, q) = (model.predict(&up).unwrap(), model.predict(&down).unwrap());
    assert!((p.distance + q.distance).abs() < 1e-9);
    assert!(p.distance > 0.0);
}

#[test]
fn training_order_does_not_change_the_decision_function() {
    let data = blobs(21, 120, 5, 1.0);
    let mut shuffled = data.samples().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in (1..shuffled.len()).rev() {
        shuffled.swap(i, rng.gen_range(0..=i));
    }
    let permuted = LabeledFeatureSet::from_samples(FeatureSource::Latent, shuffled).unwrap();
    for kernel in [KernelConfig::Linear, KernelConfig::Rbf { gamma: None }] {
        let config = SvmConfig { kernel, ..Default::default() };
        let a = train_svm(&data, &config).unwrap();
        let b = train_svm(&permuted, &config).unwrap();
        let probe = blobs(22, 200, 5, 1.0);
        let worst = probe
            .samples()
            .iter()
            .map(|s| (a.decision_value(&s.features).unwrap() - b.decision_value(&s.features).unwrap()).abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-5, "{kernel:?}: decision values differ by {worst:e}");
    }
}

#[test]
fn separable_sets_are_fit_with_margin() {
    for seed in 0..5 {
        let data = blobs(seed, 100, 3, 12.0);
        let config = SvmConfig { normalize: false, c: 1e3, ..Default::default() };
        let model = train_svm(&data, &config).unwrap();
        assert_eq!(evaluate(&model, &data).unwrap().accuracy, 1.0);
        // hard-margin regime: every functional margin is at least 1 - tol
        let min_margin = data
            .samples()
            .iter()
            .map(|s| s.label.sign() * model.decision_value(&s.features).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min_margin >= 1.0 - 1e-5, "seed {seed}: min functional margin {min_margin}");
    }
}

#[test]
fn training_is_deterministic() {
    let data = blobs(5, 90, 6, 0.5);
    let config = SvmConfig { kernel: KernelConfig::Rbf { gamma: Some(0.3) }, seed: 12, ..Default::default() };
    let a = train_svm(&data, &config).unwrap();
    let b = train_svm(&data, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.train_meta().seed, 12);
}
