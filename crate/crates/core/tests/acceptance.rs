//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any criterion fails or exceeds its time budget.

use std::time::{Duration, Instant};

use latentprobe_core::features::{FeatureSource, FeatureTable, LabeledFeatureSet, QualityLabel, Sample};
use latentprobe_core::io::fvec::{decode_fvec, encode_fvec};
use latentprobe_core::io::manifest::parse_manifest;
use latentprobe_core::io::plan::{plan_from_json, plan_to_json};
use latentprobe_core::latent::{
    lerp_latent, lerp_linguistic, tri_grid, tri_latent, tri_linguistic, ConditioningPair,
    InterpolationPlan, LatentCode,
};
use latentprobe_core::pca::fit_pca_table;
use latentprobe_core::rings::{rings_oracle, RingsConfig};
use latentprobe_core::svm::{evaluate, train_svm, SvmConfig};
use latentprobe_core::toy::{max_consecutive_delta, ToyGenParams, ToyGenerator};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde_json::json;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn code(rng: &mut ChaCha8Rng, n: usize) -> LatentCode {
    LatentCode::new(gaussian_vec(rng, n)).unwrap()
}

fn conditioning(rng: &mut ChaCha8Rng, m: usize, dw: usize, ds: usize) -> ConditioningPair {
    ConditioningPair::new((0..m).map(|_| gaussian_vec(rng, dw)).collect(), gaussian_vec(rng, ds))
        .unwrap()
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

// ---------------------------------------------------------------------------

fn grid_count_law() -> Outcome {
    let n10 = tri_grid(10).map_err(|e| e.to_string())?.len();
    ensure(n10 == 55, || format!("tri_grid(10) has {n10} points"))?;
    for n in 2..=64usize {
        let got = tri_grid(n).unwrap().len();
        // brute force: all (i, j) in the square with i + j <= n - 1
        let brute = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i + j < n).count();
        ensure(got == n * (n + 1) / 2 && got == brute, || {
            format!("steps={n}: {got} points, brute force {brute}")
        })?;
    }
    Ok("tri_grid(10) = 55; n(n+1)/2 holds for n in 2..=64".into())
}

fn endpoint_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..200 {
        let dim = rng.gen_range(1..=64);
        let steps = rng.gen_range(2..=20);
        let mut corners: Vec<LatentCode> = (0..3).map(|_| code(&mut rng, dim)).collect();
        if trial % 10 == 0 {
            // signed zeros must survive too
            corners[0] = LatentCode::new(vec![-0.0; dim]).unwrap();
        }
        let pair = lerp_latent(&corners[0], &corners[1], steps).unwrap();
        let first = &pair.points()[0].latent;
        let last = &pair.points()[steps - 1].latent;
        ensure(bits(first.as_slice()) == bits(corners[0].as_slice()), || format!("trial {trial}: z0 not reproduced"))?;
        ensure(bits(last.as_slice()) == bits(corners[1].as_slice()), || format!("trial {trial}: z1 not reproduced"))?;

        let tri = tri_latent(&corners[0], &corners[1], &corners[2], steps).unwrap();
        for (k, (g1, g2)) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)].into_iter().enumerate() {
            let p = tri
                .points()
                .iter()
                .find(|p| p.mix.gamma1 == g1 && p.mix.gamma2 == g2)
                .ok_or("corner missing from grid")?;
            ensure(bits(p.latent.as_slice()) == bits(corners[k].as_slice()), || {
                format!("trial {trial}: tri corner {k} not reproduced")
            })?;
        }

        let (m, dw, ds) = (rng.gen_range(1..4), rng.gen_range(1..6), rng.gen_range(1..6));
        let cs: Vec<_> = (0..3).map(|_| conditioning(&mut rng, m, dw, ds)).collect();
        let lin = lerp_linguistic(&corners[0], &cs[0], &cs[1], steps).unwrap();
        ensure(lin.points()[0].conditioning.as_ref() == Some(&cs[0]), || "linguistic start".into())?;
        ensure(lin.points()[steps - 1].conditioning.as_ref() == Some(&cs[1]), || "linguistic end".into())?;
        let tl = tri_linguistic(&corners[0], &cs[0], &cs[1], &cs[2], steps).unwrap();
        let last_pt = tl.points().last().unwrap();
        ensure(last_pt.conditioning.as_ref() == Some(&cs[2]), || "tri-linguistic apex".into())?;
    }
    Ok("200 random plans reproduce all corners bit-exactly".into())
}

fn row_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let dim = rng.gen_range(1..=100);
        let steps = rng.gen_range(2..=30);
        let (z0, z1, z2) = (code(&mut rng, dim), code(&mut rng, dim), code(&mut rng, dim));
        let tri = tri_latent(&z0, &z1, &z2, steps).unwrap();
        let pair = lerp_latent(&z0, &z1, steps).unwrap();
        for (t, p) in tri.points()[..steps].iter().zip(pair.points()) {
            ensure(t.mix.gamma2 == 0.0 && t.mix.gamma1 == p.mix.gamma1, || "row order".into())?;
            for (a, b) in t.latent.as_slice().iter().zip(p.latent.as_slice()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("gamma2 = 0 row equals lerp plan, max deviation {worst:e} <= 1e-12"))
}

fn second_difference_max(plan: &InterpolationPlan) -> f64 {
    let pts = plan.points();
    let mut worst: f64 = 0.0;
    for w in pts.windows(3) {
        for k in 0..plan.dim() {
            let d = w[0].latent.as_slice()[k] - 2.0 * w[1].latent.as_slice()[k] + w[2].latent.as_slice()[k];
            worst = worst.max(d.abs());
        }
    }
    worst
}

fn affinity_and_barycentric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut worst_second, mut worst_sum, mut worst_blend): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for trial in 0..1000 {
        let dim = rng.gen_range(1..=32);
        let steps = rng.gen_range(2..=24);
        let z: Vec<LatentCode> = (0..3).map(|_| code(&mut rng, dim)).collect();
        if trial % 2 == 0 {
            let plan = lerp_latent(&z[0], &z[1], steps).unwrap();
            worst_second = worst_second.max(second_difference_max(&plan));
        } else {
            let plan = tri_latent(&z[0], &z[1], &z[2], steps).unwrap();
            for p in plan.points() {
                let w = p.mix.weights();
                ensure(w.iter().all(|x| (0.0..=1.0).contains(x)), || format!("weights {w:?} outside [0,1]"))?;
                worst_sum = worst_sum.max((w.iter().sum::<f64>() - 1.0).abs());
                // independent evaluation of (1 - g1 - g2) z0 + g1 z1 + g2 z2
                let (g1, g2) = (p.mix.gamma1, p.mix.gamma2);
                for k in 0..dim {
                    let want = (1.0 - g1 - g2) * z[0].as_slice()[k] + g1 * z[1].as_slice()[k] + g2 * z[2].as_slice()[k];
                    let got = p.latent.as_slice()[k];
                    worst_blend = worst_blend.max((got - want).abs() / want.abs().max(1.0));
                }
            }
            // every row (fixed gamma2) is affine in gamma1
            let mut offset = 0;
            for i in 0..steps {
                let len = steps - i;
                let row = &plan.points()[offset..offset + len];
                for w in row.windows(3) {
                    for k in 0..dim {
                        let d = w[0].latent.as_slice()[k] - 2.0 * w[1].latent.as_slice()[k] + w[2].latent.as_slice()[k];
                        worst_second = worst_second.max(d.abs());
                    }
                }
                offset += len;
            }
        }
    }
    ensure(worst_second <= 1e-10, || format!("second difference {worst_second:e}"))?;
    ensure(worst_sum <= 1e-12, || format!("weight sum error {worst_sum:e}"))?;
    ensure(worst_blend <= 1e-12, || format!("blend error {worst_blend:e}"))?;
    Ok(format!(
        "1000 plans: second diff {worst_second:.1e} <= 1e-10, weight-sum err {worst_sum:.1e} <= 1e-12, blend err {worst_blend:.1e}"
    ))
}

/// Spectral norm by power iteration on PᵀP.
fn spectral_norm(p: &[f64], cols: usize) -> f64 {
    let rows = p.len() / cols;
    let mut v = vec![1.0 / (cols as f64).sqrt(); cols];
    let mut sigma = 0.0;
    for _ in 0..500 {
        let pv: Vec<f64> = (0..rows).map(|r| (0..cols).map(|c| p[r * cols + c] * v[c]).sum()).collect();
        let mut ptpv = vec![0.0; cols];
        for r in 0..rows {
            for c in 0..cols {
                ptpv[c] += p[r * cols + c] * pv[r];
            }
        }
        let norm = ptpv.iter().map(|x| x * x).sum::<f64>().sqrt();
        sigma = norm.sqrt();
        v = ptpv.iter().map(|x| x / norm).collect();
    }
    sigma
}

fn toy_smoothness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let dim = 100;
    let (z0, z1) = (code(&mut rng, dim), code(&mut rng, dim));
    let dist = z0.as_slice().iter().zip(z1.as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let params = ToyGenParams { seed: 2024, height: 16, width: 16, scale: 1.0 };
    let gen = ToyGenerator::new(params, dim).unwrap();
    // analytic bound from the operator norm of P: sigmoid' <= 1/4
    let spectral = spectral_norm(gen.projection(), dim);
    let mut deltas = Vec::new();
    for steps in [10usize, 20] {
        let plan = lerp_latent(&z0, &z1, steps).unwrap();
        let frames: Vec<_> = plan.points().iter().map(|p| gen.render(p).unwrap()).collect();
        let delta = max_consecutive_delta(&frames);
        let step_len = dist / (steps - 1) as f64;
        let analytic = 0.25 * params.scale * spectral * step_len;
        let row_bound = gen.lipschitz_bound() * step_len;
        ensure(delta <= analytic, || format!("steps={steps}: delta {delta} > spectral bound {analytic}"))?;
        ensure(delta <= row_bound, || format!("steps={steps}: delta {delta} > row bound {row_bound}"))?;
        deltas.push(delta);
    }
    let ratio = deltas[1] / deltas[0];
    ensure(ratio <= 0.55, || format!("steps=20 delta is {:.1}% of steps=10", ratio * 100.0))?;
    Ok(format!(
        "max delta {:.5} (10 steps) vs {:.5} (20 steps), ratio {:.3} <= 0.55; within Lipschitz bound",
        deltas[0], deltas[1], ratio
    ))
}

fn labeled(points: Vec<(String, Vec<f64>, QualityLabel)>) -> LabeledFeatureSet {
    LabeledFeatureSet::from_samples(
        FeatureSource::Other("synthetic".into()),
        points.into_iter().map(|(id, x, l)| Sample::new(id, x, l)).collect(),
    )
    .unwrap()
}

/// True if some line in a dense scan of directions and offsets separates
/// the classes.
fn brute_force_separable(set: &LabeledFeatureSet) -> bool {
    for a in 0..3600 {
        let theta = a as f64 * std::f64::consts::PI / 1800.0;
        let (c, s) = (theta.cos(), theta.sin());
        let proj = |x: &[f64]| c * x[0] + s * x[1];
        let max_bad = set.samples().iter().filter(|x| x.label == QualityLabel::Bad).map(|x| proj(&x.features)).fold(f64::NEG_INFINITY, f64::max);
        let min_good = set.samples().iter().filter(|x| x.label == QualityLabel::Good).map(|x| proj(&x.features)).fold(f64::INFINITY, f64::min);
        if min_good > max_bad {
            return true;
        }
    }
    false
}

fn svm_oracle() -> Outcome {
    // closed form: the max-margin separator of (-1,0):Bad, (1,0):Good is x1 = 0
    let toy = labeled(vec![
        ("bad".into(), vec![-1.0, 0.0], QualityLabel::Bad),
        ("good".into(), vec![1.0, 0.0], QualityLabel::Good),
    ]);
    let raw = SvmConfig { normalize: false, ..Default::default() };
    let model = train_svm(&toy, &raw).map_err(|e| e.to_string())?;
    let w = model.weights().unwrap();
    let angle = w[1].atan2(w[0]).abs();
    ensure(angle <= 1e-4, || format!("normal is {angle:e} rad off the axis"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..1000 {
        let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let want = if x[0] > 0.0 { QualityLabel::Good } else { QualityLabel::Bad };
        let p = model.predict(&x).unwrap();
        ensure(p.label == want, || format!("{x:?} predicted {:?}", p.label))?;
        ensure((p.distance - x[0]).abs() < 1e-6, || format!("{x:?} distance {}", p.distance))?;
    }
    let (far, near) = (model.predict(&[2.0, 0.0]).unwrap(), model.predict(&[1.0, 0.0]).unwrap());
    ensure((far.distance - 2.0 * near.distance).abs() < 1e-9, || "far/near margin ratio".into())?;

    // 150 per class from unit Gaussians centered 10 units apart
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(506);
    let points = (0..300)
        .map(|i| {
            let (label, cx) = if i % 2 == 0 { (QualityLabel::Good, 5.0) } else { (QualityLabel::Bad, -5.0) };
            (format!("g{i:03}"), vec![cx + normal.sample(&mut rng), normal.sample(&mut rng)], label)
        })
        .collect();
    let gauss = labeled(points);
    ensure(brute_force_separable(&gauss), || "seeded Gaussians are not separable".into())?;
    let model = train_svm(&gauss, &SvmConfig::default()).map_err(|e| e.to_string())?;
    let acc = evaluate(&model, &gauss).unwrap().accuracy;
    ensure(acc == 1.0, || format!("training accuracy {acc}"))?;
    Ok(format!("axis angle {angle:.1e} rad <= 1e-4; closed-form predictions match; Gaussian train acc {acc}"))
}

fn rings_table_analog() -> Outcome {
    let data = rings_oracle(&RingsConfig::default()).map_err(|e| e.to_string())?;
    let config = SvmConfig::default();
    let raw_model = train_svm(&data.raw.train, &config).map_err(|e| e.to_string())?;
    let lifted_model = train_svm(&data.lifted.train, &config).map_err(|e| e.to_string())?;
    let raw = evaluate(&raw_model, &data.raw.test).unwrap().accuracy;
    let lifted = evaluate(&lifted_model, &data.lifted.test).unwrap().accuracy;
    ensure(raw <= 0.70, || format!("raw accuracy {raw} > 0.70"))?;
    ensure(lifted >= 0.99, || format!("lifted accuracy {lifted} < 0.99"))?;
    ensure(lifted - raw >= 0.25, || format!("gap {} < 0.25", lifted - raw))?;
    Ok(format!("raw {raw:.4} <= 0.70, lifted {lifted:.4} >= 0.99, gap {:.4} >= 0.25", lifted - raw))
}

fn pca_criterion() -> Outcome {
    let (n, dim, k) = (300, 12288, 128);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    // pixel-like data: smooth low-rank structure plus noise, in [0, 1]-ish range
    let basis: Vec<Vec<f64>> = (0..32).map(|_| gaussian_vec(&mut rng, dim)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let coefs = gaussian_vec(&mut rng, basis.len());
            (0..dim)
                .map(|j| {
                    let low: f64 = coefs.iter().zip(&basis).map(|(c, b)| c * b[j]).sum::<f64>() * 0.02;
                    0.5 + low + 0.05 * rng.gen::<f64>()
                })
                .collect()
        })
        .collect();
    let table = FeatureTable::new(FeatureSource::Pixels, dim, (0..n).map(|i| format!("p{i}")).collect(), rows).unwrap();
    let model = fit_pca_table(&table, k).map_err(|e| e.to_string())?;
    ensure(model.components.len() == k, || format!("{} components", model.components.len()))?;
    let mut ortho: f64 = 0.0;
    for (i, a) in model.components.iter().enumerate() {
        for (j, b) in model.components.iter().enumerate().skip(i) {
            let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            ortho = ortho.max((d - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    ensure(ortho <= 1e-6, || format!("orthonormality error {ortho:e}"))?;
    ensure(model.explained_variance.windows(2).all(|w| w[0] >= w[1]), || "variances increase".into())?;
    let at_mean = model.transform(&model.mean).unwrap();
    let worst = at_mean.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ensure(worst <= 1e-8, || format!("transform(mean) = {worst:e}"))?;
    Ok(format!("300x12288, k=128: orthonormality err {ortho:.1e} <= 1e-6, |transform(mean)| {worst:.1e} <= 1e-8"))
}

fn random_plan(rng: &mut ChaCha8Rng) -> InterpolationPlan {
    let dim = rng.gen_range(1..=16);
    let steps = rng.gen_range(2..=12);
    let scale = 10f64.powf(rng.gen_range(-5.0..5.0));
    let mut z = || LatentCode::new(gaussian_vec(rng, dim).into_iter().map(|v| v * scale).collect()).unwrap();
    let (a, b, c) = (z(), z(), z());
    let (m, dw, ds) = (rng.gen_range(1..4), rng.gen_range(1..5), rng.gen_range(1..5));
    let cs: Vec<_> = (0..3).map(|_| conditioning(rng, m, dw, ds)).collect();
    match rng.gen_range(0..4) {
        0 => lerp_latent(&a, &b, steps),
        1 => tri_latent(&a, &b, &c, steps),
        2 => lerp_linguistic(&a, &cs[0], &cs[1], steps),
        _ => tri_linguistic(&a, &cs[0], &cs[1], &cs[2], steps),
    }
    .unwrap()
}

fn canonical_manifest(good: usize, bad: usize, train_per_class: usize) -> serde_json::Value {
    let mut entries = Vec::new();
    for (label, n) in [("good", good), ("bad", bad)] {
        for i in 0..n {
            entries.push(json!({
                "id": format!("{label}-{i:03}"),
                "image": format!("{label}/{i:03}.png"),
                "latent": [i as f64, -(i as f64)],
                "label": label,
                "split": if i < train_per_class { "train" } else { "test" },
            }));
        }
    }
    json!({"dim": 2, "entries": entries})
}

fn format_round_trips() -> Outcome {
    let mut runner = TestRunner::new(PropConfig { cases: 1000, failure_persistence: None, ..PropConfig::default() });
    // counts 0..=1000 and dims 1..=4096; rows are capped at 2^18 floats per case
    let fvec_case = (0usize..=1000, 1usize..=4096, any::<u64>());
    runner
        .run(&fvec_case, |(count, dim, seed)| {
            let count = count.min((1 << 18) / dim);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..count)
                .map(|_| {
                    (0..dim)
                        .map(|_| loop {
                            let f = f32::from_bits(rng.gen());
                            if f.is_finite() {
                                break f as f64;
                            }
                        })
                        .collect()
                })
                .collect();
            let ids = (0..count).map(|i| format!("s{seed:x}-{i}")).collect();
            let table = FeatureTable::new(FeatureSource::Deep("conv5_1".into()), dim, ids, rows).unwrap();
            let back = decode_fvec(&encode_fvec(&table).unwrap()).unwrap();
            prop_assert_eq!(back.ids(), table.ids());
            prop_assert_eq!(back.dim(), dim);
            for (a, b) in back.rows().iter().zip(table.rows()) {
                prop_assert_eq!(bits(a), bits(b));
            }
            Ok(())
        })
        .map_err(|e| format!("fvec: {e}"))?;

    let mut runner = TestRunner::new(PropConfig { cases: 1000, failure_persistence: None, ..PropConfig::default() });
    runner
        .run(&any::<u64>(), |seed| {
            let plan = random_plan(&mut ChaCha8Rng::seed_from_u64(seed));
            let back = plan_from_json(&plan_to_json(&plan)).unwrap();
            prop_assert_eq!(back, plan);
            Ok(())
        })
        .map_err(|e| format!("plan: {e}"))?;

    parse_manifest(&canonical_manifest(210, 210, 150).to_string(), true).map_err(|e| format!("canonical manifest: {e}"))?;
    for (g, b, t) in [(209, 210, 150), (210, 211, 150), (210, 210, 151), (210, 210, 149), (0, 0, 0)] {
        let doc = canonical_manifest(g, b, t).to_string();
        ensure(parse_manifest(&doc, true).is_err(), || format!("strict accepted {g}/{b} with {t} train per class"))?;
        ensure(parse_manifest(&doc, false).map(|m| !m.warnings.is_empty()).unwrap_or(false), || "lenient mode should warn".into())?;
    }
    Ok("1000 FVEC + 1000 plan round-trips identical; strict manifest enforces 210/210, 150/150, 60/60".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("grid count law", grid_count_law, Duration::from_secs(1)),
        ("endpoint/corner identities", endpoint_identities, Duration::from_secs(1)),
        ("row-reduction", row_reduction, Duration::from_secs(1)),
        ("affinity & barycentric validity", affinity_and_barycentric, Duration::from_secs(5)),
        ("toy smoothness", toy_smoothness, Duration::from_secs(5)),
        ("svm oracle", svm_oracle, Duration::from_secs(10)),
        ("rings (Good/Bad separability analog)", rings_table_analog, Duration::from_secs(30)),
        ("pca", pca_criterion, Duration::from_secs(60)),
        ("format round-trips", format_round_trips, Duration::from_secs(10)),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<38} {elapsed:>9.2?}  {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name:<38} {elapsed:>9.2?}  {detail}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
