//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

mod common;

use common::*;
use mcsda::discriminant::class_specific_objective;
use mcsda::{
    average_precision, classification_report, csda_scatters, fit_csda, fit_lda, fit_mcsda, fit_mda,
    lda_scatters, load_dataset, load_model, mode_k_class_specific_scatters,
    mode_k_multiclass_scatters, mode_product, parameter_count, regularize, save_dataset,
    save_model, solve_ratio_trace, stratified_split, synth_generate, unfold, verify,
    DiscriminantModel, LabeledDataset, Matrix, Method, ScatterPair, ScoredSample, SynthSpec,
    TrainConfig,
};
use rand::Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_s,
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64()),
    )
}

fn tensor_identity() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let order = r.random_range(2..=4);
        let dims: Vec<usize> = (0..order).map(|_| r.random_range(1..=6)).collect();
        let mode = r.random_range(0..order);
        let rows = r.random_range(1..=6);
        let t = random_tensor(&mut r, &dims);
        let w = random_matrix(&mut r, rows, dims[mode]);
        let lhs = unfold(
            &mode_product(&t, &w, mode).map_err(|e| e.to_string())?,
            mode,
        )
        .unwrap();
        let rhs = &w * unfold(&t, mode).unwrap();
        worst = worst.max(rel_err(&lhs, &rhs));
    }
    check(worst < 1e-12, format!("max rel err {worst:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "max rel err {worst:.1e} over 100 triples in {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn scatter_oracles() -> Outcome {
    let mut r = rng(1002);
    let mut worst: f64 = 0.0;
    let mut track = |a: &Matrix, b: &Matrix| worst = worst.max(rel_err(a, b));
    for trial in 0..12 {
        let order = 1 + trial % 3;
        let dims: Vec<usize> = [6, 5, 4][..order]
            .iter()
            .map(|&d| r.random_range(2..=d))
            .collect();
        let n = r.random_range(10..=50);
        let classes = r.random_range(2..=4);
        let data = random_dataset(&mut r, &dims, n, classes);
        let positive = r.random_range(1..=classes);

        let (so, si) = brute_csda(&data, positive);
        let pair = csda_scatters(&data, positive).unwrap();
        track(&pair.numerator, &so);
        track(&pair.denominator, &si);
        let (sb, sw) = brute_lda(&data);
        let pair = lda_scatters(&data).unwrap();
        track(&pair.numerator, &sb);
        track(&pair.denominator, &sw);

        let ws: Vec<Matrix> = dims
            .iter()
            .map(|&d| {
                let cols = r.random_range(1..=d);
                random_matrix(&mut r, d, cols)
            })
            .collect();
        for k in 0..order {
            let (so, si) = brute_mode_class_specific(&data, positive, &ws, k);
            let pair = mode_k_class_specific_scatters(&data, positive, &ws, k).unwrap();
            track(&pair.numerator, &so);
            track(&pair.denominator, &si);
            let (sb, sw) = brute_mode_multiclass(&data, &ws, k);
            let pair = mode_k_multiclass_scatters(&data, &ws, k).unwrap();
            track(&pair.numerator, &sb);
            track(&pair.denominator, &sw);
        }
    }
    check(worst < 1e-10, format!("max rel err {worst:e}"))?;
    Ok(format!("max rel err {worst:.1e}"))
}

fn eigen_contract() -> Outcome {
    let mut r = rng(1003);
    let lambda = 0.01;
    let (mut worst_res, mut worst_orth): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let n = r.random_range(1..=30);
        let (rank_n, rank_d) = (r.random_range(1..=n), r.random_range(1..=n));
        let pair =
            ScatterPair::new(random_psd(&mut r, n, rank_n), random_psd(&mut r, n, rank_d)).unwrap();
        let d = r.random_range(1..=n);
        let basis = solve_ratio_trace(&pair, d, lambda).map_err(|e| e.to_string())?;
        let den = regularize(&pair.denominator, lambda);
        let w = &basis.vectors;
        for (c, &value) in basis.values.iter().enumerate() {
            let v = w.column(c);
            let resid = (&pair.numerator * v - &den * v * value).norm();
            let scale = (pair.numerator.norm() + value.abs() * den.norm()) * v.norm();
            worst_res = worst_res.max(resid / scale);
        }
        let gram = w.transpose() * &den * w;
        worst_orth = worst_orth.max((gram - Matrix::identity(d, d)).amax());
    }
    check(worst_res < 1e-8, format!("residual {worst_res:e}"))?;
    check(worst_orth < 1e-8, format!("orthonormality {worst_orth:e}"))?;
    Ok(format!(
        "residual {worst_res:.1e}, orthonormality {worst_orth:.1e} over 50 pairs"
    ))
}

fn single_mode_reductions() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let mut r = rng(1004 + seed);
        let dim = r.random_range(4..=12);
        let classes = r.random_range(3..=5);
        let data = random_dataset(&mut r, &[dim], 60, classes);
        let d = r.random_range(1..classes);
        let mut config = TrainConfig::new(vec![d]);
        config.lambda = 0.01;
        let positive = r.random_range(1..=classes);
        let a = fit_mcsda(&data, positive, &config).map_err(|e| e.to_string())?;
        let b = fit_csda(&data, positive, &config).map_err(|e| e.to_string())?;
        worst = worst.max(principal_angle(&a.projections[0], &b.projections[0]));
        let a = fit_mda(&data, &config).map_err(|e| e.to_string())?;
        let b = fit_lda(&data, &config).map_err(|e| e.to_string())?;
        worst = worst.max(principal_angle(&a.projections[0], &b.projections[0]));
    }
    check(worst < 1e-6, format!("max principal angle {worst:e}"))?;
    Ok(format!("max principal angle {worst:.1e}"))
}

fn parameter_counts() -> Outcome {
    let cases = [([30, 30], [1, 1], 60, 900), ([40, 30], [7, 7], 490, 58800)];
    for (input, sub, tensor, vector) in cases {
        let t = parameter_count(Method::Mcsda, &input, &sub);
        let v = parameter_count(Method::Csda, &input, &sub);
        check(
            t == tensor && v == vector,
            format!("{input:?}->{sub:?}: {t} vs {v}"),
        )?;
    }
    Ok("60 vs 900, 490 vs 58800".into())
}

fn criterion_data(seed: u64, sigma: f64) -> LabeledDataset {
    synth_generate(&SynthSpec {
        dims: vec![20, 15],
        n_classes: 5,
        samples_per_class: 40,
        class_mean_scale: 10.0,
        noise_sigma: sigma,
        seed,
    })
    .unwrap()
}

fn criterion_config() -> TrainConfig {
    TrainConfig {
        lambda: 0.01,
        max_iter: 20,
        eps: 1e-5,
        ..TrainConfig::new(vec![3, 3])
    }
}

fn algorithm_behaviour() -> Outcome {
    let config = criterion_config();
    let mut max_sweeps = 0;
    let mut min_margin = f64::INFINITY;
    for seed in 0..20 {
        let data = criterion_data(seed, 1.0);
        let positive = 1 + (seed as usize) % 5;
        let model = fit_mcsda(&data, positive, &config).map_err(|e| e.to_string())?;
        let report = &model.fit_report;
        check(
            (1..=20).contains(&report.iterations_run),
            format!("seed {seed}: {} sweeps", report.iterations_run),
        )?;
        check(
            report.convergence_trace.len() == report.iterations_run
                && report.objective_trace.len() == report.iterations_run,
            format!("seed {seed}: trace lengths disagree"),
        )?;
        max_sweeps = max_sweeps.max(report.iterations_run);
        let fitted = class_specific_objective(&data, positive, &model.projections).unwrap();
        let mut r = rng(5000 + seed);
        for _ in 0..20 {
            let ws = vec![
                random_orthonormal(&mut r, 20, 3),
                random_orthonormal(&mut r, 15, 3),
            ];
            let random = class_specific_objective(&data, positive, &ws).unwrap();
            check(
                fitted > random,
                format!("seed {seed}: J {fitted} <= random {random}"),
            )?;
            min_margin = min_margin.min(fitted / random);
        }
    }
    Ok(format!(
        "at most {max_sweeps} sweeps; fitted J at least {min_margin:.1}x random"
    ))
}

fn verification_map(sigma: f64) -> Result<f64, String> {
    let data = criterion_data(7, sigma);
    let (train, test) = stratified_split(&data, 0.5, 7).map_err(|e| e.to_string())?;
    let config = criterion_config();
    let models = (1..=5)
        .map(|c| fit_mcsda(&train, c, &config))
        .collect::<Result<Vec<DiscriminantModel>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(verify(&models, &test).map_err(|e| e.to_string())?.map)
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let noisy = verification_map(1.0)?;
    check(noisy >= 0.99, format!("mAP {noisy}"))?;
    let clean = verification_map(0.0)?;
    check(clean == 1.0, format!("noiseless mAP {clean}"))?;
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "mAP {noisy:.4}, noiseless {clean}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn metric_exactness() -> Outcome {
    let scored = |s: &[f64], f: &[bool]| -> Vec<ScoredSample> {
        s.iter()
            .zip(f)
            .map(|(&score, &is_positive)| ScoredSample { score, is_positive })
            .collect()
    };
    let ap =
        average_precision(&scored(&[0.9, 0.8, 0.7, 0.6], &[true, false, true, false])).unwrap();
    check(ap == 5.0 / 6.0, format!("fixture AP {ap}"))?;
    let perfect =
        average_precision(&scored(&[0.9, 0.8, 0.7, 0.6], &[true, true, false, false])).unwrap();
    check(perfect == 1.0, format!("perfect AP {perfect}"))?;
    let r = classification_report(&[1, 1, 2, 2], &[1, 2, 1, 2], 2).unwrap();
    check(
        r.accuracy == 0.5 && r.macro_f1 == 0.5,
        format!("accuracy {} macro-F1 {}", r.accuracy, r.macro_f1),
    )?;
    Ok("AP 5/6, perfect 1.0, accuracy 0.5, macro-F1 0.5".into())
}

fn relative_cost() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = dir.path().join("bench.json");
    let out = Command::new(env!("CARGO_BIN_EXE_mcsda"))
        .args([
            "bench",
            "--dims",
            "40x30",
            "--subspace",
            "7x7",
            "--n",
            "200",
            "--repeats",
            "1",
            "--report",
        ])
        .arg(&report)
        .output()
        .map_err(|e| e.to_string())?;
    check(
        out.status.success(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )?;
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let csda = v["csda_seconds"][0].as_f64().unwrap();
    let mcsda = v["mcsda_seconds"][0].as_f64().unwrap();
    let ratio = v["time_ratio"].as_f64().unwrap();
    check(
        csda > mcsda,
        format!("csda {csda:.3}s vs mcsda {mcsda:.3}s"),
    )?;
    check(
        v["csda_parameters"] == 58800 && v["mcsda_parameters"] == 490,
        "parameter counts in bench report",
    )?;
    Ok(format!(
        "csda {csda:.3}s, mcsda {mcsda:.3}s, measured ratio {ratio:.1}x"
    ))
}

fn format_roundtrips() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bits = |d: &LabeledDataset| -> Vec<u64> {
        d.samples()
            .iter()
            .flat_map(|t| t.data().iter().map(|v| v.to_bits()))
            .collect()
    };
    let mut r = rng(1010);
    for i in 0..20 {
        let order = r.random_range(1..=3);
        let dims: Vec<usize> = (0..order).map(|_| r.random_range(2..=5)).collect();
        let classes = r.random_range(2..=4);
        let n = r.random_range(2 * classes..=30);
        let data = random_dataset(&mut r, &dims, n, classes);
        let path = dir.path().join(format!("data{i}"));
        save_dataset(&data, &path, false).map_err(|e| e.to_string())?;
        let back = load_dataset(&path).map_err(|e| e.to_string())?;
        check(
            bits(&back) == bits(&data) && back == data,
            format!("dataset {i} differs"),
        )?;

        let sub: Vec<usize> = dims.iter().map(|&d| r.random_range(1..=d)).collect();
        let positive = r.random_range(1..=classes);
        let model = fit_mcsda(
            &data,
            positive,
            &TrainConfig {
                max_iter: 3,
                ..TrainConfig::new(sub)
            },
        )
        .map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("model{i}"));
        save_model(&model, &path, false).map_err(|e| e.to_string())?;
        let back = load_model(&path).map_err(|e| e.to_string())?;
        let same_bits = back
            .projections
            .iter()
            .zip(&model.projections)
            .all(|(a, b)| {
                a.shape() == b.shape()
                    && a.iter()
                        .zip(b.iter())
                        .all(|(x, y)| x.to_bits() == y.to_bits())
            });
        check(same_bits && back == model, format!("model {i} differs"))?;
    }
    for seed in [0, 7, 12345] {
        let spec = SynthSpec {
            dims: vec![8, 6],
            n_classes: 3,
            samples_per_class: 50,
            class_mean_scale: 10.0,
            noise_sigma: 1.0,
            seed,
        };
        let a = dir.path().join(format!("synth{seed}a"));
        let b = dir.path().join(format!("synth{seed}b"));
        save_dataset(&synth_generate(&spec).unwrap(), &a, false).map_err(|e| e.to_string())?;
        save_dataset(&synth_generate(&spec).unwrap(), &b, false).map_err(|e| e.to_string())?;
        for file in ["data.bin", "labels.csv", "manifest.json"] {
            let same = std::fs::read(a.join(file)).unwrap() == std::fs::read(b.join(file)).unwrap();
            check(same, format!("seed {seed}: {file} differs"))?;
        }
    }
    Ok("20 datasets and 20 models bit-exact; synthetic data byte-identical per seed".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("mode product matches unfolded product", tensor_identity),
        ("scatters match brute-force oracles", scatter_oracles),
        ("ratio-trace eigen contract", eigen_contract),
        ("single-mode reductions", single_mode_reductions),
        ("parameter counts", parameter_counts),
        ("alternating solver behaviour", algorithm_behaviour),
        ("end-to-end verification quality", end_to_end),
        ("metric exactness", metric_exactness),
        ("relative cost ordering", relative_cost),
        ("format roundtrips", format_roundtrips),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
