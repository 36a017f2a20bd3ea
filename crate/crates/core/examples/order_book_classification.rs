// Three-way mid-price movement classification (up / stationary / down) from
// order-book snapshots shaped as (price levels x time steps) tensors.

use mcsda::{classify, fit_class_model, stratified_split, Method, TrainConfig};
use mcsda::{LabeledDataset, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::error::Error;

const LEVELS: usize = 10;
const STEPS: usize = 8;

/// Each sample is a window of ask/bid depth profiles; the label's trend shows
/// up as a drift of depth across time that is shared by all levels.
fn synthetic_book(per_class: usize, seed: u64) -> Result<LabeledDataset, Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (label, drift) in [(1, 0.35), (2, 0.0), (3, -0.35)] {
        for _ in 0..per_class {
            let level_scale: Vec<f64> = (0..LEVELS).map(|l| 1.0 / (1.0 + l as f64)).collect();
            let t = Tensor::from_fn(vec![LEVELS, STEPS], |idx| {
                let noise: f64 = rng.sample(StandardNormal);
                level_scale[idx[0]] * (5.0 + drift * idx[1] as f64) + 0.3 * noise
            })?;
            samples.push(t);
            labels.push(label);
        }
    }
    Ok(LabeledDataset::new(samples, labels, 3)?)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let book = synthetic_book(60, 11)?;
    let (train, test) = stratified_split(&book, 0.5, 11)?;
    for method in [Method::Mda, Method::Mcsda] {
        let config = TrainConfig::new(vec![2, 2]);
        let models = (1..=3)
            .map(|c| fit_class_model(method, &train, c, &config))
            .collect::<Result<Vec<_>, _>>()?;
        let report = classify(&models, &test)?;
        println!(
            "{:<5} accuracy {:.3}  precision {:.3}  recall {:.3}  f1 {:.3}",
            method.name(),
            report.accuracy,
            report.macro_precision,
            report.macro_recall,
            report.macro_f1
        );
        for row in &report.confusion {
            println!("      {row:?}");
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
