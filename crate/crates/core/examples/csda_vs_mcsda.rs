// Vector CSDA against its multilinear counterpart on the same image-sized
// synthetic data: parameters, training time, and verification AP.

use mcsda::{
    fit_csda, fit_mcsda, stratified_split, synth_generate, verify, SynthSpec, TrainConfig,
};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = synth_generate(&SynthSpec {
        dims: vec![20, 15],
        n_classes: 4,
        samples_per_class: 30,
        class_mean_scale: 2.0,
        noise_sigma: 1.0,
        seed: 3,
    })?;
    let (train, test) = stratified_split(&data, 0.5, 3)?;

    let tensor_config = TrainConfig::new(vec![3, 3]);
    let vector_config = TrainConfig::new(vec![9]);
    for positive in 1..=2 {
        let tensor = fit_mcsda(&train, positive, &tensor_config)?;
        let vector = fit_csda(&train, positive, &vector_config)?;
        for model in [&vector, &tensor] {
            let r = &model.fit_report;
            let ap = verify(std::slice::from_ref(model), &test)?.map;
            println!(
                "class {positive} {:<5} params {:>5}  fit {:>7.4}s  sweeps {:>2}  AP {ap:.4}",
                model.method.name(),
                r.parameter_count,
                r.wall_time_seconds,
                r.iterations_run,
            );
        }
        let trace: Vec<String> = tensor
            .fit_report
            .convergence_trace
            .iter()
            .map(|c| format!("{c:.1e}"))
            .collect();
        println!("  mcsda subspace change per sweep: {}", trace.join(" "));
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
