// Writing a dataset and a trained model to disk and reading both back.

use mcsda::{
    fit_mcsda, load_dataset, load_model, save_dataset, save_model, stratified_split,
    synth_generate, SynthSpec, TrainConfig,
};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let root = tempfile::tempdir()?;
    let spec = SynthSpec {
        dims: vec![6, 5],
        n_classes: 3,
        samples_per_class: 12,
        class_mean_scale: 10.0,
        noise_sigma: 1.0,
        seed: 5,
    };
    let data = synth_generate(&spec)?;
    let data_dir = root.path().join("data");
    save_dataset(&data, &data_dir, false)?;
    for entry in std::fs::read_dir(&data_dir)? {
        let entry = entry?;
        println!(
            "{:<14} {:>6} bytes",
            entry.file_name().to_string_lossy(),
            entry.metadata()?.len()
        );
    }
    let loaded = load_dataset(&data_dir)?;
    assert_eq!(loaded, data);

    let (train, _) = stratified_split(&loaded, 0.5, 1)?;
    let model = fit_mcsda(&train, 2, &TrainConfig::new(vec![2, 2]))?;
    let model_dir = root.path().join("model");
    save_model(&model, &model_dir, false)?;
    let back = load_model(&model_dir)?;
    assert_eq!(back, model);
    println!(
        "model.json:\n{}",
        std::fs::read_to_string(model_dir.join("model.json"))?
    );

    // saving again without force is refused
    if let Err(e) = save_model(&model, &model_dir, false) {
        println!("second save: {e}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
