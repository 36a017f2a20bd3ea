//! Multilinear class-specific discriminant analysis.
//!
//! The crate learns per-mode projection matrices that map `I_1 x ... x I_K`
//! tensors onto a smaller tensor subspace in which one positive class stays
//! compact around its mean while every other sample is pushed away from it.
//! The vector (CSDA, LDA) and multi-class tensor (MDA) baselines share the
//! same ratio-trace eigensolver so the methods can be compared directly.
//!
//! Modes are zero-based throughout the Rust API: mode `0` is the first tensor
//! index, which is also the fastest-varying one in storage.
//!
//! ```
//! use mcsda::{synth_generate, fit_mcsda, SynthSpec, TrainConfig, Tensor};
//!
//! let data = synth_generate(&SynthSpec {
//!     dims: vec![6, 5],
//!     n_classes: 3,
//!     samples_per_class: 10,
//!     class_mean_scale: 10.0,
//!     noise_sigma: 1.0,
//!     seed: 7,
//! })
//! .unwrap();
//! let model = fit_mcsda(&data, 1, &TrainConfig::new(vec![2, 2])).unwrap();
//! assert_eq!(model.fit_report.parameter_count, 6 * 2 + 5 * 2);
//! let score = model.similarity_score(&data.samples()[0]).unwrap();
//! assert!(score > 0.0 && score <= 1.0);
//! # let _ = Tensor::zeros(vec![1]);
//! ```

pub mod cli;
pub mod dataset;
pub mod discriminant;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod model_io;
pub mod tensor;

pub use dataset::{
    load_dataset, save_dataset, stratified_split, stratified_split_indices, synth_generate,
    DatasetManifest, LabeledDataset, SynthSpec,
};
pub use discriminant::{
    class_statistics, convergence_metric, csda_scatters, fit_class_model, fit_csda, fit_lda,
    fit_lda_one_vs_rest, fit_mcsda, fit_mda, fit_mda_one_vs_rest, lda_scatters,
    mode_k_class_specific_scatters, mode_k_multiclass_scatters, parameter_count, ClassStatistics,
    DiscriminantModel, FitReport, Init, Method, TrainConfig,
};
pub use error::{Error, Result};
pub use evaluation::{
    average_precision, classification_report, classify, mean_average_precision, predict_class,
    verify, ClassificationReport, FoldSummary, ScoredSample, VerificationReport,
};
pub use linalg::{regularize, solve_ratio_trace, EigenBasis, ScatterPair};
pub use model_io::{load_model, save_model};
pub use tensor::{fold, mode_product, multi_project, unfold, Matrix, ProjectionSet, Tensor};
