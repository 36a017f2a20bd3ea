//! Model directories: `model.json` plus raw little-endian `f64` blobs.
//!
//! `W<k>.bin` holds projection matrix `k` (1-based) column-major with its shape
//! in the manifest, `mean.bin` the reference mean in tensor storage order and
//! `class_mean<c>.bin` the retained class means of multi-class fits.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{decode_f64_le, encode_f64_le, read_existing};
use crate::discriminant::{DiscriminantModel, FitReport, Init, Method, TrainConfig};
use crate::error::{Error, Result};
use crate::tensor::{Matrix, Tensor};

pub const MODEL_VERSION: u32 = 1;
const MODEL_JSON: &str = "model.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub file: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub file: String,
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub version: u32,
    pub method: Method,
    pub input_dims: Vec<usize>,
    pub subspace_dims: Vec<usize>,
    pub positive_class: Option<usize>,
    pub lambda: f64,
    pub max_iter: usize,
    pub eps: f64,
    pub init: Init,
    pub seed: u64,
    pub parameter_count: usize,
    pub projections: Vec<MatrixEntry>,
    pub reference_mean: Option<TensorEntry>,
    #[serde(default)]
    pub class_means: Vec<TensorEntry>,
    pub fit_report: FitReportDoc,
}

/// JSON form of [`FitReport`]; non-finite values are written as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReportDoc {
    pub objective_trace: Vec<JsonFloat>,
    pub convergence_trace: Vec<JsonFloat>,
    pub iterations_run: usize,
    pub converged: bool,
    pub wall_time_seconds: f64,
    pub parameter_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonFloat {
    Finite(f64),
    Special(SpecialFloat),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialFloat {
    #[serde(rename = "inf")]
    Inf,
    #[serde(rename = "-inf")]
    NegInf,
    #[serde(rename = "nan")]
    Nan,
}

impl From<f64> for JsonFloat {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            JsonFloat::Finite(v)
        } else if v.is_nan() {
            JsonFloat::Special(SpecialFloat::Nan)
        } else if v > 0.0 {
            JsonFloat::Special(SpecialFloat::Inf)
        } else {
            JsonFloat::Special(SpecialFloat::NegInf)
        }
    }
}

impl From<JsonFloat> for f64 {
    fn from(v: JsonFloat) -> Self {
        match v {
            JsonFloat::Finite(v) => v,
            JsonFloat::Special(SpecialFloat::Inf) => f64::INFINITY,
            JsonFloat::Special(SpecialFloat::NegInf) => f64::NEG_INFINITY,
            JsonFloat::Special(SpecialFloat::Nan) => f64::NAN,
        }
    }
}

impl From<&FitReport> for FitReportDoc {
    fn from(r: &FitReport) -> Self {
        Self {
            objective_trace: r.objective_trace.iter().map(|&v| v.into()).collect(),
            convergence_trace: r.convergence_trace.iter().map(|&v| v.into()).collect(),
            iterations_run: r.iterations_run,
            converged: r.converged,
            wall_time_seconds: r.wall_time_seconds,
            parameter_count: r.parameter_count,
        }
    }
}

impl From<&FitReportDoc> for FitReport {
    fn from(d: &FitReportDoc) -> Self {
        Self {
            objective_trace: d.objective_trace.iter().map(|&v| v.into()).collect(),
            convergence_trace: d.convergence_trace.iter().map(|&v| v.into()).collect(),
            iterations_run: d.iterations_run,
            converged: d.converged,
            wall_time_seconds: d.wall_time_seconds,
            parameter_count: d.parameter_count,
        }
    }
}

pub fn save_model(model: &DiscriminantModel, path: impl AsRef<Path>, force: bool) -> Result<()> {
    let dir = path.as_ref();
    let json_path = dir.join(MODEL_JSON);
    if json_path.exists() && !force {
        return Err(Error::AlreadyExists(dir.to_path_buf()));
    }
    fs::create_dir_all(dir)?;

    let mut projections = Vec::with_capacity(model.projections.len());
    for (k, w) in model.projections.iter().enumerate() {
        let entry = MatrixEntry {
            file: format!("W{}.bin", k + 1),
            rows: w.nrows(),
            cols: w.ncols(),
        };
        fs::write(dir.join(&entry.file), encode_f64_le(w.as_slice()))?;
        projections.push(entry);
    }
    let write_tensor = |file: String, t: &Tensor| -> Result<TensorEntry> {
        fs::write(dir.join(&file), encode_f64_le(t.data()))?;
        Ok(TensorEntry {
            file,
            dims: t.dims().to_vec(),
        })
    };
    let reference_mean = model
        .reference_mean
        .as_ref()
        .map(|m| write_tensor("mean.bin".into(), m))
        .transpose()?;
    let class_means = model
        .class_means
        .iter()
        .enumerate()
        .map(|(c, m)| write_tensor(format!("class_mean{}.bin", c + 1), m))
        .collect::<Result<Vec<_>>>()?;

    let manifest = ModelManifest {
        version: MODEL_VERSION,
        method: model.method,
        input_dims: model.input_dims.clone(),
        subspace_dims: model.subspace_dims(),
        positive_class: model.positive_class,
        lambda: model.config.lambda,
        max_iter: model.config.max_iter,
        eps: model.config.eps,
        init: model.config.init,
        seed: model.config.seed,
        parameter_count: model.fit_report.parameter_count,
        projections,
        reference_mean,
        class_means,
        fit_report: (&model.fit_report).into(),
    };
    fs::write(json_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

pub fn is_model_dir(path: &Path) -> bool {
    path.join(MODEL_JSON).is_file()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<DiscriminantModel> {
    let dir = path.as_ref();
    let json_path = dir.join(MODEL_JSON);
    let manifest: ModelManifest =
        serde_json::from_slice(&read_existing(&json_path)?).map_err(|e| Error::Manifest {
            path: json_path.clone(),
            message: e.to_string(),
        })?;
    if manifest.version != MODEL_VERSION {
        return Err(Error::Manifest {
            path: json_path,
            message: format!("unsupported version {}", manifest.version),
        });
    }

    let read_values = |file: &str, count: usize| -> Result<Vec<f64>> {
        let p = dir.join(file);
        let bytes = read_existing(&p)?;
        if bytes.len() != count * 8 {
            return Err(Error::SizeMismatch {
                path: p,
                expected: (count * 8) as u64,
                found: bytes.len() as u64,
            });
        }
        Ok(decode_f64_le(&bytes))
    };
    let projections = manifest
        .projections
        .iter()
        .map(|e| read_values(&e.file, e.rows * e.cols).map(|v| Matrix::from_vec(e.rows, e.cols, v)))
        .collect::<Result<Vec<_>>>()?;
    let read_tensor = |e: &TensorEntry| -> Result<Tensor> {
        let v = read_values(&e.file, e.dims.iter().product())?;
        Tensor::new(e.dims.clone(), v)
    };
    let reference_mean = manifest
        .reference_mean
        .as_ref()
        .map(read_tensor)
        .transpose()?;
    let class_means = manifest
        .class_means
        .iter()
        .map(read_tensor)
        .collect::<Result<Vec<_>>>()?;

    let model = DiscriminantModel {
        method: manifest.method,
        input_dims: manifest.input_dims.clone(),
        projections,
        reference_mean,
        class_means,
        positive_class: manifest.positive_class,
        config: TrainConfig {
            lambda: manifest.lambda,
            max_iter: manifest.max_iter,
            eps: manifest.eps,
            subspace_dims: manifest.subspace_dims.clone(),
            init: manifest.init,
            seed: manifest.seed,
        },
        fit_report: (&manifest.fit_report).into(),
    };
    if model.subspace_dims() != manifest.subspace_dims {
        return Err(Error::Manifest {
            path: json_path,
            message: "projection shapes disagree with subspace_dims".into(),
        });
    }
    Ok(model)
}
