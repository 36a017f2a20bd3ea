//! Labeled tensor datasets: the on-disk format, stratified splits and a
//! seeded synthetic generator.
//!
//! A dataset directory holds three files:
//!
//! * `manifest.json`: `{"version":1,"dims":[..],"count":N,"n_classes":C,
//!   "dtype":"float64-le","data_file":"data.bin","label_file":"labels.csv"}`
//! * `data.bin`: `N` tensors back to back, each in tensor storage order
//!   (first index fastest), little-endian IEEE-754 doubles.
//! * `labels.csv`: one 1-based class id per line.
//!
//! Random streams come from ChaCha8 seeded with `seed_from_u64`, so splits and
//! synthetic data are reproducible across platforms.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tensor::Tensor;

pub const FORMAT_VERSION: u32 = 1;
pub const DTYPE_F64_LE: &str = "float64-le";
const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dims: Vec<usize>,
    samples: Vec<Tensor>,
    labels: Vec<usize>,
    n_classes: usize,
}

impl LabeledDataset {
    /// Labels are 1-based class ids in `1..=n_classes`.
    pub fn new(samples: Vec<Tensor>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("dataset has no samples"));
        }
        if samples.len() != labels.len() {
            return Err(invalid(format!(
                "{} samples but {} labels",
                samples.len(),
                labels.len()
            )));
        }
        if n_classes == 0 {
            return Err(invalid("dataset needs at least one class"));
        }
        let dims = samples[0].dims().to_vec();
        if let Some(j) = samples.iter().position(|s| s.dims() != dims.as_slice()) {
            return Err(invalid(format!(
                "sample {j} has dims {:?}, expected {:?}",
                samples[j].dims(),
                dims
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l == 0 || l > n_classes) {
            return Err(invalid(format!("label {l} outside 1..={n_classes}")));
        }
        Ok(Self {
            dims,
            samples,
            labels,
            n_classes,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn samples(&self) -> &[Tensor] {
        &self.samples
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Per-class sample counts, index `c - 1` for class `c`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l - 1] += 1;
        }
        counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tensor, usize)> {
        self.samples.iter().zip(self.labels.iter().copied())
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.samples[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.n_classes,
        )
    }

    /// Binary relabeling: `positive` becomes class 1, everything else class 2.
    pub fn one_vs_rest(&self, positive: usize) -> Result<Self> {
        if positive == 0 || positive > self.n_classes {
            return Err(invalid(format!(
                "positive class {positive} outside 1..={}",
                self.n_classes
            )));
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| if l == positive { 1 } else { 2 })
            .collect();
        Self::new(self.samples.clone(), labels, 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub dims: Vec<usize>,
    pub count: usize,
    pub n_classes: usize,
    pub dtype: String,
    pub data_file: String,
    pub label_file: String,
}

impl DatasetManifest {
    pub fn data_bytes(&self) -> u64 {
        (self.count * self.dims.iter().product::<usize>() * 8) as u64
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let dir = path.as_ref();
    let manifest_path = dir.join(MANIFEST);
    let manifest = read_manifest(&manifest_path)?;

    let data_path = dir.join(&manifest.data_file);
    let bytes = read_existing(&data_path)?;
    let expected = manifest.data_bytes();
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            path: data_path,
            expected,
            found: bytes.len() as u64,
        });
    }

    let label_path = dir.join(&manifest.label_file);
    let text = String::from_utf8(read_existing(&label_path)?).map_err(|_| Error::Manifest {
        path: label_path.clone(),
        message: "labels file is not UTF-8".into(),
    })?;
    let mut labels = Vec::with_capacity(manifest.count);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let label: i64 = line.parse().map_err(|_| Error::BadLabel {
            path: label_path.clone(),
            line: i + 1,
            text: line.to_string(),
        })?;
        if label < 1 || label as usize > manifest.n_classes {
            return Err(Error::LabelOutOfRange {
                path: label_path.clone(),
                line: i + 1,
                label,
                n_classes: manifest.n_classes,
            });
        }
        labels.push(label as usize);
    }
    if labels.len() != manifest.count {
        return Err(Error::Manifest {
            path: label_path,
            message: format!("expected {} labels, found {}", manifest.count, labels.len()),
        });
    }

    let per_sample: usize = manifest.dims.iter().product();
    let values = decode_f64_le(&bytes);
    let samples = values
        .chunks_exact(per_sample)
        .map(|c| Tensor::new(manifest.dims.clone(), c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    LabeledDataset::new(samples, labels, manifest.n_classes)
}

fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = read_existing(path)?;
    let manifest: DatasetManifest = serde_json::from_slice(&text).map_err(|e| Error::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let bad = |message: String| Error::Manifest {
        path: path.to_path_buf(),
        message,
    };
    if manifest.version != FORMAT_VERSION {
        return Err(bad(format!("unsupported version {}", manifest.version)));
    }
    if manifest.dtype != DTYPE_F64_LE {
        return Err(bad(format!("unsupported dtype {:?}", manifest.dtype)));
    }
    if manifest.dims.is_empty() || manifest.dims.contains(&0) {
        return Err(bad(format!("invalid dims {:?}", manifest.dims)));
    }
    if manifest.count == 0 || manifest.n_classes == 0 {
        return Err(bad("count and n_classes must be positive".into()));
    }
    Ok(manifest)
}

pub(crate) fn read_existing(path: &Path) -> Result<Vec<u8>> {
    match fs::read(path) {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::MissingFile(path.to_path_buf()))
        }
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn decode_f64_le(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect()
}

pub(crate) fn encode_f64_le<'a>(values: impl IntoIterator<Item = &'a f64>) -> Vec<u8> {
    values.into_iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Writes `data` into directory `path`, creating it if needed. An existing
/// dataset in `path` is only replaced when `force` is set.
pub fn save_dataset(data: &LabeledDataset, path: impl AsRef<Path>, force: bool) -> Result<()> {
    let dir = path.as_ref();
    let manifest_path = dir.join(MANIFEST);
    if manifest_path.exists() && !force {
        return Err(Error::AlreadyExists(dir.to_path_buf()));
    }
    fs::create_dir_all(dir)?;
    let manifest = DatasetManifest {
        version: FORMAT_VERSION,
        dims: data.dims.clone(),
        count: data.len(),
        n_classes: data.n_classes,
        dtype: DTYPE_F64_LE.into(),
        data_file: "data.bin".into(),
        label_file: "labels.csv".into(),
    };
    let bytes = encode_f64_le(data.samples.iter().flat_map(|s| s.data()));
    fs::write(dir.join(&manifest.data_file), bytes)?;
    let labels: String = data.labels.iter().map(|l| format!("{l}\n")).collect();
    fs::write(dir.join(&manifest.label_file), labels)?;
    fs::write(
        manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

/// Per-class split: `ceil(fraction * n_i)` samples of each class go to the
/// training side, drawn without replacement. Returned indices are ascending.
pub fn stratified_split_indices(
    data: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(invalid(format!("split fraction {fraction} not in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 1..=data.n_classes {
        let mut members: Vec<usize> = (0..data.len())
            .filter(|&i| data.labels[i] == class)
            .collect();
        if members.is_empty() {
            return Err(invalid(format!("class {class} has no samples to split")));
        }
        let n_train = train_count(fraction, members.len());
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

// The small slack keeps products such as 0.35 * 20 = 7.000000000000001 at 7.
fn train_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n)
}

pub fn stratified_split(
    data: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = stratified_split_indices(data, fraction, seed)?;
    if test.is_empty() {
        return Err(invalid("split leaves no test samples"));
    }
    Ok((data.subset(&train)?, data.subset(&test)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub dims: Vec<usize>,
    pub n_classes: usize,
    pub samples_per_class: usize,
    /// Standard deviation of the entries of each class mean tensor.
    pub class_mean_scale: f64,
    /// Standard deviation of the isotropic within-class noise.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(invalid(format!("invalid dims {:?}", self.dims)));
        }
        if self.n_classes == 0 || self.samples_per_class == 0 {
            return Err(invalid("classes and samples per class must be positive"));
        }
        if !(self.class_mean_scale > 0.0 && self.class_mean_scale.is_finite()) {
            return Err(invalid("class mean scale must be positive"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(invalid("noise sigma must be >= 0"));
        }
        Ok(())
    }
}

/// Class-grouped samples: for each class a mean tensor with entries drawn from
/// `N(0, scale^2)`, then `samples_per_class` draws of `mean + N(0, sigma^2)`.
pub fn synth_generate(spec: &SynthSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let len: usize = spec.dims.iter().product();
    let mut samples = Vec::with_capacity(spec.n_classes * spec.samples_per_class);
    let mut labels = Vec::with_capacity(samples.capacity());
    for class in 1..=spec.n_classes {
        let mean: Vec<f64> = (0..len)
            .map(|_| spec.class_mean_scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        for _ in 0..spec.samples_per_class {
            let data = mean
                .iter()
                .map(|m| m + spec.noise_sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            samples.push(Tensor::new(spec.dims.clone(), data)?);
            labels.push(class);
        }
    }
    LabeledDataset::new(samples, labels, spec.n_classes)
}
