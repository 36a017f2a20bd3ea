//! LDA, CSDA, MDA and MCSDA training and projection.
//!
//! Vector methods (LDA, CSDA) flatten each sample in storage order and learn a
//! single `D x d` matrix. Tensor methods (MDA, MCSDA) learn one `I_k x I'_k`
//! matrix per mode by alternating ratio-trace updates, sweeping the modes in
//! ascending order and always using the freshest matrices of the other modes.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{invalid, Error, Result};
use crate::linalg::{
    column_space_projector, column_space_projector_lenient, gram, solve_ratio_trace, ScatterPair,
};
use crate::tensor::{multi_project, multi_project_except, unfold, Matrix, ProjectionSet, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lda,
    Csda,
    Mda,
    Mcsda,
}

impl Method {
    /// Vector methods flatten samples and learn one projection matrix.
    pub fn is_vector(self) -> bool {
        matches!(self, Method::Lda | Method::Csda)
    }

    pub fn is_class_specific(self) -> bool {
        matches!(self, Method::Csda | Method::Mcsda)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Lda => "lda",
            Method::Csda => "csda",
            Method::Mda => "mda",
            Method::Mcsda => "mcsda",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lda" => Ok(Method::Lda),
            "csda" => Ok(Method::Csda),
            "mda" => Ok(Method::Mda),
            "mcsda" => Ok(Method::Mcsda),
            other => Err(invalid(format!("unknown method {other:?}"))),
        }
    }
}

/// Starting point of the alternating updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Every entry 1.
    #[default]
    Ones,
    /// First `I'_k` columns of the identity.
    IdentitySlice,
}

impl Init {
    fn matrix(self, rows: usize, cols: usize) -> Matrix {
        match self {
            Init::Ones => Matrix::from_element(rows, cols, 1.0),
            Init::IdentitySlice => Matrix::identity(rows, cols),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Added to the diagonal of the denominator scatter.
    pub lambda: f64,
    pub max_iter: usize,
    pub eps: f64,
    /// `I'_1..I'_K` for tensor methods, a single `d` for vector methods.
    pub subspace_dims: Vec<usize>,
    pub init: Init,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(subspace_dims: Vec<usize>) -> Self {
        Self {
            lambda: 0.01,
            max_iter: 20,
            eps: 1e-5,
            subspace_dims,
            init: Init::Ones,
            seed: 0,
        }
    }

    fn validate_common(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(invalid(format!("eps must be > 0, got {}", self.eps)));
        }
        Ok(())
    }

    fn tensor_dims(&self, input: &[usize]) -> Result<Vec<usize>> {
        self.validate_common()?;
        if self.subspace_dims.len() != input.len() {
            return Err(invalid(format!(
                "{} subspace dims for {}-mode data",
                self.subspace_dims.len(),
                input.len()
            )));
        }
        for (k, (&s, &i)) in self.subspace_dims.iter().zip(input).enumerate() {
            if s == 0 || s > i {
                return Err(invalid(format!(
                    "subspace dim {s} for mode {k} not in 1..={i}"
                )));
            }
        }
        Ok(self.subspace_dims.clone())
    }

    fn vector_dim(&self, input_len: usize) -> Result<usize> {
        self.validate_common()?;
        match self.subspace_dims.as_slice() {
            &[d] if d >= 1 && d <= input_len => Ok(d),
            &[d] => Err(invalid(format!("subspace dim {d} not in 1..={input_len}"))),
            other => Err(invalid(format!(
                "vector methods take a scalar subspace dimension, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitReport {
    /// Criterion value after each sweep (a single entry for vector methods).
    pub objective_trace: Vec<f64>,
    /// Subspace change after each sweep; empty for non-iterative methods.
    pub convergence_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    pub wall_time_seconds: f64,
    pub parameter_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStatistics {
    pub counts: Vec<usize>,
    pub class_means: Vec<Tensor>,
    pub total_mean: Tensor,
    pub positive_mean: Option<Tensor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantModel {
    pub method: Method,
    pub input_dims: Vec<usize>,
    pub projections: ProjectionSet,
    /// Positive-class mean used for scoring; absent for multi-class fits.
    pub reference_mean: Option<Tensor>,
    /// Retained class means of multi-class fits.
    pub class_means: Vec<Tensor>,
    pub positive_class: Option<usize>,
    pub config: TrainConfig,
    pub fit_report: FitReport,
}

impl DiscriminantModel {
    pub fn subspace_dims(&self) -> Vec<usize> {
        self.projections.iter().map(|w| w.ncols()).collect()
    }

    pub fn project(&self, sample: &Tensor) -> Result<Tensor> {
        if sample.dims() != self.input_dims.as_slice() {
            return Err(invalid(format!(
                "sample dims {:?} do not match model input dims {:?}",
                sample.dims(),
                self.input_dims
            )));
        }
        if self.method.is_vector() {
            multi_project(&sample.vectorized(), &self.projections)
        } else {
            multi_project(sample, &self.projections)
        }
    }

    /// `1 / (1 + d)` with `d` the distance to the reference mean in the
    /// learned subspace.
    pub fn similarity_score(&self, sample: &Tensor) -> Result<f64> {
        self.scorer()?.score(sample)
    }

    /// Caches the projected reference mean for repeated scoring.
    pub fn scorer(&self) -> Result<Scorer<'_>> {
        let mean = self.reference_mean.as_ref().ok_or_else(|| {
            Error::InvalidState(format!(
                "{} model has no reference mean to score against",
                self.method.name()
            ))
        })?;
        Ok(Scorer {
            model: self,
            projected_mean: self.project(mean)?,
        })
    }
}

pub struct Scorer<'a> {
    model: &'a DiscriminantModel,
    projected_mean: Tensor,
}

impl Scorer<'_> {
    pub fn distance(&self, sample: &Tensor) -> Result<f64> {
        Ok(self
            .model
            .project(sample)?
            .sub(&self.projected_mean)
            .frobenius_norm())
    }

    pub fn score(&self, sample: &Tensor) -> Result<f64> {
        Ok(1.0 / (1.0 + self.distance(sample)?))
    }
}

/// `sum_k I_k I'_k` for tensor methods, `prod I_k * prod I'_k` for vector ones.
pub fn parameter_count(method: Method, input_dims: &[usize], subspace_dims: &[usize]) -> usize {
    if method.is_vector() {
        input_dims.iter().product::<usize>() * subspace_dims.iter().product::<usize>()
    } else {
        input_dims
            .iter()
            .zip(subspace_dims)
            .map(|(i, s)| i * s)
            .sum()
    }
}

fn mean_of<'a>(dims: &[usize], samples: impl Iterator<Item = &'a Tensor>) -> Option<Tensor> {
    let mut sum = vec![0.0; dims.iter().product()];
    let mut n = 0usize;
    for s in samples {
        for (acc, v) in sum.iter_mut().zip(s.data()) {
            *acc += v;
        }
        n += 1;
    }
    if n == 0 {
        return None;
    }
    let inv = n as f64;
    Some(Tensor::new(dims.to_vec(), sum.into_iter().map(|v| v / inv).collect()).expect("dims"))
}

fn positive_mean(data: &LabeledDataset, positive: usize) -> Result<Tensor> {
    if positive == 0 || positive > data.n_classes() {
        return Err(invalid(format!(
            "positive class {positive} outside 1..={}",
            data.n_classes()
        )));
    }
    let n_pos = data.labels().iter().filter(|&&l| l == positive).count();
    if n_pos == 0 {
        return Err(invalid(format!("positive class {positive} is empty")));
    }
    if n_pos == data.len() {
        return Err(invalid(format!(
            "every sample belongs to positive class {positive}; no negatives"
        )));
    }
    Ok(mean_of(
        data.dims(),
        data.iter().filter(|(_, l)| *l == positive).map(|(t, _)| t),
    )
    .expect("non-empty"))
}

pub fn class_statistics(data: &LabeledDataset, positive: Option<usize>) -> Result<ClassStatistics> {
    let counts = data.class_counts();
    let mut class_means = Vec::with_capacity(data.n_classes());
    for class in 1..=data.n_classes() {
        let mean = mean_of(
            data.dims(),
            data.iter().filter(|(_, l)| *l == class).map(|(t, _)| t),
        )
        .ok_or_else(|| invalid(format!("class {class} is empty")))?;
        class_means.push(mean);
    }
    let total_mean = mean_of(data.dims(), data.samples().iter()).expect("non-empty dataset");
    let positive_mean = match positive {
        Some(p) if p == 0 || p > data.n_classes() => {
            return Err(invalid(format!(
                "positive class {p} outside 1..={}",
                data.n_classes()
            )))
        }
        Some(p) => Some(class_means[p - 1].clone()),
        None => None,
    };
    Ok(ClassStatistics {
        counts,
        class_means,
        total_mean,
        positive_mean,
    })
}

/// Stacks `vectors` as the columns of a `rows x n` matrix.
fn columns<'a>(rows: usize, vectors: impl ExactSizeIterator<Item = &'a [f64]>) -> Matrix {
    let n = vectors.len();
    let mut data = Vec::with_capacity(rows * n);
    for v in vectors {
        data.extend_from_slice(v);
    }
    Matrix::from_vec(rows, n, data)
}

/// Out-of-class / in-class scatters of the flattened samples around the
/// positive-class mean.
pub fn csda_scatters(data: &LabeledDataset, positive: usize) -> Result<ScatterPair> {
    let mean = positive_mean(data, positive)?;
    let rows = mean.len();
    let (pos, neg): (Vec<_>, Vec<_>) = data
        .iter()
        .map(|(t, l)| (t.sub(&mean), l))
        .partition(|(_, l)| *l == positive);
    let outer = columns(rows, neg.iter().map(|(t, _)| t.data()));
    let inner = columns(rows, pos.iter().map(|(t, _)| t.data()));
    ScatterPair::new(gram(&outer), gram(&inner))
}

/// Between-class / within-class scatters of the flattened samples.
pub fn lda_scatters(data: &LabeledDataset) -> Result<ScatterPair> {
    let stats = class_statistics(data, None)?;
    let rows = stats.total_mean.len();
    let between: Vec<Tensor> = stats
        .class_means
        .iter()
        .zip(&stats.counts)
        .map(|(m, &n)| scaled(&m.sub(&stats.total_mean), (n as f64).sqrt()))
        .collect();
    let within: Vec<Tensor> = data
        .iter()
        .map(|(t, l)| t.sub(&stats.class_means[l - 1]))
        .collect();
    ScatterPair::new(
        gram(&columns(rows, between.iter().map(Tensor::data))),
        gram(&columns(rows, within.iter().map(Tensor::data))),
    )
}

fn scaled(t: &Tensor, c: f64) -> Tensor {
    Tensor::new(t.dims().to_vec(), t.data().iter().map(|v| v * c).collect()).expect("dims")
}

/// `sum_j U_j U_j^T` with `U_j` the mode-k unfolding of `t_j` projected on
/// every other mode.
fn mode_scatter<'a>(
    tensors: impl Iterator<Item = &'a Tensor>,
    ws: &[Matrix],
    k: usize,
    rows: usize,
) -> Result<Matrix> {
    let mut blocks = Vec::new();
    for t in tensors {
        let projected = multi_project_except(t, ws, k)?;
        blocks.push(unfold(&projected, k)?);
    }
    if blocks.is_empty() {
        return Ok(Matrix::zeros(rows, rows));
    }
    let ncols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut stacked = Matrix::zeros(rows, ncols);
    let mut c = 0;
    for b in &blocks {
        stacked.columns_mut(c, b.ncols()).copy_from(b);
        c += b.ncols();
    }
    Ok(gram(&stacked))
}

fn check_side_projections(dims: &[usize], ws: &[Matrix], k: usize) -> Result<()> {
    if ws.len() != dims.len() {
        return Err(invalid(format!(
            "{} projection matrices for {}-mode data",
            ws.len(),
            dims.len()
        )));
    }
    if k >= dims.len() {
        return Err(invalid(format!("mode {k} out of range")));
    }
    for (q, (w, &d)) in ws.iter().zip(dims).enumerate() {
        if q != k && w.nrows() != d {
            return Err(invalid(format!(
                "projection {q} has {} rows, mode dimension is {d}",
                w.nrows()
            )));
        }
    }
    Ok(())
}

/// Replaces the (ignored) mode-k matrix by an identity so shape checks on
/// the side projections do not depend on it.
fn with_identity_at(ws: &[Matrix], dims: &[usize], k: usize) -> Vec<Matrix> {
    let mut out = ws.to_vec();
    out[k] = Matrix::identity(dims[k], dims[k]);
    out
}

/// Mode-k out-of-class / in-class scatters around the positive mean with all
/// other modes projected by `ws`.
pub fn mode_k_class_specific_scatters(
    data: &LabeledDataset,
    positive: usize,
    ws: &[Matrix],
    k: usize,
) -> Result<ScatterPair> {
    check_side_projections(data.dims(), ws, k)?;
    let mean = positive_mean(data, positive)?;
    let centered: Vec<(Tensor, bool)> = data
        .iter()
        .map(|(t, l)| (t.sub(&mean), l == positive))
        .collect();
    class_specific_mode_pair(
        &centered,
        &with_identity_at(ws, data.dims(), k),
        k,
        data.dims()[k],
    )
}

fn class_specific_mode_pair(
    centered: &[(Tensor, bool)],
    ws: &[Matrix],
    k: usize,
    rows: usize,
) -> Result<ScatterPair> {
    let outer = mode_scatter(centered.iter().filter(|c| !c.1).map(|c| &c.0), ws, k, rows)?;
    let inner = mode_scatter(centered.iter().filter(|c| c.1).map(|c| &c.0), ws, k, rows)?;
    ScatterPair::new(outer, inner)
}

/// Mode-k between-class / within-class scatters with all other modes
/// projected by `ws`.
pub fn mode_k_multiclass_scatters(
    data: &LabeledDataset,
    ws: &[Matrix],
    k: usize,
) -> Result<ScatterPair> {
    check_side_projections(data.dims(), ws, k)?;
    let prepared = MulticlassTerms::new(data)?;
    prepared.mode_pair(&with_identity_at(ws, data.dims(), k), k, data.dims()[k])
}

struct MulticlassTerms {
    // sqrt(n_i) (M_i - M)
    between: Vec<Tensor>,
    // X_j - M_{l_j}
    within: Vec<Tensor>,
}

impl MulticlassTerms {
    fn new(data: &LabeledDataset) -> Result<Self> {
        let stats = class_statistics(data, None)?;
        let between = stats
            .class_means
            .iter()
            .zip(&stats.counts)
            .map(|(m, &n)| scaled(&m.sub(&stats.total_mean), (n as f64).sqrt()))
            .collect();
        let within = data
            .iter()
            .map(|(t, l)| t.sub(&stats.class_means[l - 1]))
            .collect();
        Ok(Self { between, within })
    }

    fn mode_pair(&self, ws: &[Matrix], k: usize, rows: usize) -> Result<ScatterPair> {
        ScatterPair::new(
            mode_scatter(self.between.iter(), ws, k, rows)?,
            mode_scatter(self.within.iter(), ws, k, rows)?,
        )
    }

    fn objective(&self, ws: &[Matrix]) -> Result<f64> {
        ratio_of_projected(self.between.iter(), self.within.iter(), ws)
    }
}

fn ratio_of_projected<'a>(
    numerator: impl Iterator<Item = &'a Tensor>,
    denominator: impl Iterator<Item = &'a Tensor>,
    ws: &[Matrix],
) -> Result<f64> {
    let mut num = 0.0;
    for t in numerator {
        num += multi_project(t, ws)?.squared_norm();
    }
    let mut den = 0.0;
    for t in denominator {
        den += multi_project(t, ws)?.squared_norm();
    }
    Ok(num / den)
}

/// Out-of-class over in-class squared distance to the positive mean after
/// projecting every mode with `ws`.
pub fn class_specific_objective(
    data: &LabeledDataset,
    positive: usize,
    ws: &[Matrix],
) -> Result<f64> {
    let mean = positive_mean(data, positive)?;
    let centered: Vec<(Tensor, bool)> = data
        .iter()
        .map(|(t, l)| (t.sub(&mean), l == positive))
        .collect();
    class_specific_ratio(&centered, ws)
}

fn class_specific_ratio(centered: &[(Tensor, bool)], ws: &[Matrix]) -> Result<f64> {
    ratio_of_projected(
        centered.iter().filter(|c| !c.1).map(|c| &c.0),
        centered.iter().filter(|c| c.1).map(|c| &c.0),
        ws,
    )
}

/// Between-class over within-class distance after projecting every mode.
pub fn multiclass_objective(data: &LabeledDataset, ws: &[Matrix]) -> Result<f64> {
    MulticlassTerms::new(data)?.objective(ws)
}

/// `sum_k ||P(curr_k) - P(prev_k)||_F` where `P` is the orthogonal projector
/// onto a matrix's column space. Zero iff every mode spans the same subspace.
pub fn convergence_metric(prev: &[Matrix], curr: &[Matrix]) -> Result<f64> {
    subspace_change(prev, curr, false)
}

fn subspace_change(prev: &[Matrix], curr: &[Matrix], lenient_prev: bool) -> Result<f64> {
    if prev.len() != curr.len() {
        return Err(invalid("projection sets have different mode counts"));
    }
    let mut total = 0.0;
    for (k, (p, c)) in prev.iter().zip(curr).enumerate() {
        if p.shape() != c.shape() {
            return Err(invalid(format!("mode {k} projection shapes differ")));
        }
        let pc = column_space_projector(c).ok_or(Error::RankDeficient { mode: k })?;
        let pp = match column_space_projector(p) {
            Some(pp) => pp,
            None if lenient_prev => column_space_projector_lenient(p),
            None => return Err(Error::RankDeficient { mode: k }),
        };
        total += (pc - pp).norm();
    }
    Ok(total)
}

/// Alternating per-mode ratio-trace updates shared by MDA and MCSDA.
fn alternate(
    dims: &[usize],
    config: &TrainConfig,
    subspace: &[usize],
    mut pair_for_mode: impl FnMut(&[Matrix], usize) -> Result<ScatterPair>,
    mut objective: impl FnMut(&[Matrix]) -> Result<f64>,
) -> Result<(ProjectionSet, FitReport)> {
    let mut ws: ProjectionSet = dims
        .iter()
        .zip(subspace)
        .map(|(&i, &s)| config.init.matrix(i, s))
        .collect();
    let mut report = FitReport::default();
    for sweep in 1..=config.max_iter {
        let prev = ws.clone();
        for k in 0..dims.len() {
            let pair = pair_for_mode(&ws, k)?;
            ws[k] = solve_ratio_trace(&pair, subspace[k], config.lambda)?.vectors;
        }
        report.objective_trace.push(objective(&ws)?);
        // only the initialization can be rank deficient
        let change = subspace_change(&prev, &ws, sweep == 1)?;
        report.convergence_trace.push(change);
        report.iterations_run = sweep;
        log::debug!(
            "sweep {sweep}: objective {:.6e}, subspace change {change:.3e}",
            report.objective_trace.last().unwrap()
        );
        if change <= config.eps {
            report.converged = true;
            break;
        }
    }
    Ok((ws, report))
}

pub fn fit_mcsda(
    data: &LabeledDataset,
    positive: usize,
    config: &TrainConfig,
) -> Result<DiscriminantModel> {
    let start = Instant::now();
    let subspace = config.tensor_dims(data.dims())?;
    let mean = positive_mean(data, positive)?;
    let centered: Vec<(Tensor, bool)> = data
        .iter()
        .map(|(t, l)| (t.sub(&mean), l == positive))
        .collect();
    let (projections, mut report) = alternate(
        data.dims(),
        config,
        &subspace,
        |ws, k| class_specific_mode_pair(&centered, ws, k, data.dims()[k]),
        |ws| class_specific_ratio(&centered, ws),
    )?;
    report.parameter_count = parameter_count(Method::Mcsda, data.dims(), &subspace);
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(DiscriminantModel {
        method: Method::Mcsda,
        input_dims: data.dims().to_vec(),
        projections,
        reference_mean: Some(mean),
        class_means: Vec::new(),
        positive_class: Some(positive),
        config: config.clone(),
        fit_report: report,
    })
}

/// Multi-class tensor discriminant analysis over all classes of `data`.
pub fn fit_mda(data: &LabeledDataset, config: &TrainConfig) -> Result<DiscriminantModel> {
    let start = Instant::now();
    let subspace = config.tensor_dims(data.dims())?;
    if data.n_classes() < 2 {
        return Err(invalid("MDA needs at least two classes"));
    }
    let terms = MulticlassTerms::new(data)?;
    let (projections, mut report) = alternate(
        data.dims(),
        config,
        &subspace,
        |ws, k| terms.mode_pair(ws, k, data.dims()[k]),
        |ws| terms.objective(ws),
    )?;
    report.parameter_count = parameter_count(Method::Mda, data.dims(), &subspace);
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(DiscriminantModel {
        method: Method::Mda,
        input_dims: data.dims().to_vec(),
        projections,
        reference_mean: None,
        class_means: class_statistics(data, None)?.class_means,
        positive_class: None,
        config: config.clone(),
        fit_report: report,
    })
}

/// Binary MDA of `positive` against the rest, scored against the positive
/// mean like the class-specific methods.
pub fn fit_mda_one_vs_rest(
    data: &LabeledDataset,
    positive: usize,
    config: &TrainConfig,
) -> Result<DiscriminantModel> {
    let mean = positive_mean(data, positive)?;
    let mut model = fit_mda(&data.one_vs_rest(positive)?, config)?;
    model.reference_mean = Some(mean);
    model.positive_class = Some(positive);
    Ok(model)
}

pub fn fit_csda(
    data: &LabeledDataset,
    positive: usize,
    config: &TrainConfig,
) -> Result<DiscriminantModel> {
    let start = Instant::now();
    let input_len = data.dims().iter().product();
    let d = config.vector_dim(input_len)?;
    let mean = positive_mean(data, positive)?;
    let pair = csda_scatters(data, positive)?;
    let w = solve_ratio_trace(&pair, d, config.lambda)?.vectors;
    let objective = trace_ratio(&pair, &w);
    finish_vector_fit(
        Method::Csda,
        data,
        w,
        objective,
        Some(mean),
        Vec::new(),
        Some(positive),
        config,
        start,
    )
}

/// Multi-class LDA; `d` must not exceed `C - 1`.
pub fn fit_lda(data: &LabeledDataset, config: &TrainConfig) -> Result<DiscriminantModel> {
    let start = Instant::now();
    let input_len = data.dims().iter().product();
    let d = config.vector_dim(input_len)?;
    if d + 1 > data.n_classes() {
        return Err(invalid(format!(
            "LDA subspace dim {d} exceeds C - 1 = {}",
            data.n_classes() - 1
        )));
    }
    let pair = lda_scatters(data)?;
    let w = solve_ratio_trace(&pair, d, config.lambda)?.vectors;
    let objective = trace_ratio(&pair, &w);
    let means = class_statistics(data, None)?.class_means;
    finish_vector_fit(
        Method::Lda,
        data,
        w,
        objective,
        None,
        means,
        None,
        config,
        start,
    )
}

pub fn fit_lda_one_vs_rest(
    data: &LabeledDataset,
    positive: usize,
    config: &TrainConfig,
) -> Result<DiscriminantModel> {
    let mean = positive_mean(data, positive)?;
    let mut model = fit_lda(&data.one_vs_rest(positive)?, config)?;
    model.reference_mean = Some(mean);
    model.positive_class = Some(positive);
    Ok(model)
}

fn trace_ratio(pair: &ScatterPair, w: &Matrix) -> f64 {
    let num = (w.transpose() * &pair.numerator * w).trace();
    let den = (w.transpose() * &pair.denominator * w).trace();
    num / den
}

#[allow(clippy::too_many_arguments)]
fn finish_vector_fit(
    method: Method,
    data: &LabeledDataset,
    w: Matrix,
    objective: f64,
    reference_mean: Option<Tensor>,
    class_means: Vec<Tensor>,
    positive_class: Option<usize>,
    config: &TrainConfig,
    start: Instant,
) -> Result<DiscriminantModel> {
    let report = FitReport {
        objective_trace: vec![objective],
        convergence_trace: Vec::new(),
        iterations_run: 1,
        converged: true,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        parameter_count: parameter_count(method, data.dims(), &[w.ncols()]),
    };
    Ok(DiscriminantModel {
        method,
        input_dims: data.dims().to_vec(),
        projections: vec![w],
        reference_mean,
        class_means,
        positive_class,
        config: config.clone(),
        fit_report: report,
    })
}

/// Trains `method` for one positive class. Multi-class methods are wrapped
/// one-vs-rest.
pub fn fit_class_model(
    method: Method,
    data: &LabeledDataset,
    positive: usize,
    config: &TrainConfig,
) -> Result<DiscriminantModel> {
    match method {
        Method::Csda => fit_csda(data, positive, config),
        Method::Mcsda => fit_mcsda(data, positive, config),
        Method::Mda => fit_mda_one_vs_rest(data, positive, config),
        Method::Lda => fit_lda_one_vs_rest(data, positive, config),
    }
}

/// Largest principal angle (radians) between the column spaces of `a` and `b`.
pub fn max_principal_angle(a: &Matrix, b: &Matrix) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    // sin of the largest angle is the norm of the part of qb outside span(qa)
    let residual = &qb - &qa * (qa.transpose() * &qb);
    let sin = residual.singular_values().max().clamp(0.0, 1.0);
    sin.asin()
}
