//! Ranking and classification metrics.
//!
//! Verification ranks every test sample by its similarity to a model's
//! positive-class mean and reports average precision (AP), then the mean over
//! models (mAP). Classification uses the one-vs-rest argmax rule and reports
//! accuracy with macro-averaged precision, recall and F1.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::discriminant::DiscriminantModel;
use crate::error::{invalid, Result};
use crate::tensor::Tensor;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSample {
    pub score: f64,
    pub is_positive: bool,
}

/// Non-interpolated AP: the mean of precision@r over the ranks r of the
/// positives. Scores are sorted descending with ties kept in input order.
pub fn average_precision(scored: &[ScoredSample]) -> Result<f64> {
    if let Some(s) = scored.iter().find(|s| !s.score.is_finite()) {
        return Err(invalid(format!("non-finite score {}", s.score)));
    }
    let n_pos = scored.iter().filter(|s| s.is_positive).count();
    if n_pos == 0 {
        return Err(invalid("average precision needs at least one positive"));
    }
    let mut ranked: Vec<&ScoredSample> = scored.iter().collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    let mut hits = 0usize;
    let mut sum = DoubleDouble::default();
    for (i, s) in ranked.iter().enumerate() {
        if s.is_positive {
            hits += 1;
            sum.add_quotient(hits as f64, (i + 1) as f64);
        }
    }
    Ok(sum.div(n_pos as f64))
}

/// Unevaluated sum `hi + lo`; keeps AP correctly rounded for hand-checkable
/// fixtures such as (1 + 2/3) / 2 = 5/6.
#[derive(Debug, Default, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn add_quotient(&mut self, num: f64, den: f64) {
        let q = num / den;
        let q_lo = (-q).mul_add(den, num) / den;
        let s = self.hi + q;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (q - bb);
        let lo = err + self.lo + q_lo;
        self.hi = s + lo;
        self.lo = lo - (self.hi - s);
    }

    fn div(self, den: f64) -> f64 {
        let q = self.hi / den;
        let rem = (-q).mul_add(den, self.hi) + self.lo;
        q + rem / den
    }
}

pub fn mean_average_precision(aps: &[f64]) -> Result<f64> {
    if aps.is_empty() {
        return Err(invalid("mean average precision of an empty list"));
    }
    Ok(aps.iter().sum::<f64>() / aps.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    /// `confusion[t - 1][p - 1]` counts true class `t` predicted as `p`.
    pub confusion: Vec<Vec<usize>>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Macro averages run over all `n_classes`; a 0/0 precision or recall counts
/// as 0.
pub fn classification_report(
    true_labels: &[usize],
    predicted: &[usize],
    n_classes: usize,
) -> Result<ClassificationReport> {
    if true_labels.len() != predicted.len() {
        return Err(invalid(format!(
            "{} true labels but {} predictions",
            true_labels.len(),
            predicted.len()
        )));
    }
    if true_labels.is_empty() || n_classes == 0 {
        return Err(invalid("classification report needs labels and classes"));
    }
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for (&t, &p) in true_labels.iter().zip(predicted) {
        for l in [t, p] {
            if l == 0 || l > n_classes {
                return Err(invalid(format!("label {l} outside 1..={n_classes}")));
            }
        }
        confusion[t - 1][p - 1] += 1;
    }
    let correct: usize = (0..n_classes).map(|c| confusion[c][c]).sum();
    let per_class: Vec<ClassMetrics> = (0..n_classes)
        .map(|c| {
            let tp = confusion[c][c];
            let predicted_c: usize = confusion.iter().map(|row| row[c]).sum();
            let support: usize = confusion[c].iter().sum();
            let precision = ratio(tp, predicted_c);
            let recall = ratio(tp, support);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                class: c + 1,
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect();
    let macro_of =
        |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / n_classes as f64;
    Ok(ClassificationReport {
        accuracy: ratio(correct, true_labels.len()),
        macro_precision: macro_of(|m| m.precision),
        macro_recall: macro_of(|m| m.recall),
        macro_f1: macro_of(|m| m.f1),
        per_class,
        confusion,
    })
}

/// One-vs-rest decision: the positive class of the highest-scoring model,
/// lowest class id on ties.
pub fn predict_class(models: &[DiscriminantModel], sample: &Tensor) -> Result<usize> {
    let scorers = models
        .iter()
        .map(|m| m.scorer())
        .collect::<Result<Vec<_>>>()?;
    predict_with(models, &scorers, sample)
}

fn predict_with(
    models: &[DiscriminantModel],
    scorers: &[crate::discriminant::Scorer<'_>],
    sample: &Tensor,
) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (m, s) in models.iter().zip(scorers) {
        let class = m
            .positive_class
            .ok_or_else(|| invalid("model has no positive class"))?;
        let score = s.score(sample)?;
        best = match best {
            Some((c, b)) if b > score || (b == score && c < class) => Some((c, b)),
            _ => Some((class, score)),
        };
    }
    best.map(|(c, _)| c)
        .ok_or_else(|| invalid("predict_class needs at least one model"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelAp {
    pub positive_class: usize,
    pub ap: f64,
    pub n_positive: usize,
    pub n_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub per_model: Vec<ModelAp>,
    pub map: f64,
}

/// AP of every class-specific model on `data`, positives being the samples
/// labeled with the model's positive class.
pub fn verify(models: &[DiscriminantModel], data: &LabeledDataset) -> Result<VerificationReport> {
    let mut per_model = Vec::with_capacity(models.len());
    for model in models {
        let positive = model
            .positive_class
            .ok_or_else(|| invalid("verification needs class-specific models"))?;
        let scorer = model.scorer()?;
        let scored = data
            .iter()
            .map(|(t, l)| {
                Ok(ScoredSample {
                    score: scorer.score(t)?,
                    is_positive: l == positive,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        per_model.push(ModelAp {
            positive_class: positive,
            ap: average_precision(&scored)?,
            n_positive: scored.iter().filter(|s| s.is_positive).count(),
            n_total: scored.len(),
        });
    }
    let aps: Vec<f64> = per_model.iter().map(|m| m.ap).collect();
    Ok(VerificationReport {
        map: mean_average_precision(&aps)?,
        per_model,
    })
}

/// Predicts every sample of `data` with the one-vs-rest rule and scores the
/// predictions.
pub fn classify(
    models: &[DiscriminantModel],
    data: &LabeledDataset,
) -> Result<ClassificationReport> {
    let scorers = models
        .iter()
        .map(|m| m.scorer())
        .collect::<Result<Vec<_>>>()?;
    let predicted = data
        .samples()
        .iter()
        .map(|t| predict_with(models, &scorers, t))
        .collect::<Result<Vec<_>>>()?;
    classification_report(data.labels(), &predicted, data.n_classes())
}

/// Mean and sample standard deviation across folds or repeats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl FoldSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("no values to summarize"));
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, std, n })
    }
}

impl std::fmt::Display for FoldSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Verify,
    Classify,
}

/// The document written by `mcsda eval --report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: u32,
    pub task: Task,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verification: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<ClassificationReport>,
}
