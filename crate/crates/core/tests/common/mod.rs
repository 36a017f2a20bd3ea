//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's scatter, unfolding or eigensolver code paths.
#![allow(dead_code)]

use mcsda::{LabeledDataset, Matrix, Tensor};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, dims: &[usize]) -> Tensor {
    let n = dims.iter().product();
    Tensor::new(dims.to_vec(), (0..n).map(|_| gaussian(rng)).collect()).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    random_matrix(rng, rows, cols).qr().q()
}

/// Every class gets at least two samples; class offsets keep the classes apart.
pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    dims: &[usize],
    n: usize,
    classes: usize,
) -> LabeledDataset {
    let offsets: Vec<Tensor> = (0..classes).map(|_| random_tensor(rng, dims)).collect();
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for j in 0..n {
        let class = if j < 2 * classes {
            j % classes
        } else {
            rng.random_range(0..classes)
        };
        let noise = random_tensor(rng, dims);
        let data = offsets[class]
            .data()
            .iter()
            .zip(noise.data())
            .map(|(o, e)| 3.0 * o + e)
            .collect();
        samples.push(Tensor::new(dims.to_vec(), data).unwrap());
        labels.push(class + 1);
    }
    LabeledDataset::new(samples, labels, classes).unwrap()
}

pub fn rel_err(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Entry of a column-major tensor at a multi-index, computed by hand.
pub fn at(t: &Tensor, idx: &[usize]) -> f64 {
    let mut off = 0;
    let mut stride = 1;
    for (i, d) in idx.iter().zip(t.dims()) {
        off += i * stride;
        stride *= d;
    }
    t.data()[off]
}

/// Calls `f` for every multi-index of `dims`.
pub fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    let total: usize = dims.iter().product();
    let mut idx = vec![0; dims.len()];
    for _ in 0..total {
        f(&idx);
        for (i, d) in idx.iter_mut().zip(dims) {
            *i += 1;
            if *i < *d {
                break;
            }
            *i = 0;
        }
    }
}

fn mean_by_loops(samples: &[&Tensor]) -> Vec<f64> {
    let len = samples[0].len();
    let mut m = vec![0.0; len];
    for s in samples {
        for (acc, v) in m.iter_mut().zip(s.data()) {
            *acc += v;
        }
    }
    for v in &mut m {
        *v /= samples.len() as f64;
    }
    m
}

pub fn class_mean(data: &LabeledDataset, class: usize) -> Vec<f64> {
    let members: Vec<&Tensor> = data
        .iter()
        .filter(|(_, l)| *l == class)
        .map(|(t, _)| t)
        .collect();
    mean_by_loops(&members)
}

pub fn total_mean(data: &LabeledDataset) -> Vec<f64> {
    mean_by_loops(&data.samples().iter().collect::<Vec<_>>())
}

/// Double loop over entries: sum_j (x_j - c_j)(x_j - c_j)^T.
fn outer_sum(rows: &[(Vec<f64>, f64)]) -> Matrix {
    let n = rows[0].0.len();
    let mut s = Matrix::zeros(n, n);
    for (v, w) in rows {
        for a in 0..n {
            for b in 0..n {
                s[(a, b)] += w * v[a] * v[b];
            }
        }
    }
    s
}

fn diff(x: &[f64], m: &[f64]) -> Vec<f64> {
    x.iter().zip(m).map(|(a, b)| a - b).collect()
}

/// (S_O, S_I) of the flattened samples around the positive mean.
pub fn brute_csda(data: &LabeledDataset, positive: usize) -> (Matrix, Matrix) {
    let mp = class_mean(data, positive);
    let neg: Vec<_> = data
        .iter()
        .filter(|(_, l)| *l != positive)
        .map(|(t, _)| (diff(t.data(), &mp), 1.0))
        .collect();
    let pos: Vec<_> = data
        .iter()
        .filter(|(_, l)| *l == positive)
        .map(|(t, _)| (diff(t.data(), &mp), 1.0))
        .collect();
    (outer_sum(&neg), outer_sum(&pos))
}

/// (S_b, S_w) of the flattened samples.
pub fn brute_lda(data: &LabeledDataset) -> (Matrix, Matrix) {
    let m = total_mean(data);
    let counts = data.class_counts();
    let between: Vec<_> = (1..=data.n_classes())
        .map(|c| (diff(&class_mean(data, c), &m), counts[c - 1] as f64))
        .collect();
    let within: Vec<_> = data
        .iter()
        .map(|(t, l)| (diff(t.data(), &class_mean(data, l)), 1.0))
        .collect();
    (outer_sum(&between), outer_sum(&within))
}

/// Projects a centered sample on every mode except `k` by summing over all
/// input indices, then accumulates the mode-k rows into a scatter.
fn projected_rows(t: &[f64], dims: &[usize], ws: &[Matrix], k: usize) -> Vec<Vec<f64>> {
    let tensor = Tensor::new(dims.to_vec(), t.to_vec()).unwrap();
    let out_dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .map(|(q, &d)| if q == k { d } else { ws[q].ncols() })
        .collect();
    let other: Vec<usize> = (0..dims.len()).filter(|&q| q != k).collect();
    let other_out: Vec<usize> = other.iter().map(|&q| out_dims[q]).collect();
    // columns: one per combination of projected indices on the other modes
    let mut cols = Vec::new();
    for_each_index(&other_out, |jdx| {
        let mut col = vec![0.0; dims[k]];
        for_each_index(dims, |idx| {
            let mut w = 1.0;
            for (p, &q) in other.iter().enumerate() {
                w *= ws[q][(idx[q], jdx[p])];
            }
            col[idx[k]] += w * at(&tensor, idx);
        });
        cols.push(col);
    });
    cols
}

fn mode_scatter(
    centered: &[Vec<f64>],
    dims: &[usize],
    ws: &[Matrix],
    k: usize,
    weight: &[f64],
) -> Matrix {
    let n = dims[k];
    let mut s = Matrix::zeros(n, n);
    for (c, w) in centered.iter().zip(weight) {
        for col in projected_rows(c, dims, ws, k) {
            for a in 0..n {
                for b in 0..n {
                    s[(a, b)] += w * col[a] * col[b];
                }
            }
        }
    }
    s
}

pub fn brute_mode_class_specific(
    data: &LabeledDataset,
    positive: usize,
    ws: &[Matrix],
    k: usize,
) -> (Matrix, Matrix) {
    let mp = class_mean(data, positive);
    let (mut neg, mut pos) = (Vec::new(), Vec::new());
    for (t, l) in data.iter() {
        let c = diff(t.data(), &mp);
        if l == positive {
            pos.push(c)
        } else {
            neg.push(c)
        }
    }
    let dims = data.dims();
    (
        mode_scatter(&neg, dims, ws, k, &vec![1.0; neg.len()]),
        mode_scatter(&pos, dims, ws, k, &vec![1.0; pos.len()]),
    )
}

pub fn brute_mode_multiclass(data: &LabeledDataset, ws: &[Matrix], k: usize) -> (Matrix, Matrix) {
    let m = total_mean(data);
    let counts = data.class_counts();
    let between: Vec<Vec<f64>> = (1..=data.n_classes())
        .map(|c| diff(&class_mean(data, c), &m))
        .collect();
    let weights: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    let within: Vec<Vec<f64>> = data
        .iter()
        .map(|(t, l)| diff(t.data(), &class_mean(data, l)))
        .collect();
    let dims = data.dims();
    (
        mode_scatter(&between, dims, ws, k, &weights),
        mode_scatter(&within, dims, ws, k, &vec![1.0; within.len()]),
    )
}

/// Random symmetric PSD matrix of size n and rank at most r.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, r: usize) -> Matrix {
    let b = random_matrix(rng, n, r);
    &b * b.transpose()
}

/// Eigenvalues of the explicitly formed `(denominator + lambda I)^-1 numerator`,
/// sorted descending, from a nonsymmetric Schur decomposition.
pub fn explicit_inverse_eigenvalues(num: &Matrix, den: &Matrix, lambda: f64) -> Vec<f64> {
    let n = num.nrows();
    let reg = den + Matrix::identity(n, n) * lambda;
    let a = reg.try_inverse().expect("invertible") * num;
    let mut vals: Vec<f64> = a.complex_eigenvalues().iter().map(|c| c.re).collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

/// Unit null vector of `A - value I` for the explicit-inverse matrix `A`.
pub fn explicit_inverse_eigenvector(
    num: &Matrix,
    den: &Matrix,
    lambda: f64,
    value: f64,
) -> DVector<f64> {
    let n = num.nrows();
    let reg = den + Matrix::identity(n, n) * lambda;
    let a = reg.try_inverse().expect("invertible") * num - Matrix::identity(n, n) * value;
    let svd = a.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .unwrap();
    v_t.row(imin).transpose()
}

/// Largest principal angle between two column spaces, via SVD of Qa^T Qb.
pub fn principal_angle(a: &Matrix, b: &Matrix) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let resid = &qb - &qa * (qa.transpose() * &qb);
    resid.singular_values().max().clamp(0.0, 1.0).asin()
}
