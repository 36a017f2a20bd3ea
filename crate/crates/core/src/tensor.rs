//! Dense K-mode tensors with mode-k unfolding, folding and mode products.
//!
//! Storage is the column-major generalization: index `i_0` varies fastest,
//! then `i_1`, and so on. Mode-k unfoldings order their columns
//! lexicographically over the remaining modes with the lowest remaining mode
//! varying fastest, so the mode-0 unfolding is a plain reshape of the data.

use crate::error::{invalid, Result};

pub type Matrix = nalgebra::DMatrix<f64>;

/// One projection matrix per mode; matrix `k` is `I_k x I'_k` and its columns
/// are projection directions.
pub type ProjectionSet = Vec<Matrix>;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(invalid("tensor needs at least one mode"));
        }
        if let Some(k) = dims.iter().position(|&d| d == 0) {
            return Err(invalid(format!("mode {k} has zero dimension")));
        }
        let len: usize = dims.iter().product();
        if len != data.len() {
            return Err(invalid(format!(
                "data length {} does not match dims {:?} (expected {len})",
                data.len(),
                dims
            )));
        }
        Ok(Self { dims, data })
    }

    /// Panics if any dimension is zero or `dims` is empty.
    pub fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        Self::new(dims, vec![0.0; len]).expect("valid dims")
    }

    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len: usize = dims.iter().product();
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for (i, d) in idx.iter_mut().zip(&dims) {
                *i += 1;
                if *i < *d {
                    break;
                }
                *i = 0;
            }
        }
        Self::new(dims, data)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len(), "index rank mismatch");
        let mut off = 0;
        let mut stride = 1;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            assert!(i < d, "index {i} out of bounds for dimension {d}");
            off += i * stride;
            stride *= d;
        }
        off
    }

    /// Same data viewed as a single-mode tensor of length `prod(dims)`.
    pub fn vectorized(&self) -> Tensor {
        Tensor {
            dims: vec![self.data.len()],
            data: self.data.clone(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.dims, other.dims, "dims mismatch in subtraction");
        Tensor {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn squared_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Splits the storage around `mode` into (left, size, right) with
    /// `offset = a + left * (i + size * b)`.
    fn split_at_mode(dims: &[usize], mode: usize) -> (usize, usize, usize) {
        let left = dims[..mode].iter().product();
        let right = dims[mode + 1..].iter().product();
        (left, dims[mode], right)
    }
}

fn check_mode(order: usize, mode: usize) -> Result<()> {
    if mode >= order {
        return Err(invalid(format!(
            "mode {mode} out of range for a {order}-mode tensor"
        )));
    }
    Ok(())
}

/// Mode-k unfolding: an `I_k x prod(I_i, i != k)` matrix whose columns are the
/// mode-k fibers.
pub fn unfold(t: &Tensor, mode: usize) -> Result<Matrix> {
    check_mode(t.order(), mode)?;
    let (left, size, right) = Tensor::split_at_mode(&t.dims, mode);
    let cols = left * right;
    let mut out = Matrix::zeros(size, cols);
    for b in 0..right {
        for i in 0..size {
            let src = &t.data[left * (i + size * b)..][..left];
            for (a, &v) in src.iter().enumerate() {
                out[(i, a + left * b)] = v;
            }
        }
    }
    Ok(out)
}

/// Inverse of [`unfold`].
pub fn fold(m: &Matrix, mode: usize, dims: &[usize]) -> Result<Tensor> {
    check_mode(dims.len(), mode)?;
    if dims.contains(&0) {
        return Err(invalid("zero dimension in fold target"));
    }
    let (left, size, right) = Tensor::split_at_mode(dims, mode);
    if m.nrows() != size || m.ncols() != left * right {
        return Err(invalid(format!(
            "cannot fold a {}x{} matrix along mode {mode} into {:?}",
            m.nrows(),
            m.ncols(),
            dims
        )));
    }
    let mut data = vec![0.0; left * size * right];
    for b in 0..right {
        for i in 0..size {
            let dst = &mut data[left * (i + size * b)..][..left];
            for (a, v) in dst.iter_mut().enumerate() {
                *v = m[(i, a + left * b)];
            }
        }
    }
    Tensor::new(dims.to_vec(), data)
}

/// Mode-k product `t x_k w` with `w` of shape `J x I_k`.
pub fn mode_product(t: &Tensor, w: &Matrix, mode: usize) -> Result<Tensor> {
    check_mode(t.order(), mode)?;
    if w.ncols() != t.dims[mode] {
        return Err(invalid(format!(
            "mode-{mode} product needs a matrix with {} columns, got {}x{}",
            t.dims[mode],
            w.nrows(),
            w.ncols()
        )));
    }
    Ok(contract(t, mode, w.nrows(), |j, i| w[(j, i)]))
}

/// Mode-k product with the transpose of `w` (`I_k x J`), without forming it.
pub(crate) fn mode_product_transposed(t: &Tensor, w: &Matrix, mode: usize) -> Result<Tensor> {
    check_mode(t.order(), mode)?;
    if w.nrows() != t.dims[mode] {
        return Err(invalid(format!(
            "mode-{mode} projection needs a matrix with {} rows, got {}x{}",
            t.dims[mode],
            w.nrows(),
            w.ncols()
        )));
    }
    Ok(contract(t, mode, w.ncols(), |j, i| w[(i, j)]))
}

fn contract(
    t: &Tensor,
    mode: usize,
    new_size: usize,
    coef: impl Fn(usize, usize) -> f64,
) -> Tensor {
    let (left, size, right) = Tensor::split_at_mode(&t.dims, mode);
    let mut dims = t.dims.clone();
    dims[mode] = new_size;
    let mut data = vec![0.0; left * new_size * right];
    for b in 0..right {
        for i in 0..size {
            let src = &t.data[left * (i + size * b)..][..left];
            for j in 0..new_size {
                let c = coef(j, i);
                if c == 0.0 {
                    continue;
                }
                let dst = &mut data[left * (j + new_size * b)..][..left];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    Tensor { dims, data }
}

fn check_projection_set(t: &Tensor, ws: &[Matrix]) -> Result<()> {
    if ws.len() != t.order() {
        return Err(invalid(format!(
            "{} projection matrices for a {}-mode tensor",
            ws.len(),
            t.order()
        )));
    }
    for (k, (w, &d)) in ws.iter().zip(&t.dims).enumerate() {
        if w.nrows() != d {
            return Err(invalid(format!(
                "projection {k} has {} rows, mode dimension is {d}",
                w.nrows()
            )));
        }
    }
    Ok(())
}

/// `t x_1 W_1^T x_2 ... x_K W_K^T`.
pub fn multi_project(t: &Tensor, ws: &[Matrix]) -> Result<Tensor> {
    check_projection_set(t, ws)?;
    let mut out = t.clone();
    for (k, w) in ws.iter().enumerate() {
        out = mode_product_transposed(&out, w, k)?;
    }
    Ok(out)
}

/// Like [`multi_project`] but leaves mode `skip` untouched.
pub fn multi_project_except(t: &Tensor, ws: &[Matrix], skip: usize) -> Result<Tensor> {
    check_projection_set(t, ws)?;
    check_mode(t.order(), skip)?;
    let mut out = t.clone();
    for (k, w) in ws.iter().enumerate().filter(|(k, _)| *k != skip) {
        out = mode_product_transposed(&out, w, k)?;
    }
    Ok(out)
}
