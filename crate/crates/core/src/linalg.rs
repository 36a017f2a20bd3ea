//! Regularized ratio-trace eigensolver.
//!
//! Every discriminant method in the crate reduces to the same step: take a
//! (numerator, denominator) pair of scatter matrices, add `lambda * I` to the
//! denominator and keep the top generalized eigenvectors. The pair is reduced
//! to a standard symmetric problem through the Cholesky factor of the
//! regularized denominator.

use nalgebra::SymmetricEigen;

use crate::error::{invalid, Error, Result};
use crate::tensor::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPair {
    pub numerator: Matrix,
    pub denominator: Matrix,
}

impl ScatterPair {
    pub fn new(numerator: Matrix, denominator: Matrix) -> Result<Self> {
        if !numerator.is_square() || numerator.shape() != denominator.shape() {
            return Err(invalid(format!(
                "scatter pair needs equal square matrices, got {:?} and {:?}",
                numerator.shape(),
                denominator.shape()
            )));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn dim(&self) -> usize {
        self.numerator.nrows()
    }
}

/// Generalized eigenvectors as columns, eigenvalues non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub vectors: Matrix,
    pub values: Vec<f64>,
}

pub fn regularize(s: &Matrix, lambda: f64) -> Matrix {
    let mut out = s.clone();
    for i in 0..out.nrows().min(out.ncols()) {
        out[(i, i)] += lambda;
    }
    out
}

/// Top-`d` solutions of `numerator w = value (denominator + lambda I) w`.
///
/// Columns are orthonormal in the regularized denominator's inner product and
/// each column's largest-magnitude entry is nonnegative.
pub fn solve_ratio_trace(pair: &ScatterPair, d: usize, lambda: f64) -> Result<EigenBasis> {
    let n = pair.dim();
    if d == 0 || d > n {
        return Err(invalid(format!("subspace dimension {d} not in 1..={n}")));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(invalid(format!(
            "regularizer must be finite and >= 0, got {lambda}"
        )));
    }
    let denom = regularize(&pair.denominator, lambda);
    let l = cholesky(&denom)?;
    let l_inv = lower_triangular_inverse(&l);

    let mut reduced = &l_inv * &pair.numerator * l_inv.transpose();
    symmetrize(&mut reduced);
    let eig = SymmetricEigen::new(reduced);

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep the solver's order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(d);

    let mut top = Matrix::zeros(n, d);
    for (c, &src) in order.iter().enumerate() {
        top.set_column(c, &eig.eigenvectors.column(src));
    }
    let mut vectors = l_inv.transpose() * top;
    fix_signs(&mut vectors);
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    Ok(EigenBasis { vectors, values })
}

/// Flips each column so that its entry of largest magnitude is nonnegative.
pub(crate) fn fix_signs(m: &mut Matrix) {
    for mut col in m.column_iter_mut() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &v in col.iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            col.neg_mut();
        }
    }
}

pub(crate) fn symmetrize(m: &mut Matrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Lower Cholesky factor `L` with `a = L L^T`. Only the lower triangle of `a`
/// is read.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(invalid("cholesky needs a square matrix"));
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::NotPositiveDefinite {
                pivot: j,
                value: diag,
            });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        // column j below the diagonal: l[i,j] = (a[i,j] - sum_k l[i,k] l[j,k]) / ljj
        let mut col: Vec<f64> = (j + 1..n).map(|i| a[(i, j)]).collect();
        for k in 0..j {
            let ljk = l[(j, k)];
            if ljk == 0.0 {
                continue;
            }
            let lk = l.column(k);
            let src = &lk.as_slice()[j + 1..];
            for (c, s) in col.iter_mut().zip(src) {
                *c -= s * ljk;
            }
        }
        for (i, c) in (j + 1..n).zip(col) {
            l[(i, j)] = c / ljj;
        }
    }
    Ok(l)
}

/// Inverse of a nonsingular lower-triangular matrix by forward substitution
/// against the identity, column by column.
pub(crate) fn lower_triangular_inverse(l: &Matrix) -> Matrix {
    let n = l.nrows();
    let mut inv = Matrix::zeros(n, n);
    for c in 0..n {
        let mut x = vec![0.0; n];
        for k in c..n {
            let xk = if k == c { 1.0 } else { x[k] } / l[(k, k)];
            x[k] = xk;
            if xk == 0.0 {
                continue;
            }
            let lk = l.column(k);
            let lcol = &lk.as_slice()[k + 1..];
            for (xi, li) in x[k + 1..].iter_mut().zip(lcol) {
                *xi -= li * xk;
            }
        }
        inv.set_column(c, &nalgebra::DVector::from_vec(x));
    }
    inv
}

/// `B B^T`, symmetrized.
pub(crate) fn gram(b: &Matrix) -> Matrix {
    let mut s = b * b.transpose();
    symmetrize(&mut s);
    s
}

/// Orthogonal projector onto the column space of `w`, via `(w^T w)^-1`.
pub(crate) fn column_space_projector(w: &Matrix) -> Option<Matrix> {
    let gram = w.transpose() * w;
    let scale = gram.diagonal().max().max(f64::MIN_POSITIVE);
    let l = cholesky(&gram).ok()?;
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    if min_pivot <= 1e-12 * scale {
        return None;
    }
    let l_inv = lower_triangular_inverse(&l);
    let q = w * l_inv.transpose();
    Some(&q * q.transpose())
}

/// Projector onto the numerical column space of `w`, tolerating rank loss.
pub(crate) fn column_space_projector_lenient(w: &Matrix) -> Matrix {
    let svd = w.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10 * (w.nrows().max(w.ncols()) as f64);
    let mut p = Matrix::zeros(w.nrows(), w.nrows());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            let c = u.column(i);
            p += c * c.transpose();
        }
    }
    p
}
