//! Floating-point Hermitian eigen problems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Allowed deviation `max |M − M†|` for a matrix treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Residual bound `‖Mv − λv‖` for reported eigenpairs, relative to
/// `max(1, ‖M‖)`.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub value: f64,
    #[serde(skip)]
    pub vector: DVector<Complex64>,
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dims(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let dev = hermitian_deviation(m);
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Eigenvalues (ascending) and matching unit eigenvectors as columns.
///
/// nalgebra's deflation test misbehaves when neighbouring diagonal entries
/// are exactly zero, so the matrix is shifted to be positive definite first.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let shift = sym.norm() + 1.0;
    let shifted = &sym + CMatrix::identity(n, n) * Complex64::new(shift, 0.0);
    let e = shifted.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| e.eigenvalues[i] - shift).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invariant("eigen solver returned a non-finite value".into()));
    }
    let vecs = CMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, order[c])]);
    let scale = sym.norm().max(1.0);
    for (k, &lam) in vals.iter().enumerate() {
        let v = vecs.column(k);
        let res = (&sym * v - v * Complex64::new(lam, 0.0)).norm();
        if res > RESIDUAL_TOL * scale {
            return Err(Error::Invariant(format!("eigenpair residual {res:e}")));
        }
    }
    Ok((vals, vecs))
}

pub fn min_eigen(m: &CMatrix) -> Result<EigenResult> {
    extreme(m, false)
}

pub fn max_eigen(m: &CMatrix) -> Result<EigenResult> {
    extreme(m, true)
}

fn extreme(m: &CMatrix, top: bool) -> Result<EigenResult> {
    let (vals, vecs) = eigh(m)?;
    if vals.is_empty() {
        return Err(Error::dims("empty matrix has no eigenvalues"));
    }
    let k = if top { vals.len() - 1 } else { 0 };
    Ok(EigenResult {
        value: vals[k],
        vector: vecs.column(k).into_owned(),
    })
}

/// `exp(M) / Tr exp(M)` for Hermitian `M`, computed stably.
pub fn gibbs(m: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = eigh(m)?;
    let top = vals.last().copied().unwrap_or(0.0);
    let w: Vec<f64> = vals.iter().map(|v| (v - top).exp()).collect();
    let z: f64 = w.iter().sum();
    let d = DVector::from_iterator(w.len(), w.iter().map(|x| Complex64::new(x / z, 0.0)));
    let out = &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint();
    Ok((&out + out.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Real part of `Tr(A B)`.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    s
}

/// The rank-one projector `vv†`.
pub fn projector(v: &DVector<Complex64>) -> CMatrix {
    v * v.adjoint()
}
