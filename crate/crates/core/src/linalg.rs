//! Small dense helpers shared across modules. Heavy lifting (Cholesky,
//! symmetric eigendecomposition, matrix products) goes through `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cholesky factorization returning `(inverse, log det)` of an SPD matrix.
pub fn spd_inverse_logdet(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("matrix is not positive definite".into()))?;
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    Ok((chol.inverse(), log_det))
}

/// `phi^T m phi` for a symmetric `m`.
pub fn quad_form(m: &DMatrix<f64>, phi: &[f64]) -> f64 {
    let v = DVector::from_column_slice(phi);
    v.dot(&(m * &v))
}
