//! Fixed-regularizer fast path: `(Phi + lambda I)^{-1}` maintained with
//! Sherman-Morrison rank-one updates and `log det` with the determinant lemma.
//! Used to replay the determinant potential without refactorizing.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug)]
pub struct FixedRidge {
    lambda: f64,
    t: usize,
    gram: DMatrix<f64>,
    inverse: DMatrix<f64>,
    log_det: f64,
}

impl FixedRidge {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 || !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("FixedRidge needs dim > 0 and lambda > 0"));
        }
        Ok(Self {
            lambda,
            t: 0,
            gram: DMatrix::zeros(dim, dim),
            inverse: DMatrix::identity(dim, dim) / lambda,
            log_det: dim as f64 * lambda.ln(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `phi^T (Phi + lambda I)^{-1} phi`.
    pub fn leverage(&self, phi: &[f64]) -> f64 {
        let v = DVector::from_column_slice(phi);
        v.dot(&(&self.inverse * &v))
    }

    /// Adds `phi phi^T`; returns the determinant growth factor `1 + phi^T M^{-1} phi`.
    pub fn push(&mut self, phi: &[f64]) -> Result<f64> {
        if phi.len() != self.gram.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.gram.nrows(),
                got: phi.len(),
            });
        }
        let v = DVector::from_column_slice(phi);
        let mv = &self.inverse * &v;
        let growth = 1.0 + v.dot(&mv);
        self.inverse.ger(-1.0 / growth, &mv, &mv, 1.0);
        self.gram.ger(1.0, &v, &v, 1.0);
        self.log_det += growth.ln();
        self.t += 1;
        Ok(growth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tracks_direct_inverse_and_determinant() {
        let mut r = FixedRidge::new(3, 0.5).unwrap();
        for phi in [[1.0, 0.0, 0.0], [0.6, 0.8, 0.0], [0.0, 0.6, 0.8], [0.0, 0.0, 1.0]] {
            r.push(&phi).unwrap();
        }
        let m = r.gram() + DMatrix::identity(3, 3) * 0.5;
        let direct = m.clone().try_inverse().unwrap();
        assert!((&direct - r.inverse()).abs().max() < 1e-12);
        assert_relative_eq!(r.log_det(), m.determinant().ln(), epsilon = 1e-12);
    }

    #[test]
    fn repeated_observation_never_increases_leverage() {
        let mut r = FixedRidge::new(2, 0.1).unwrap();
        let phi = [0.6, 0.8];
        let mut prev = r.leverage(&phi);
        for _ in 0..20 {
            r.push(&phi).unwrap();
            let q = r.leverage(&phi);
            assert!(q <= prev + 1e-15);
            prev = q;
        }
    }
}
