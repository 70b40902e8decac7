//! Exact extremes of `c . theta` over the confidence set.
//!
//! For `eps > 0` the program
//!
//! ```text
//! max c.theta  s.t.  ||theta||^2 <= 1,  ||y - A theta||^2 <= r^2
//! ```
//!
//! is solved through its Lagrangian dual in the multipliers `(l1, l2) >= 0`.
//! For fixed multipliers the inner maximizer solves
//! `(l1 I + l2 G) theta = c/2 + l2 b` with `G = A^T A`, `b = A^T y`, which is
//! diagonal in the eigenbasis of `G`. The dual is minimized by nested
//! bisection: over `l2` on the sign of `r^2 - ||y - A theta||^2`, and for each
//! `l2` over `l1` on the sign of `1 - ||theta||^2`. Both searches keep the
//! primal-feasible endpoint, so the returned `theta` satisfies both
//! constraints and the duality gap is the complementary-slackness residue.
//!
//! For `eps = 0` the residual ball collapses to the affine set of exact
//! interpolants; the extreme is the minimum-norm interpolant plus the largest
//! admissible step along the null-space projection of `c`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::ConfidenceState;
use crate::error::{Error, Result};
use crate::linalg::norm;

const BISECTION_STEPS: usize = 80;
const L2_BRACKET: f64 = 1e6;
const L2_BRACKET_CAP: f64 = 1e15;

/// One extremizer of `c . theta` over the confidence set.
#[derive(Clone, Debug, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub theta: Vec<f64>,
    /// Dual objective minus primal objective at termination.
    pub gap: f64,
}

/// Eigendecomposition of the Gram matrix, reusable across query directions.
#[derive(Clone, Debug)]
pub struct ExactWidthSolver {
    dim: usize,
    t: usize,
    eigvals: Vec<f64>,
    eigvecs: DMatrix<f64>,
    b: Vec<f64>,
    y_sq: f64,
    radius_sq: f64,
    interpolate: bool,
}

impl ExactWidthSolver {
    pub fn new(state: &ConfidenceState) -> Result<Self> {
        let dim = state.dim();
        let eig = SymmetricEigen::new(state.gram().clone());
        let top = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        let floor = 1e-12 * top.max(1.0);
        let eigvals: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&v| if v <= floor { 0.0 } else { v })
            .collect();
        let bt = eig.eigenvectors.tr_mul(state.xy());
        let b: Vec<f64> = (0..dim).map(|i| if eigvals[i] == 0.0 { 0.0 } else { bt[i] }).collect();
        if eigvals.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure("non-finite Gram eigendecomposition".into()));
        }
        Ok(Self {
            dim,
            t: state.t(),
            eigvals,
            eigvecs: eig.eigenvectors,
            b,
            y_sq: state.y_sq(),
            radius_sq: state.residual_budget(),
            interpolate: state.epsilon() == 0.0 && state.t() > 0,
        })
    }

    fn rotate_in(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.eigvecs.column(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn rotate_out(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, vi) in v.iter().enumerate() {
            for (o, q) in out.iter_mut().zip(self.eigvecs.column(i).iter()) {
                *o += q * vi;
            }
        }
        out
    }

    fn residual_sq_eig(&self, theta: &[f64]) -> f64 {
        let mut r = self.y_sq;
        for ((t, l), b) in theta.iter().zip(&self.eigvals).zip(&self.b) {
            r += t * (l * t - 2.0 * b);
        }
        r.max(0.0)
    }

    /// `max - min` of `phi . theta` with both extremizers.
    pub fn width(&self, phi: &[f64], tol: f64) -> Result<(f64, Extremum, Extremum)> {
        let hi = self.maximize(phi, tol)?;
        let neg: Vec<f64> = phi.iter().map(|v| -v).collect();
        let mut lo = self.maximize(&neg, tol)?;
        lo.value = -lo.value;
        Ok(((hi.value - lo.value).max(0.0), hi, lo))
    }

    /// `max c . theta` over the confidence set.
    pub fn maximize(&self, c: &[f64], tol: f64) -> Result<Extremum> {
        if c.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: c.len(),
            });
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParam(format!("tolerance must be positive, got {tol}")));
        }
        let cn = norm(c);
        if cn == 0.0 {
            let mut e1 = vec![0.0; self.dim];
            e1[0] = 1.0;
            let mut ext = self.maximize(&e1, tol)?;
            ext.value = 0.0;
            return Ok(ext);
        }
        if self.t == 0 {
            return Ok(Extremum {
                value: cn,
                theta: c.iter().map(|v| v / cn).collect(),
                gap: 0.0,
            });
        }
        let ct = self.rotate_in(c);
        let (theta_eig, gap) = if self.interpolate {
            self.interpolating_max(&ct)?
        } else {
            self.dual_max(&ct, tol)?
        };
        let value = ct.iter().zip(&theta_eig).map(|(a, b)| a * b).sum();
        Ok(Extremum {
            value,
            theta: self.rotate_out(&theta_eig),
            gap,
        })
    }

    fn interpolating_max(&self, ct: &[f64]) -> Result<(Vec<f64>, f64)> {
        let mut theta: Vec<f64> = (0..self.dim)
            .map(|i| {
                if self.eigvals[i] > 0.0 {
                    self.b[i] / self.eigvals[i]
                } else {
                    0.0
                }
            })
            .collect();
        let scale = self.y_sq.max(1.0);
        if self.residual_sq_eig(&theta) > 1e-9 * scale {
            return Err(Error::InfeasibleSet);
        }
        let ls_norm_sq: f64 = theta.iter().map(|v| v * v).sum();
        if ls_norm_sq > 1.0 + 1e-9 {
            return Err(Error::InfeasibleSet);
        }
        let radius = (1.0 - ls_norm_sq).max(0.0).sqrt();
        let null_norm: f64 = (0..self.dim)
            .filter(|&i| self.eigvals[i] == 0.0)
            .map(|i| ct[i] * ct[i])
            .sum::<f64>()
            .sqrt();
        if null_norm > 0.0 {
            for i in (0..self.dim).filter(|&i| self.eigvals[i] == 0.0) {
                theta[i] = radius * ct[i] / null_norm;
            }
        }
        Ok((theta, 0.0))
    }

    /// Inner maximizer in the eigenbasis; returns `(||theta||^2, finite)`.
    fn inner_theta(&self, ct: &[f64], l1: f64, l2: f64, out: &mut [f64]) -> (f64, bool) {
        let mut norm_sq = 0.0;
        for i in 0..self.dim {
            let num = 0.5 * ct[i] + l2 * self.b[i];
            let den = l1 + l2 * self.eigvals[i];
            out[i] = if den > 0.0 {
                num / den
            } else if num == 0.0 {
                0.0
            } else {
                return (f64::INFINITY, false);
            };
            norm_sq += out[i] * out[i];
        }
        (norm_sq, norm_sq.is_finite())
    }

    /// Smallest `l1 >= 0` (up to bisection resolution, feasible side) with `||theta|| <= 1`.
    fn solve_ball_multiplier(&self, ct: &[f64], l2: f64, buf: &mut [f64]) -> f64 {
        let (n0, finite) = self.inner_theta(ct, 0.0, l2, buf);
        if finite && n0 <= 1.0 {
            return 0.0;
        }
        // ||theta|| <= ||num|| / l1, so l1 = ||num|| is feasible.
        let mut hi = (0..self.dim)
            .map(|i| (0.5 * ct[i] + l2 * self.b[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        if hi == 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (n, finite) = self.inner_theta(ct, mid, l2, buf);
            if !finite || n > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Residual of the inner maximizer after eliminating `l1`.
    fn residual_at(&self, ct: &[f64], l2: f64, buf: &mut [f64]) -> (f64, f64, f64) {
        let l1 = self.solve_ball_multiplier(ct, l2, buf);
        let (n, _) = self.inner_theta(ct, l1, l2, buf);
        (self.residual_sq_eig(buf), l1, n)
    }

    fn dual_max(&self, ct: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
        let mut buf = vec![0.0; self.dim];
        let r2 = self.radius_sq;

        let (res0, _, _) = self.residual_at(ct, 0.0, &mut buf);
        let l2 = if res0 <= r2 {
            0.0
        } else {
            let mut hi = L2_BRACKET;
            let mut res_hi = self.residual_at(ct, hi, &mut buf).0;
            while res_hi > r2 && hi < L2_BRACKET_CAP {
                hi *= 10.0;
                res_hi = self.residual_at(ct, hi, &mut buf).0;
            }
            if res_hi > r2 {
                if res_hi > r2 + tol {
                    return Err(Error::InfeasibleSet);
                }
            } else {
                let mut lo = 0.0;
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.residual_at(ct, mid, &mut buf).0 > r2 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            hi
        };

        let (res, l1, norm_sq) = self.residual_at(ct, l2, &mut buf);
        let gap = (l1 * (1.0 - norm_sq)).abs() + (l2 * (r2 - res)).abs();
        if gap > tol {
            return Err(Error::NoConvergence { gap, tol });
        }
        Ok((buf, gap))
    }
}
