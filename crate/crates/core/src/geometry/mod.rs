//! Confidence sets over linear coefficients.
//!
//! After `t` noiseless observations `(phi_k, y_k)` the set is
//!
//! ```text
//! Theta_t = { theta : ||theta|| <= 1,  sum_k (y_k - theta . phi_k)^2 <= eps^2 t }
//! ```
//!
//! Widths `max - min` of `theta . phi` over `Theta_t` are available exactly (a
//! two-constraint convex program, see [`ExactWidthSolver`]) and through the
//! ellipsoidal relaxation `sqrt(8 eps^2 t phi^T Psi_t^{-1} phi)` with
//! `Psi_t = Phi_t + eps^2 t I`.

mod exact;
mod ridge;

pub use exact::{ExactWidthSolver, Extremum};
pub use ridge::FixedRidge;

use nalgebra::{DMatrix, DMatrixView, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm, quad_form, spd_inverse_logdet};

/// Default absolute tolerance for width comparisons and the dual solver.
pub const WIDTH_TOL: f64 = 1e-6;
/// Slack on the unit-norm preconditions and on membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub phi: Vec<f64>,
    pub y: f64,
}

#[derive(Clone, Debug)]
struct PsiCache {
    inverse: DMatrix<f64>,
    log_det: f64,
}

/// Online statistics defining `Theta_t`. Updates return a new value.
#[derive(Clone, Debug)]
pub struct ConfidenceState {
    t: usize,
    dim: usize,
    epsilon: f64,
    gram: DMatrix<f64>,
    xy: DVector<f64>,
    y_sq: f64,
    history: Vec<Observation>,
    psi: Option<PsiCache>,
}

/// Width of one feature vector over the confidence set.
#[derive(Clone, Debug, PartialEq)]
pub struct WidthReport {
    /// Ellipsoidal bound; `+inf` when the relaxation is unavailable (`eps = 0`).
    pub relaxed: f64,
    pub exact: Option<f64>,
    pub theta_max: Option<Vec<f64>>,
    pub theta_min: Option<Vec<f64>>,
}

impl ConfidenceState {
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim must be positive"));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        Ok(Self {
            t: 0,
            dim,
            epsilon,
            gram: DMatrix::zeros(dim, dim),
            xy: DVector::zeros(dim),
            y_sq: 0.0,
            history: Vec::new(),
            psi: None,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn xy(&self) -> &DVector<f64> {
        &self.xy
    }

    pub fn history(&self) -> &[Observation] {
        &self.history
    }

    /// `(Phi_t + eps^2 t I)^{-1}`, present for `t >= 1` whenever it is positive definite.
    pub fn psi_inverse(&self) -> Option<&DMatrix<f64>> {
        self.psi.as_ref().map(|p| &p.inverse)
    }

    pub fn log_det_psi(&self) -> Option<f64> {
        self.psi.as_ref().map(|p| p.log_det)
    }

    /// Squared residual budget `eps^2 t`.
    pub fn residual_budget(&self) -> f64 {
        self.epsilon * self.epsilon * self.t as f64
    }

    /// `sum_k (y_k - theta . phi_k)^2`, computed from the history.
    pub fn residual_sq(&self, theta: &[f64]) -> f64 {
        self.history.iter().map(|o| (o.y - dot(theta, &o.phi)).powi(2)).sum()
    }

    pub(crate) fn y_sq(&self) -> f64 {
        self.y_sq
    }

    fn check_phi(&self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: phi.len(),
            });
        }
        let n = norm(phi);
        if !(n <= 1.0 + MEMBERSHIP_TOL) {
            return Err(invalid(format!("feature norm {n} exceeds 1")));
        }
        Ok(())
    }

    /// Incorporates one observation. `Psi^{-1}` and `log det Psi` are recomputed
    /// from a fresh Cholesky factorization for the new regularizer `eps^2 (t+1)`.
    ///
    /// With `eps = 0` a singular `Psi` is not an error: the cache is dropped and
    /// only exact widths remain available.
    pub fn update(&self, phi: &[f64], y: f64) -> Result<Self> {
        self.check_phi(phi)?;
        if !y.is_finite() {
            return Err(invalid("observation must be finite"));
        }
        let mut next = self.clone();
        let v = DVector::from_column_slice(phi);
        next.gram.ger(1.0, &v, &v, 1.0);
        next.xy.axpy(y, &v, 1.0);
        next.y_sq += y * y;
        next.t += 1;
        next.history.push(Observation { phi: phi.to_vec(), y });

        let reg = next.epsilon * next.epsilon * next.t as f64;
        let mut psi = next.gram.clone();
        for i in 0..next.dim {
            psi[(i, i)] += reg;
        }
        next.psi = match spd_inverse_logdet(&psi) {
            Ok((inverse, log_det)) => Some(PsiCache { inverse, log_det }),
            Err(_) if next.epsilon == 0.0 => None,
            Err(e) => return Err(e),
        };
        Ok(next)
    }

    /// `phi^T Psi_t^{-1} phi` for `t >= 1`.
    pub fn leverage(&self, phi: &[f64]) -> Result<f64> {
        self.check_phi(phi)?;
        let psi = self.psi_cache()?;
        Ok(quad_form(&psi.inverse, phi).max(0.0))
    }

    fn psi_cache(&self) -> Result<&PsiCache> {
        match &self.psi {
            Some(p) => Ok(p),
            None if self.t == 0 => Err(Error::NumericalFailure("Psi_0 = 0 has no inverse".into())),
            None => Err(Error::NumericalFailure(
                "relaxed width unavailable: Psi is singular (eps = 0 with rank-deficient Gram)".into(),
            )),
        }
    }

    /// Ellipsoidal width bound. At `t = 0` this is `2 ||phi||`, the exact width of the unit ball.
    pub fn relaxed_width(&self, phi: &[f64]) -> Result<f64> {
        self.check_phi(phi)?;
        if self.t == 0 {
            return Ok(2.0 * norm(phi));
        }
        let q = self.leverage(phi)?;
        Ok((8.0 * self.residual_budget() * q).sqrt())
    }

    /// Relaxed widths for every row of a row-major `n x dim` feature matrix.
    pub fn relaxed_widths(&self, features: &[f64]) -> Result<Vec<f64>> {
        if !features.len().is_multiple_of(self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: features.len() % self.dim,
            });
        }
        let n = features.len() / self.dim;
        if self.t == 0 {
            return Ok(features.chunks_exact(self.dim).map(|r| 2.0 * norm(r)).collect());
        }
        let psi = self.psi_cache()?;
        // Row-major n x d is column-major d x n.
        let ft = DMatrixView::from_slice(features, self.dim, n);
        let prod = &psi.inverse * ft;
        let scale = 8.0 * self.residual_budget();
        Ok((0..n)
            .map(|x| (scale * prod.column(x).dot(&ft.column(x)).max(0.0)).sqrt())
            .collect())
    }

    /// Exact width via the dual solver; both extremizers are returned.
    pub fn exact_width(&self, phi: &[f64], tol: f64) -> Result<WidthReport> {
        self.check_phi(phi)?;
        let solver = self.exact_solver()?;
        let (exact, hi, lo) = solver.width(phi, tol)?;
        let relaxed = match self.relaxed_width(phi) {
            Ok(w) => w,
            Err(Error::NumericalFailure(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        Ok(WidthReport {
            relaxed,
            exact: Some(exact),
            theta_max: Some(hi.theta),
            theta_min: Some(lo.theta),
        })
    }

    /// Precomputes the eigendecomposition of the Gram matrix for repeated exact queries.
    pub fn exact_solver(&self) -> Result<ExactWidthSolver> {
        ExactWidthSolver::new(self)
    }

    /// `||theta|| <= 1 + 1e-9` and residuals within `eps^2 t (1 + 1e-9)`.
    pub fn membership(&self, theta: &[f64]) -> Result<bool> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: theta.len(),
            });
        }
        if norm(theta) > 1.0 + MEMBERSHIP_TOL {
            return Ok(false);
        }
        Ok(self.residual_sq(theta) <= self.residual_budget() * (1.0 + MEMBERSHIP_TOL) + MEMBERSHIP_TOL)
    }

    /// JSON dump of `t`, Gram (row-major), `xy` and the history for trace replay.
    pub fn debug_dump(&self) -> serde_json::Value {
        let gram: Vec<f64> = (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .map(|ij| self.gram[ij])
            .collect();
        serde_json::json!({
            "t": self.t,
            "dim": self.dim,
            "epsilon": self.epsilon,
            "gram": gram,
            "xy": self.xy.as_slice(),
            "history": self.history,
        })
    }

    /// Rebuilds a state by replaying the history of a [`debug_dump`](Self::debug_dump).
    pub fn from_debug_dump(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Dump {
            dim: usize,
            epsilon: f64,
            history: Vec<Observation>,
        }
        let dump: Dump = serde_json::from_value(value.clone())?;
        let mut state = Self::new(dump.dim, dump.epsilon)?;
        for obs in &dump.history {
            state = state.update(&obs.phi, obs.y)?;
        }
        Ok(state)
    }
}

/// One step of the determinant recursion: `det(Psi + phi phi^T) = (1 + phi^T Psi^{-1} phi) det Psi`.
/// Returns `(log det(Psi + phi phi^T), growth factor)`.
pub fn matrix_determinant_step(psi: &DMatrix<f64>, phi: &[f64]) -> Result<(f64, f64)> {
    if !psi.is_square() || psi.nrows() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.nrows(),
            got: phi.len(),
        });
    }
    let (inverse, log_det) = spd_inverse_logdet(psi)?;
    let growth = 1.0 + quad_form(&inverse, phi);
    Ok((log_det + growth.ln(), growth))
}
