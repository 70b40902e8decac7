//! Brute-force oracle suites.
//!
//! These checks deliberately avoid the production code paths they validate:
//! widths are recovered by grid search over the feasible set, determinants by
//! LU factorization, certificates by exhaustive loops.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{matrix_determinant_step, ConfidenceState, FixedRidge, WIDTH_TOL};
use crate::instances::{gen_needle_instance, required_dim, Instance, NORM_TOL};
use crate::rng;

const DOMAIN_VERIFY: u64 = 0x5645_5249_4659_0005;

/// Result of one oracle suite.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub violations: usize,
    /// Largest observed discrepancy, in the suite's own units.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.cases > 0
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}: {} cases, {} violations, worst {:.3e} (tol {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.violations,
            self.worst,
            self.tolerance
        )
    }
}

fn feasible(history: &[(Vec<f64>, f64)], budget: f64, theta: &[f64]) -> bool {
    let n2: f64 = theta.iter().map(|v| v * v).sum();
    if n2 > 1.0 {
        return false;
    }
    let mut r = 0.0;
    for (phi, y) in history {
        let p: f64 = phi.iter().zip(theta).map(|(a, b)| a * b).sum();
        r += (y - p) * (y - p);
    }
    r <= budget
}

/// Max and min of `theta . phi` over the confidence set by brute force, for
/// `dim <= 2`. One dimension scans `10^6 + 1` grid points. Two dimensions
/// take the least-residual feasible point of a 1001 x 1001 grid as anchor,
/// trace the boundary by bisection along 20000 rays (a convex set is
/// star-shaped about any of its points) and refine the extreme angles by
/// golden-section search. Returns `None` when no grid point is feasible.
pub fn grid_width_oracle(state: &ConfidenceState, phi: &[f64]) -> Option<(f64, f64)> {
    let history: Vec<(Vec<f64>, f64)> = state.history().iter().map(|o| (o.phi.clone(), o.y)).collect();
    let budget = state.residual_budget();
    match state.dim() {
        1 => {
            let n = 1_000_000;
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for i in 0..=n {
                let th = -1.0 + 2.0 * i as f64 / n as f64;
                if feasible(&history, budget, &[th]) {
                    let v = th * phi[0];
                    hi = hi.max(v);
                    lo = lo.min(v);
                }
            }
            hi.is_finite().then_some((hi, lo))
        }
        2 => {
            let anchor = grid_anchor(&history, budget)?;
            let boundary = |psi: f64| {
                let u = [psi.cos(), psi.sin()];
                let (mut inside, mut outside) = (0.0, 2.0);
                for _ in 0..60 {
                    let mid = 0.5 * (inside + outside);
                    if feasible(&history, budget, &[anchor[0] + mid * u[0], anchor[1] + mid * u[1]]) {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                (anchor[0] + inside * u[0]) * phi[0] + (anchor[1] + inside * u[1]) * phi[1]
            };
            let rays = 20_000;
            let step = std::f64::consts::TAU / rays as f64;
            let values: Vec<f64> = (0..rays).map(|k| boundary(k as f64 * step)).collect();
            let arg = |better: &dyn Fn(f64, f64) -> bool| {
                (0..rays).fold(0, |b, k| if better(values[k], values[b]) { k } else { b })
            };
            let k_hi = arg(&|a, b| a > b);
            let k_lo = arg(&|a, b| a < b);
            let hi = golden(&boundary, k_hi as f64 * step, step).max(values[k_hi]);
            let lo = -golden(&|p| -boundary(p), k_lo as f64 * step, step).max(-values[k_lo]);
            Some((hi, lo))
        }
        _ => None,
    }
}

fn grid_anchor(history: &[(Vec<f64>, f64)], budget: f64) -> Option<[f64; 2]> {
    let n = 1001;
    let mut best: Option<([f64; 2], f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let t = [
                -1.0 + 2.0 * i as f64 / (n - 1) as f64,
                -1.0 + 2.0 * j as f64 / (n - 1) as f64,
            ];
            if t[0] * t[0] + t[1] * t[1] > 1.0 {
                continue;
            }
            let r: f64 = history
                .iter()
                .map(|(phi, y)| {
                    let p = phi[0] * t[0] + phi[1] * t[1];
                    (y - p) * (y - p)
                })
                .sum();
            if r <= budget && best.is_none_or(|(_, b)| r < b) {
                best = Some((t, r));
            }
        }
    }
    best.map(|(t, _)| t)
}

/// Golden-section maximization of `f` on `[center - half_width, center + half_width]`.
fn golden(f: &dyn Fn(f64) -> f64, center: f64, half_width: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (center - half_width, center + half_width);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Random noiseless trajectory: witness in the unit ball, features of norm in
/// `[0.5, 1]`, observations within `eps` of the witness' predictions.
pub fn random_trajectory(rng: &mut ChaCha8Rng, dim: usize, t: usize, epsilon: f64) -> (ConfidenceState, Vec<f64>) {
    let witness = rng::unit_ball(rng, dim);
    let mut state = ConfidenceState::new(dim, epsilon).expect("valid dims");
    for _ in 0..t {
        let scale: f64 = rng.random_range(0.5..=1.0);
        let phi: Vec<f64> = rng::unit_vector(rng, dim).into_iter().map(|v| v * scale).collect();
        let pred: f64 = phi.iter().zip(&witness).map(|(a, b)| a * b).sum();
        let noise: f64 = rng.random_range(-1.0..=1.0);
        state = state.update(&phi, pred + epsilon * noise).expect("noiseless update");
    }
    (state, witness)
}

/// Exact widths against the grid oracle (tolerance `1e-3`) and against the
/// relaxed width (`exact <= relaxed + 1e-6`).
pub fn check_width_oracle(n_states: usize, seed: u64) -> CheckOutcome {
    let mut rng = rng::stream(seed, DOMAIN_VERIFY, 1, 0);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for k in 0..n_states {
        let dim = 1 + k % 2;
        let t = rng.random_range(0..=5);
        let epsilon = if rng.random_bool(0.5) { 0.1 } else { 0.5 };
        let (state, _) = random_trajectory(&mut rng, dim, t, epsilon);
        let phi = rng::unit_vector(&mut rng, dim);
        let report = match state.exact_width(&phi, WIDTH_TOL) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("exact width failed on state {k}: {e}");
                violations += 1;
                continue;
            }
        };
        let exact = report.exact.expect("exact mode");
        let Some((hi, lo)) = grid_width_oracle(&state, &phi) else {
            violations += 1;
            continue;
        };
        let err = (exact - (hi - lo)).abs();
        worst = worst.max(err);
        if err > 1e-3 || exact > report.relaxed + WIDTH_TOL {
            violations += 1;
        }
    }
    CheckOutcome {
        name: "width oracle equivalence",
        cases: n_states,
        violations,
        worst,
        tolerance: 1e-3,
    }
}

fn random_gram(rng: &mut ChaCha8Rng, dim: usize, t: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(dim, dim);
    for _ in 0..t {
        let v = nalgebra::DVector::from_vec(rng::unit_vector(rng, dim));
        g.ger(1.0, &v, &v, 1.0);
    }
    g
}

/// `det(Psi + phi phi^T) = (1 + phi^T Psi^{-1} phi) det Psi` against an LU
/// determinant, and the Sherman-Morrison tracker against LU as well.
pub fn check_determinant_lemma(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = rng::stream(seed, DOMAIN_VERIFY, 2, 0);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let dim = rng.random_range(1..=32);
        let t = rng.random_range(0..=64);
        let lambda: f64 = rng.random_range(0.05..=2.0);
        let gram = random_gram(&mut rng, dim, t);
        let psi = &gram + DMatrix::identity(dim, dim) * lambda;
        let phi = rng::unit_vector(&mut rng, dim);
        let Ok((log_det, _)) = matrix_determinant_step(&psi, &phi) else {
            violations += 1;
            continue;
        };
        let v = nalgebra::DVector::from_column_slice(&phi);
        let updated = &psi + &v * v.transpose();
        let lu = updated.determinant().ln();
        let rel = (log_det - lu).exp_m1().abs();
        worst = worst.max(rel);
        if !(rel <= 1e-8) {
            violations += 1;
        }
    }
    // Fixed-regularizer recursion over whole trajectories.
    for _ in 0..trials / 10 {
        let dim = rng.random_range(1..=16);
        let lambda: f64 = rng.random_range(0.05..=2.0);
        let mut ridge = FixedRidge::new(dim, lambda).expect("valid ridge");
        for _ in 0..rng.random_range(1..=64) {
            ridge.push(&rng::unit_vector(&mut rng, dim)).expect("dims match");
        }
        let m = ridge.gram() + DMatrix::identity(dim, dim) * lambda;
        let rel = (ridge.log_det() - m.determinant().ln()).exp_m1().abs();
        worst = worst.max(rel);
        if !(rel <= 1e-8) {
            violations += 1;
        }
    }
    CheckOutcome {
        name: "matrix determinant lemma",
        cases: trials + trials / 10,
        violations,
        worst,
        tolerance: 1e-8,
    }
}

/// `det(Phi_t + lambda I) <= (lambda + t/d)^d` for unit-norm features.
/// `worst` reports the largest `det / cap - 1` (negative when slack).
pub fn check_am_gm_cap(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = rng::stream(seed, DOMAIN_VERIFY, 3, 0);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let dim = rng.random_range(1..=32);
        let t = rng.random_range(0..=64);
        let lambda: f64 = rng.random_range(0.001..=2.0);
        let m = random_gram(&mut rng, dim, t) + DMatrix::identity(dim, dim) * lambda;
        let log_det = m.determinant().ln();
        let log_cap = dim as f64 * (lambda + t as f64 / dim as f64).ln();
        let excess = (log_det - log_cap).exp_m1();
        worst = worst.max(excess);
        if excess > 1e-8 {
            violations += 1;
        }
    }
    CheckOutcome {
        name: "AM-GM determinant cap",
        cases: trials,
        violations,
        worst,
        tolerance: 1e-8,
    }
}

/// Exhaustive unit-norm, pairwise and certificate checks on one needle instance.
/// Returns `(max |norm - 1|, max |<phi(x), phi(y)>|, certificate error)`.
pub fn needle_feature_report(inst: &Instance) -> (f64, f64, f64) {
    let mut norm_dev: f64 = 0.0;
    let mut pair: f64 = 0.0;
    for x in 0..inst.n_actions {
        let fx = inst.feature(x);
        norm_dev = norm_dev.max((fx.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs());
        for y in x + 1..inst.n_actions {
            let ip: f64 = fx.iter().zip(inst.feature(y)).map(|(a, b)| a * b).sum();
            pair = pair.max(ip.abs());
        }
    }
    let x_star = inst.x_star.expect("needle instance");
    let theta = inst.feature(x_star);
    let mut cert: f64 = 0.0;
    for x in 0..inst.n_actions {
        let p: f64 = theta.iter().zip(inst.feature(x)).map(|(a, b)| a * b).sum();
        cert = cert.max((inst.rewards[x] - p).abs());
    }
    (norm_dev, pair, cert)
}

/// Needle instances at the minimal guaranteed dimension for several `(|X|, eps)`.
pub fn check_needle_certificates(seeds: &[u64]) -> CheckOutcome {
    let configs: [(usize, f64); 4] = [(16, 0.5), (64, 0.6), (256, 0.49), (128, 0.7)];
    let mut violations = 0;
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for &(n, eps) in &configs {
        let dim = required_dim(n, eps).ceil() as usize;
        for &seed in seeds {
            cases += 1;
            let x_star = rng::needle_position(seed, n);
            let Ok(inst) = gen_needle_instance(n, x_star, dim, eps, seed, 1000) else {
                violations += 1;
                continue;
            };
            let (norm_dev, pair, cert) = needle_feature_report(&inst);
            worst = worst.max(norm_dev);
            if norm_dev > NORM_TOL || pair > eps || cert > eps || inst.certificate.theta_norm > 1.0 + 1e-12 {
                violations += 1;
            }
        }
    }
    CheckOutcome {
        name: "needle feature certificates",
        cases,
        violations,
        worst,
        tolerance: NORM_TOL,
    }
}

/// Every suite; `quick` shrinks the case counts.
pub fn run_all(quick: bool, seed: u64) -> Vec<CheckOutcome> {
    let (widths, dets, needle_seeds) = if quick { (20, 100, 2) } else { (200, 1000, 10) };
    let seeds: Vec<u64> = (0..needle_seeds).map(|s| seed.wrapping_add(s)).collect();
    vec![
        check_width_oracle(widths, seed),
        check_determinant_lemma(dets, seed),
        check_am_gm_cap(dets, seed),
        check_needle_certificates(&seeds),
    ]
}
