//! Problem instances: one-hot "needle" reward functions over near-orthogonal
//! features, and realizable-up-to-epsilon instances with informative features.
//!
//! Every instance carries a witness `theta` with `||theta||_2 <= 1` whose
//! worst-case error against the rewards is at most `epsilon`. The witness is
//! what makes the misspecification level checkable after the fact.

use std::fmt::Write as _;
use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm};
use crate::numfmt::fmt17;
use crate::rng;

/// Tolerance on `||phi(x)|| = 1` for generated features.
pub const NORM_TOL: f64 = 1e-9;
/// Slack allowed in certificate arithmetic.
pub const CERT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Needle,
    Realizable,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Needle => "needle",
            InstanceKind::Realizable => "realizable",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "needle" => Ok(InstanceKind::Needle),
            "realizable" => Ok(InstanceKind::Realizable),
            other => Err(invalid(format!("unknown instance kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A linear predictor together with its worst-case error on an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct MisspecCertificate {
    pub theta: Vec<f64>,
    pub achieved_error: f64,
    pub theta_norm: f64,
}

/// An action set with features, ground-truth rewards and a certified
/// misspecification level.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub kind: InstanceKind,
    pub n_actions: usize,
    pub dim: usize,
    /// Row-major `n_actions x dim`.
    pub features: Vec<f64>,
    pub rewards: Vec<f64>,
    pub epsilon: f64,
    pub x_star: Option<usize>,
    pub seed: u64,
    pub certificate: MisspecCertificate,
}

impl Instance {
    /// Builds an instance from explicit data. The declared `epsilon` is raised
    /// to the witness' achieved error if it is smaller.
    ///
    /// Unlike the generators this accepts a single action, which is useful for
    /// exercising agents on degenerate inputs.
    pub fn from_parts(
        kind: InstanceKind,
        dim: usize,
        features: Vec<f64>,
        rewards: Vec<f64>,
        witness: Vec<f64>,
        epsilon: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim must be positive"));
        }
        let n_actions = rewards.len();
        if n_actions == 0 {
            return Err(invalid("at least one action is required"));
        }
        if features.len() != n_actions * dim {
            return Err(Error::DimensionMismatch {
                expected: n_actions * dim,
                got: features.len(),
            });
        }
        if witness.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: witness.len(),
            });
        }
        if let Some(r) = rewards.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(invalid(format!("reward {r} outside [0, 1]")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(invalid("features must be finite"));
        }
        let x_star = match kind {
            InstanceKind::Needle => {
                let ones: Vec<usize> = (0..n_actions).filter(|&x| rewards[x] == 1.0).collect();
                let one_hot = ones.len() == 1 && rewards.iter().all(|&r| r == 0.0 || r == 1.0);
                if !one_hot {
                    return Err(invalid("needle rewards must be one-hot"));
                }
                Some(ones[0])
            }
            InstanceKind::Realizable => None,
        };
        let mut inst = Instance {
            kind,
            n_actions,
            dim,
            features,
            rewards,
            epsilon,
            x_star,
            seed: 0,
            certificate: MisspecCertificate {
                theta: Vec::new(),
                achieved_error: 0.0,
                theta_norm: 0.0,
            },
        };
        inst.certificate = certify_misspecification(&inst, &witness)?;
        if inst.certificate.theta_norm > 1.0 + CERT_TOL {
            return Err(invalid(format!(
                "witness norm {} exceeds 1",
                inst.certificate.theta_norm
            )));
        }
        inst.epsilon = inst.epsilon.max(inst.certificate.achieved_error);
        Ok(inst)
    }

    pub fn feature(&self, x: usize) -> &[f64] {
        &self.features[x * self.dim..(x + 1) * self.dim]
    }

    pub fn best_reward(&self) -> f64 {
        self.rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `f*(x) >= max f* - epsilon_prime`.
    pub fn is_optimal(&self, x: usize, epsilon_prime: f64) -> bool {
        self.rewards[x] >= self.best_reward() - epsilon_prime
    }

    /// Serializes to the instance JSON schema with 17 significant digits.
    pub fn to_json(&self) -> String {
        fn arr(v: &[f64]) -> String {
            let mut s = String::with_capacity(v.len() * 22 + 2);
            s.push('[');
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&fmt17(*x));
            }
            s.push(']');
            s
        }
        let mut out = String::new();
        out.push('{');
        let _ = write!(out, "\"kind\":\"{}\",", self.kind);
        let _ = write!(out, "\"n_actions\":{},", self.n_actions);
        let _ = write!(out, "\"dim\":{},", self.dim);
        let _ = write!(out, "\"epsilon\":{},", fmt17(self.epsilon));
        let _ = write!(out, "\"seed\":{},", self.seed);
        match self.x_star {
            Some(x) => {
                let _ = write!(out, "\"x_star\":{x},");
            }
            None => out.push_str("\"x_star\":null,"),
        }
        let _ = write!(out, "\"features\":{},", arr(&self.features));
        let _ = write!(out, "\"rewards\":{},", arr(&self.rewards));
        let _ = write!(
            out,
            "\"certificate\":{{\"theta\":{},\"achieved_error\":{}}}",
            arr(&self.certificate.theta),
            fmt17(self.certificate.achieved_error)
        );
        out.push('}');
        out
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_json().as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    }

    /// Parses the instance JSON schema. The certificate error is recomputed
    /// from the stored witness rather than trusted.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        if file.dim == 0 || file.n_actions == 0 {
            return Err(invalid("n_actions and dim must be positive"));
        }
        if file.rewards.len() != file.n_actions {
            return Err(Error::DimensionMismatch {
                expected: file.n_actions,
                got: file.rewards.len(),
            });
        }
        let mut inst = Instance::from_parts(
            file.kind,
            file.dim,
            file.features,
            file.rewards,
            file.certificate.theta,
            file.epsilon,
        )?;
        if let (Some(stored), Some(found)) = (file.x_star, inst.x_star) {
            if stored != found {
                return Err(invalid(format!(
                    "x_star {stored} disagrees with rewards (one at {found})"
                )));
            }
        }
        inst.seed = file.seed;
        Ok(inst)
    }

    pub fn read_json<R: Read>(mut r: R) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::from_json(&s)
    }
}

#[derive(Deserialize)]
struct InstanceFile {
    kind: InstanceKind,
    n_actions: usize,
    dim: usize,
    epsilon: f64,
    seed: u64,
    x_star: Option<usize>,
    features: Vec<f64>,
    rewards: Vec<f64>,
    certificate: CertificateFile,
}

#[derive(Deserialize)]
struct CertificateFile {
    theta: Vec<f64>,
    #[allow(dead_code)]
    achieved_error: f64,
}

/// Smallest dimension for which near-orthogonal unit features with pairwise
/// inner products at most `epsilon` are guaranteed to exist.
pub fn required_dim(n_actions: usize, epsilon: f64) -> f64 {
    8.0 * (n_actions as f64).ln() / (epsilon * epsilon)
}

/// One-hot reward at `x_star` over near-orthogonal unit features.
///
/// When `dim >= n_actions` the standard basis is used. Otherwise rows are drawn
/// uniformly from the unit sphere, each row redrawn (attempt `a` uses stream
/// `(seed, row, a)`) until its inner product with every earlier row is at most
/// `epsilon` in magnitude.
pub fn gen_needle_instance(
    n_actions: usize,
    x_star: usize,
    dim: usize,
    epsilon: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<Instance> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if n_actions < 2 {
        return Err(invalid("needle instances need at least two actions"));
    }
    if x_star >= n_actions {
        return Err(invalid(format!("x_star {x_star} out of range for {n_actions} actions")));
    }
    if dim < 2 {
        return Err(invalid("needle instances need dim >= 2"));
    }
    if max_attempts == 0 {
        return Err(invalid("max_attempts must be positive"));
    }

    let features = if dim >= n_actions {
        let mut f = vec![0.0; n_actions * dim];
        for x in 0..n_actions {
            f[x * dim + x] = 1.0;
        }
        f
    } else {
        near_orthogonal_rows(n_actions, dim, epsilon, seed, max_attempts)?
    };

    let mut rewards = vec![0.0; n_actions];
    rewards[x_star] = 1.0;
    let witness = features[x_star * dim..(x_star + 1) * dim].to_vec();
    let mut inst = Instance::from_parts(InstanceKind::Needle, dim, features, rewards, witness, epsilon)?;
    inst.seed = seed;
    inst.epsilon = epsilon;
    Ok(inst)
}

fn near_orthogonal_rows(
    n_actions: usize,
    dim: usize,
    epsilon: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<Vec<f64>> {
    let mut rows = Vec::with_capacity(n_actions * dim);
    for r in 0..n_actions {
        let mut accepted = false;
        for attempt in 0..max_attempts {
            let mut s = rng::stream(seed, rng::DOMAIN_SPHERE_ROWS, r as u64, attempt as u64);
            let cand = rng::unit_vector(&mut s, dim);
            let ok = rows
                .chunks_exact(dim)
                .all(|prev: &[f64]| dot(prev, &cand).abs() <= epsilon);
            if ok {
                rows.extend_from_slice(&cand);
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::AttemptsExhausted {
                row: r,
                attempts: max_attempts,
                n_actions,
                dim,
                epsilon,
                required_dim: required_dim(n_actions, epsilon),
            });
        }
    }
    Ok(rows)
}

/// Realizable-up-to-`epsilon` instance with informative features.
///
/// The last feature coordinate is the constant `1/sqrt(2)`; the remaining
/// `dim - 1` coordinates hold a unit vector scaled by `1/sqrt(2)`, so every row
/// has unit norm. The witness maps linear values into `[2 eps, 1 - 2 eps]`, and
/// rewards add an independent perturbation uniform on `[-eps, eps]`.
pub fn gen_realizable_instance(n_actions: usize, dim: usize, epsilon: f64, seed: u64) -> Result<Instance> {
    if !(0.0..=0.25).contains(&epsilon) {
        return Err(invalid(format!("epsilon must lie in [0, 0.25], got {epsilon}")));
    }
    if n_actions < 2 {
        return Err(invalid("instances need at least two actions"));
    }
    if dim == 0 {
        return Err(invalid("dim must be positive"));
    }
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let inner = dim - 1;

    let mut param_rng = rng::stream(seed, rng::DOMAIN_REALIZABLE, u64::MAX, 0);
    let direction = rng::unit_ball(&mut param_rng, inner);

    let mut unit_rows = Vec::with_capacity(n_actions * inner);
    for x in 0..n_actions {
        let mut s = rng::stream(seed, rng::DOMAIN_REALIZABLE, x as u64, 0);
        if inner > 0 {
            unit_rows.extend(rng::unit_vector(&mut s, inner));
        }
    }
    let raw: Vec<f64> = if inner > 0 {
        unit_rows.chunks_exact(inner).map(|u| dot(u, &direction)).collect()
    } else {
        vec![0.0; n_actions]
    };

    // f = scale * raw + 1/2 lands in [2 eps, 1 - 2 eps] and keeps ||witness|| <= 1.
    let max_abs = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dir_norm = norm(&direction);
    let mut scale = 0.5;
    if max_abs > 0.0 {
        scale = f64::min(scale, (0.5 - 2.0 * epsilon) / max_abs);
    }
    if dir_norm > 0.0 {
        scale = f64::min(scale, 0.5 / dir_norm);
    }

    let mut features = Vec::with_capacity(n_actions * dim);
    for x in 0..n_actions {
        features.extend(unit_rows[x * inner..(x + 1) * inner].iter().map(|u| u * half));
        features.push(half);
    }
    let mut witness: Vec<f64> = direction.iter().map(|v| v * scale * std::f64::consts::SQRT_2).collect();
    witness.push(0.5 * std::f64::consts::SQRT_2);

    let mut noise = rng::stream(seed, rng::DOMAIN_REALIZABLE, u64::MAX - 1, 0);
    let rewards: Vec<f64> = (0..n_actions)
        .map(|x| {
            let linear = dot(&features[x * dim..(x + 1) * dim], &witness);
            let u: f64 = noise.random();
            let perturbation = epsilon * (2.0 * u - 1.0);
            (linear + perturbation).clamp(0.0, 1.0)
        })
        .collect();

    let mut inst = Instance::from_parts(InstanceKind::Realizable, dim, features, rewards, witness, epsilon)?;
    inst.seed = seed;
    inst.epsilon = epsilon;
    Ok(inst)
}

/// Worst-case error of `theta` over all actions, and its norm.
pub fn certify_misspecification(instance: &Instance, theta: &[f64]) -> Result<MisspecCertificate> {
    if theta.len() != instance.dim {
        return Err(Error::DimensionMismatch {
            expected: instance.dim,
            got: theta.len(),
        });
    }
    let achieved_error = (0..instance.n_actions)
        .map(|x| (instance.rewards[x] - dot(theta, instance.feature(x))).abs())
        .fold(0.0, f64::max);
    Ok(MisspecCertificate {
        theta: theta.to_vec(),
        achieved_error,
        theta_norm: norm(theta),
    })
}

/// Best-effort minimization of the worst-case error over the unit ball,
/// starting from the instance's stored witness.
pub fn min_misspec_oracle(instance: &Instance, tolerance: f64, max_iters: usize) -> MisspecCertificate {
    min_misspec_oracle_from(instance, &instance.certificate.theta, tolerance, max_iters)
}

/// Projected subgradient descent on `max_x |f(x) - theta . phi(x)|` with
/// normalized steps. The step halves whenever `patience` iterations pass
/// without improving the best iterate, restarting from the best point.
/// Never returns a worse certificate than `warm_start` (after projection).
pub fn min_misspec_oracle_from(
    instance: &Instance,
    warm_start: &[f64],
    tolerance: f64,
    max_iters: usize,
) -> MisspecCertificate {
    const PATIENCE: usize = 25;
    let dim = instance.dim;
    let objective = |theta: &[f64]| -> (f64, usize, f64) {
        let mut worst = (-1.0, 0, 0.0);
        for x in 0..instance.n_actions {
            let resid = dot(theta, instance.feature(x)) - instance.rewards[x];
            if resid.abs() > worst.0 {
                worst = (resid.abs(), x, resid.signum());
            }
        }
        worst
    };

    let mut theta: Vec<f64> = if warm_start.len() == dim {
        warm_start.to_vec()
    } else {
        vec![0.0; dim]
    };
    project_unit_ball(&mut theta);
    let mut best = theta.clone();
    let (mut best_err, _, _) = objective(&theta);
    let mut step = 0.5;
    let mut stale = 0;

    for _ in 0..max_iters {
        if best_err <= tolerance || step < tolerance * 1e-3 {
            break;
        }
        let (err, x, sign) = objective(&theta);
        if err < best_err {
            best_err = err;
            best.copy_from_slice(&theta);
            stale = 0;
        } else {
            stale += 1;
            if stale >= PATIENCE {
                step *= 0.5;
                theta.copy_from_slice(&best);
                stale = 0;
                continue;
            }
        }
        let g = instance.feature(x);
        let gn = norm(g);
        if gn == 0.0 {
            break;
        }
        for (t, gi) in theta.iter_mut().zip(g) {
            *t -= step * sign * gi / gn;
        }
        project_unit_ball(&mut theta);
    }
    let (err, _, _) = objective(&theta);
    if err < best_err {
        best = theta;
    }
    certify_misspecification(instance, &best).expect("dimension checked above")
}

fn project_unit_ball(theta: &mut [f64]) {
    let n = norm(theta);
    if n > 1.0 {
        theta.iter_mut().for_each(|t| *t /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_pairwise(inst: &Instance) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..inst.n_actions {
            for y in x + 1..inst.n_actions {
                worst = worst.max(dot(inst.feature(x), inst.feature(y)).abs());
            }
        }
        worst
    }

    #[test]
    fn needle_short_circuits_to_standard_basis() {
        let inst = gen_needle_instance(4, 2, 4, 0.5, 9, 10).unwrap();
        assert_eq!(inst.x_star, Some(2));
        assert_eq!(inst.rewards, vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(max_pairwise(&inst), 0.0);
        assert_eq!(inst.certificate.achieved_error, 0.0);
        assert_eq!(inst.certificate.theta, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn lemma_dimension_for_sixteen_actions() {
        assert_eq!(required_dim(16, 0.5).ceil() as usize, 89);
        assert_eq!(required_dim(256, 0.49).ceil() as usize, 185);
    }

    #[test]
    fn needle_certificate_brute_force() {
        let inst = gen_needle_instance(256, 17, 185, 0.49, 7, 1000).unwrap();
        let x_star = inst.x_star.unwrap();
        let theta = inst.feature(x_star).to_vec();
        // Exhaustive max over actions, independent of certify_misspecification.
        let mut err: f64 = 0.0;
        for x in 0..inst.n_actions {
            let pred: f64 = theta.iter().zip(inst.feature(x)).map(|(a, b)| a * b).sum();
            err = err.max((inst.rewards[x] - pred).abs());
        }
        assert!(err <= 0.49);
        assert!((inst.certificate.achieved_error - err).abs() <= CERT_TOL);
        for x in 0..inst.n_actions {
            assert!((norm(inst.feature(x)) - 1.0).abs() <= NORM_TOL);
        }
        assert!(max_pairwise(&inst) <= 0.49);
    }

    #[test]
    fn needle_rejects_bad_params() {
        assert!(matches!(
            gen_needle_instance(4, 0, 4, 1.5, 0, 10),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            gen_needle_instance(4, 0, 4, 0.0, 0, 10),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            gen_needle_instance(4, 4, 4, 0.5, 0, 10),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            gen_needle_instance(4, 0, 1, 0.5, 0, 10),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn needle_exhausts_attempts_when_dim_too_small() {
        let err = gen_needle_instance(200, 0, 3, 0.05, 1, 5).unwrap_err();
        match &err {
            Error::AttemptsExhausted { attempts, .. } => assert_eq!(*attempts, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("8 ln(n_actions)/epsilon^2"));
    }

    #[test]
    fn needle_generation_is_deterministic() {
        let a = gen_needle_instance(64, 5, 40, 0.6, 3, 100).unwrap();
        let b = gen_needle_instance(64, 5, 40, 0.6, 3, 100).unwrap();
        assert_eq!(a, b);
        let c = gen_needle_instance(64, 5, 40, 0.6, 4, 100).unwrap();
        assert_ne!(a.features, c.features);
    }

    #[test]
    fn realizable_zero_epsilon_is_exactly_linear() {
        let inst = gen_realizable_instance(50, 6, 0.0, 11).unwrap();
        assert!(inst.certificate.achieved_error <= CERT_TOL);
        assert!(inst.certificate.theta_norm <= 1.0 + CERT_TOL);
    }

    #[test]
    fn realizable_large_instance_certificate() {
        let inst = gen_realizable_instance(1000, 16, 0.001, 1).unwrap();
        let theta = &inst.certificate.theta;
        let mut err: f64 = 0.0;
        for x in 0..inst.n_actions {
            let pred: f64 = theta.iter().zip(inst.feature(x)).map(|(a, b)| a * b).sum();
            err = err.max((inst.rewards[x] - pred).abs());
            assert!((norm(inst.feature(x)) - 1.0).abs() <= NORM_TOL);
        }
        assert!(err <= 0.001 + CERT_TOL);
        assert!(norm(theta) <= 1.0 + CERT_TOL);
    }

    #[test]
    fn realizable_one_dimensional_two_actions() {
        let inst = gen_realizable_instance(2, 1, 0.1, 5).unwrap();
        for x in 0..2 {
            let pred = inst.certificate.theta[0] * inst.feature(x)[0];
            assert!((inst.rewards[x] - pred).abs() <= 0.1 + CERT_TOL);
            assert!((0.0..=1.0).contains(&inst.rewards[x]));
        }
    }

    #[test]
    fn realizable_rejects_large_epsilon() {
        assert!(matches!(
            gen_realizable_instance(10, 3, 0.3, 0),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn certify_examples() {
        let inst = gen_needle_instance(4, 1, 4, 0.5, 0, 1).unwrap();
        let c = certify_misspecification(&inst, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.achieved_error, 0.0);
        let c = certify_misspecification(&inst, &[0.0; 4]).unwrap();
        assert_eq!(c.achieved_error, 1.0);
        assert!(matches!(
            certify_misspecification(&inst, &[0.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn oracle_one_dimensional_minimax() {
        let inst = Instance::from_parts(
            InstanceKind::Realizable,
            1,
            vec![1.0, -1.0],
            vec![0.6, 0.4],
            vec![0.0],
            0.6,
        )
        .unwrap();
        // Independent grid search over [-1, 1].
        let mut grid_best = f64::INFINITY;
        for i in 0..=200_000 {
            let th = -1.0 + 2.0 * i as f64 / 200_000.0;
            grid_best = grid_best.min(f64::max((0.6 - th).abs(), (0.4 + th).abs()));
        }
        assert!((grid_best - 0.5).abs() < 1e-9);
        let cert = min_misspec_oracle(&inst, 1e-6, 10_000);
        assert!((cert.achieved_error - grid_best).abs() < 1e-6, "{cert:?}");
        assert!((cert.theta[0] - 0.1).abs() < 1e-5);
    }

    #[test]
    fn oracle_on_exact_witnesses() {
        let inst = gen_realizable_instance(30, 4, 0.0, 2).unwrap();
        assert!(min_misspec_oracle(&inst, 1e-9, 1000).achieved_error <= 1e-9);
        let needle = gen_needle_instance(5, 3, 5, 0.3, 0, 1).unwrap();
        assert!(min_misspec_oracle(&needle, 1e-9, 1000).achieved_error <= 1e-9);
    }

    #[test]
    fn oracle_starting_from_zero_improves() {
        let inst = gen_realizable_instance(40, 3, 0.05, 8).unwrap();
        let start = certify_misspecification(&inst, &[0.0; 3]).unwrap();
        let cert = min_misspec_oracle_from(&inst, &[0.0; 3], 1e-6, 20_000);
        assert!(cert.achieved_error < start.achieved_error);
        assert!(cert.theta_norm <= 1.0 + CERT_TOL);
    }

    #[test]
    fn json_round_trip_preserves_bits() {
        let inst = gen_needle_instance(12, 4, 9, 0.9, 21, 100).unwrap();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        let real = gen_realizable_instance(7, 3, 0.01, 2).unwrap();
        let json = real.to_json();
        assert!(json.contains("\"x_star\":null"));
        assert_eq!(Instance::from_json(&json).unwrap(), real);
    }
}
