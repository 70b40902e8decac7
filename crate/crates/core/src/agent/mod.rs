//! The width-maximizing agent and its identification guarantee.
//!
//! Each round the agent pulls the action whose predicted reward is most
//! uncertain over the confidence set. It stops as soon as the largest width
//! is at most `eps' - 2 eps` and recommends the optimistic action, i.e. the
//! action with the largest attainable predicted reward over the set.

pub mod baseline;

pub use baseline::{run_baseline, BaselineKind};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{ConfidenceState, WIDTH_TOL};
use crate::instances::Instance;

/// Widths closer than this (relative) to the maximum count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthMode {
    Relaxed,
    Exact,
}

impl std::str::FromStr for WidthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxed" => Ok(WidthMode::Relaxed),
            "exact" => Ok(WidthMode::Exact),
            other => Err(invalid(format!(
                "unknown width mode {other:?} (expected relaxed|exact)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentConfig {
    /// Declared misspecification.
    pub epsilon: f64,
    /// Target tolerance for identification.
    pub epsilon_prime: f64,
    pub width_mode: WidthMode,
    pub max_trials: usize,
    pub tie_break: TieBreak,
    /// Tolerance handed to the exact-width solver.
    pub solver_tol: f64,
}

impl AgentConfig {
    /// Relaxed widths, `max_trials = 4 * n_actions`.
    pub fn new(epsilon: f64, epsilon_prime: f64, n_actions: usize) -> Self {
        Self {
            epsilon,
            epsilon_prime,
            width_mode: WidthMode::Relaxed,
            max_trials: 4 * n_actions,
            tie_break: TieBreak::LowestIndex,
            solver_tol: WIDTH_TOL,
        }
    }

    pub fn with_width_mode(mut self, mode: WidthMode) -> Self {
        self.width_mode = mode;
        self
    }

    pub fn with_max_trials(mut self, max_trials: usize) -> Self {
        self.max_trials = max_trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(invalid(format!(
                "epsilon must be finite and nonnegative, got {}",
                self.epsilon
            )));
        }
        if !(self.epsilon_prime > 0.0 && self.epsilon_prime.is_finite()) {
            return Err(invalid(format!(
                "epsilon_prime must be positive, got {}",
                self.epsilon_prime
            )));
        }
        if self.max_trials == 0 {
            return Err(invalid("max_trials must be positive"));
        }
        if !(self.solver_tol > 0.0) {
            return Err(invalid("solver tolerance must be positive"));
        }
        Ok(())
    }

    /// Widths at or below this value stop the episode.
    pub fn stopping_threshold(&self) -> f64 {
        self.epsilon_prime - 2.0 * self.epsilon
    }

    /// The stopping rule can only fire when `eps' > 2 eps`.
    pub fn stopping_reachable(&self) -> bool {
        self.stopping_threshold() > 0.0
    }

    /// Whether the trial guarantee applies (`eps' >= min_tolerance(d, eps)`).
    pub fn guarantee_active(&self, dim: usize) -> bool {
        min_tolerance(dim, self.epsilon).is_ok_and(|m| self.epsilon_prime >= m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub t: usize,
    pub action: usize,
    pub width: f64,
    pub y: f64,
}

/// Per-round record and summary of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub rounds: Vec<Round>,
    pub stopped: bool,
    pub trials: usize,
    pub recommendation: Option<usize>,
    /// Ground-truth check of the recommendation against `epsilon_prime`.
    pub recommendation_optimal: Option<bool>,
    pub epsilon_prime: f64,
    pub bound_b: f64,
    pub epsilon_prime_min: f64,
    /// Rounds `tau` whose selected width was at least `2 eps sqrt(tau)`.
    pub wide_round_count: usize,
    /// Trial count at which an `eps'`-optimal action was first pulled.
    pub first_optimal_pull: Option<usize>,
}

impl Trace {
    pub(crate) fn new(instance: &Instance, epsilon: f64, epsilon_prime: f64) -> Self {
        Self {
            rounds: Vec::new(),
            stopped: false,
            trials: 0,
            recommendation: None,
            recommendation_optimal: None,
            epsilon_prime,
            bound_b: trial_bound(instance.dim, epsilon).unwrap_or(f64::INFINITY),
            epsilon_prime_min: min_tolerance(instance.dim, epsilon).unwrap_or(f64::INFINITY),
            wide_round_count: 0,
            first_optimal_pull: None,
        }
    }

    pub(crate) fn record(&mut self, instance: &Instance, round: Round) {
        if self.first_optimal_pull.is_none() && instance.is_optimal(round.action, self.epsilon_prime) {
            self.first_optimal_pull = Some(self.rounds.len() + 1);
        }
        self.rounds.push(round);
        self.trials = self.rounds.len();
    }

    pub(crate) fn finish(&mut self, instance: &Instance, recommendation: Option<usize>) {
        self.stopped = recommendation.is_some();
        self.recommendation = recommendation;
        self.recommendation_optimal = recommendation.map(|x| instance.is_optimal(x, self.epsilon_prime));
    }

    /// One JSON object per round, then a summary line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.rounds {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        let summary = serde_json::json!({
            "stopped": self.stopped,
            "trials": self.trials,
            "recommendation": self.recommendation,
            "recommendation_optimal": self.recommendation_optimal.unwrap_or(false),
            "bound_B": self.bound_b,
            "epsilon_prime_min": self.epsilon_prime_min,
            "wide_rounds": self.wide_round_count,
        });
        serde_json::to_writer(&mut w, &summary)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

/// `3 d ln(1 + 1/(d eps^2))`, the number of trials within which the agent identifies.
pub fn trial_bound(d: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if d == 0 {
        return Err(invalid("d must be positive"));
    }
    let d = d as f64;
    Ok(3.0 * d * (1.0 / (d * epsilon * epsilon)).ln_1p())
}

/// Smallest tolerance for which the trial guarantee holds: `2 eps (1 + sqrt(B))`.
pub fn min_tolerance(d: usize, epsilon: f64) -> Result<f64> {
    Ok(2.0 * epsilon * (1.0 + trial_bound(d, epsilon)?.sqrt()))
}

fn argmax_lowest(values: &[f64]) -> (usize, f64) {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = top - TIE_TOL * top.abs().max(1.0);
    let idx = values.iter().position(|&v| v >= cut).unwrap_or(0);
    (idx, values[idx])
}

/// Configured width of every action.
pub fn action_widths(state: &ConfidenceState, instance: &Instance, config: &AgentConfig) -> Result<Vec<f64>> {
    if state.dim() != instance.dim {
        return Err(Error::DimensionMismatch {
            expected: instance.dim,
            got: state.dim(),
        });
    }
    match config.width_mode {
        WidthMode::Relaxed => state.relaxed_widths(&instance.features),
        WidthMode::Exact => {
            let solver = state.exact_solver()?;
            (0..instance.n_actions)
                .map(|x| solver.width(instance.feature(x), config.solver_tol).map(|w| w.0))
                .collect()
        }
    }
}

/// Widest action under the configured width; ties go to the lowest index.
pub fn select_action(state: &ConfidenceState, instance: &Instance, config: &AgentConfig) -> Result<(usize, f64)> {
    let widths = action_widths(state, instance, config)?;
    Ok(argmax_lowest(&widths))
}

/// Optimistic action: argmax over actions of `max_{theta in Theta_t} theta . phi(x)`.
///
/// Candidates are pruned with the relaxed width when it is available: for any
/// member `theta_c`, `max theta . phi <= theta_c . phi + relaxed width`.
pub fn recommend(state: &ConfidenceState, instance: &Instance, tol: f64) -> Result<usize> {
    if state.dim() != instance.dim {
        return Err(Error::DimensionMismatch {
            expected: instance.dim,
            got: state.dim(),
        });
    }
    let solver = state.exact_solver()?;
    let n = instance.n_actions;
    let relaxed = match state.relaxed_widths(&instance.features) {
        Ok(w) => Some(w),
        Err(Error::NumericalFailure(_)) => None,
        Err(e) => return Err(e),
    };

    let mut values: Vec<Option<f64>> = vec![None; n];
    match relaxed {
        None => {
            for (x, v) in values.iter_mut().enumerate() {
                *v = Some(solver.maximize(instance.feature(x), tol)?.value);
            }
        }
        Some(relaxed) => {
            let anchor = argmax_lowest(&relaxed).0;
            let first = solver.maximize(instance.feature(anchor), tol)?;
            values[anchor] = Some(first.value);
            let center = first.theta;
            let mut order: Vec<(usize, f64)> = (0..n)
                .map(|x| {
                    let lower: f64 = center.iter().zip(instance.feature(x)).map(|(a, b)| a * b).sum();
                    (x, lower + relaxed[x] + tol)
                })
                .collect();
            order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut best = first.value;
            for (x, upper) in order {
                if upper < best - tol {
                    break;
                }
                if values[x].is_none() {
                    let v = solver.maximize(instance.feature(x), tol)?.value;
                    best = best.max(v);
                    values[x] = Some(v);
                }
            }
        }
    }
    let best = values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(values
        .iter()
        .position(|v| v.is_some_and(|v| v >= best - tol))
        .expect("at least one action evaluated"))
}

/// Runs the width-maximizing agent until it stops or exhausts `max_trials`.
///
/// The stopping check precedes each pull, so a recommendation issued after `t`
/// observations reports `trials = t`.
pub fn run_episode(instance: &Instance, config: &AgentConfig) -> Result<Trace> {
    config.validate()?;
    let mut trace = Trace::new(instance, config.epsilon, config.epsilon_prime);
    let mut state = ConfidenceState::new(instance.dim, config.epsilon)?;
    let threshold = config.stopping_threshold();
    loop {
        let (action, width) = select_action(&state, instance, config)?;
        if width <= threshold {
            let rec = recommend(&state, instance, config.solver_tol)?;
            trace.finish(instance, Some(rec));
            break;
        }
        if trace.trials >= config.max_trials {
            trace.finish(instance, None);
            break;
        }
        let tau = state.t();
        if width >= 2.0 * config.epsilon * (tau as f64).sqrt() {
            trace.wide_round_count += 1;
        }
        let y = instance.rewards[action];
        state = state.update(instance.feature(action), y)?;
        trace.record(
            instance,
            Round {
                t: tau,
                action,
                width,
                y,
            },
        );
    }
    Ok(trace)
}
