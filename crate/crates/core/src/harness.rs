//! Seeded Monte Carlo sweeps and regime maps.
//!
//! Sweeps run every `(kind, n_actions, dim, epsilon, seed)` cell on a worker
//! pool, then sort rows by `(kind, n_actions, dim, epsilon, agent, seed)` before
//! writing, so the CSV bytes never depend on scheduling.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::agent::{min_tolerance, run_baseline, run_episode, AgentConfig, BaselineKind, Trace, WidthMode};
use crate::error::{invalid, Error, Result};
use crate::instances::{gen_needle_instance, gen_realizable_instance, Instance, InstanceKind};
use crate::numfmt::fmt12;
use crate::rng;

pub const SWEEP_COLUMNS: &str = "kind,n_actions,dim,epsilon,epsilon_prime,agent,seed,status,trials,stopped,recommendation,recommendation_optimal,bound_B,epsilon_prime_min,wide_rounds";
pub const REGIME_COLUMNS: &str =
    "epsilon,dim,n_actions,eps_sqrt_d,lower_regime,upper_regime_simplified,upper_condition_exact";

/// Tolerance fixed for the regime classification.
pub const REGIME_EPSILON_PRIME: f64 = 0.25;
/// Right-hand side of the simplified informative-regime condition.
pub const UPPER_SIMPLIFIED_BOUND: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AgentSpec {
    Width(WidthMode),
    Baseline(BaselineKind),
}

impl AgentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AgentSpec::Width(WidthMode::Relaxed) => "width_relaxed",
            AgentSpec::Width(WidthMode::Exact) => "width_exact",
            AgentSpec::Baseline(b) => b.as_str(),
        }
    }
}

impl std::str::FromStr for AgentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "width" | "width_relaxed" | "width-relaxed" => Ok(AgentSpec::Width(WidthMode::Relaxed)),
            "width_exact" | "width-exact" => Ok(AgentSpec::Width(WidthMode::Exact)),
            other => other.parse().map(AgentSpec::Baseline),
        }
    }
}

/// How `epsilon'` is chosen per cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonPrimeRule {
    Fixed(f64),
    /// `min_tolerance(dim, epsilon)`: the smallest value with a trial guarantee.
    MinTolerance,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub instance_kinds: Vec<InstanceKind>,
    pub n_actions_grid: Vec<usize>,
    pub dim_grid: Vec<usize>,
    pub epsilon_grid: Vec<f64>,
    pub agents: Vec<AgentSpec>,
    pub seeds: Vec<u64>,
    pub epsilon_prime: EpsilonPrimeRule,
    /// Defaults to `4 * n_actions`.
    pub max_trials: Option<usize>,
    pub max_attempts: usize,
    pub workers: usize,
    /// Emit a `# generated_unix=...` comment line before the header.
    pub timestamp: bool,
    pub output_path: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(kind: InstanceKind, n_actions: usize, dim: usize, epsilon: f64) -> Self {
        Self {
            instance_kinds: vec![kind],
            n_actions_grid: vec![n_actions],
            dim_grid: vec![dim],
            epsilon_grid: vec![epsilon],
            agents: vec![AgentSpec::Width(WidthMode::Relaxed)],
            seeds: vec![0],
            epsilon_prime: EpsilonPrimeRule::MinTolerance,
            max_trials: None,
            max_attempts: 1000,
            workers: 1,
            timestamp: false,
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.instance_kinds.is_empty()
            || self.n_actions_grid.is_empty()
            || self.dim_grid.is_empty()
            || self.epsilon_grid.is_empty()
            || self.agents.is_empty()
            || self.seeds.is_empty()
        {
            return Err(invalid("every sweep grid must be nonempty"));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("sweep seeds must be distinct"));
        }
        if self.epsilon_grid.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(invalid("epsilon values must be finite and nonnegative"));
        }
        if matches!(self.epsilon_prime, EpsilonPrimeRule::MinTolerance) && self.epsilon_grid.iter().any(|&e| e <= 0.0) {
            return Err(invalid("epsilon' = min_tolerance needs epsilon > 0"));
        }
        if let EpsilonPrimeRule::Fixed(e) = self.epsilon_prime {
            if !(e > 0.0) {
                return Err(invalid("epsilon' must be positive"));
            }
        }
        if self.workers == 0 || self.max_attempts == 0 || self.max_trials == Some(0) {
            return Err(invalid("workers, max_attempts and max_trials must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// Feature generation failed; the cell is infeasible at this dimension.
    GenFailed,
    /// The episode hit a numerical error.
    Failed,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::GenFailed => "gen_failed",
            RowStatus::Failed => "failed",
        }
    }
}

/// One episode's summary row.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub kind: InstanceKind,
    pub n_actions: usize,
    pub dim: usize,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub agent: &'static str,
    pub seed: u64,
    pub status: RowStatus,
    pub trials: usize,
    pub stopped: bool,
    pub recommendation: Option<usize>,
    pub recommendation_optimal: Option<bool>,
    pub bound_b: f64,
    pub epsilon_prime_min: f64,
    pub wide_rounds: usize,
    /// Not persisted; kept for in-process analysis.
    pub first_optimal_pull: Option<usize>,
}

impl SweepResult {
    fn to_csv_line(&self) -> String {
        let opt = |o: Option<String>| o.unwrap_or_default();
        [
            self.kind.as_str().to_string(),
            self.n_actions.to_string(),
            self.dim.to_string(),
            fmt12(self.epsilon),
            fmt12(self.epsilon_prime),
            self.agent.to_string(),
            self.seed.to_string(),
            self.status.as_str().to_string(),
            self.trials.to_string(),
            self.stopped.to_string(),
            opt(self.recommendation.map(|r| r.to_string())),
            opt(self.recommendation_optimal.map(|b| b.to_string())),
            fmt12(self.bound_b),
            fmt12(self.epsilon_prime_min),
            self.wide_rounds.to_string(),
        ]
        .join(",")
    }
}

/// Builds the instance for one sweep cell. Needle positions are drawn from the seed.
pub fn cell_instance(
    kind: InstanceKind,
    n_actions: usize,
    dim: usize,
    epsilon: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<Instance> {
    match kind {
        InstanceKind::Needle => {
            let x_star = rng::needle_position(seed, n_actions);
            gen_needle_instance(n_actions, x_star, dim, epsilon, seed, max_attempts)
        }
        InstanceKind::Realizable => gen_realizable_instance(n_actions, dim, epsilon, seed),
    }
}

#[derive(Clone, Copy)]
struct Cell {
    kind: InstanceKind,
    n_actions: usize,
    dim: usize,
    epsilon: f64,
    seed: u64,
}

fn run_cell(spec: &SweepSpec, cell: Cell) -> Vec<SweepResult> {
    let Cell {
        kind,
        n_actions,
        dim,
        epsilon,
        seed,
    } = cell;
    let epsilon_prime = match spec.epsilon_prime {
        EpsilonPrimeRule::Fixed(e) => e,
        EpsilonPrimeRule::MinTolerance => min_tolerance(dim, epsilon).unwrap_or(f64::INFINITY),
    };
    let max_trials = spec.max_trials.unwrap_or(4 * n_actions);
    let row = |agent: &'static str, status: RowStatus, trace: Option<&Trace>| SweepResult {
        kind,
        n_actions,
        dim,
        epsilon,
        epsilon_prime,
        agent,
        seed,
        status,
        trials: trace.map_or(0, |t| t.trials),
        stopped: trace.is_some_and(|t| t.stopped),
        recommendation: trace.and_then(|t| t.recommendation),
        recommendation_optimal: trace.and_then(|t| t.recommendation_optimal),
        bound_b: trace.map_or_else(
            || crate::agent::trial_bound(dim, epsilon).unwrap_or(f64::INFINITY),
            |t| t.bound_b,
        ),
        epsilon_prime_min: trace.map_or_else(
            || min_tolerance(dim, epsilon).unwrap_or(f64::INFINITY),
            |t| t.epsilon_prime_min,
        ),
        wide_rounds: trace.map_or(0, |t| t.wide_round_count),
        first_optimal_pull: trace.and_then(|t| t.first_optimal_pull),
    };

    let instance = match cell_instance(kind, n_actions, dim, epsilon, seed, spec.max_attempts) {
        Ok(inst) => inst,
        Err(e) => {
            log::info!("cell {kind} n={n_actions} d={dim} eps={epsilon} seed={seed}: {e}");
            return spec
                .agents
                .iter()
                .map(|a| row(a.name(), RowStatus::GenFailed, None))
                .collect();
        }
    };
    spec.agents
        .iter()
        .map(|agent| {
            let result = match agent {
                AgentSpec::Width(mode) => {
                    let cfg = AgentConfig::new(epsilon, epsilon_prime, n_actions)
                        .with_width_mode(*mode)
                        .with_max_trials(max_trials);
                    run_episode(&instance, &cfg)
                }
                AgentSpec::Baseline(kind) => run_baseline(&instance, *kind, epsilon_prime, seed, max_trials),
            };
            match result {
                Ok(trace) => row(agent.name(), RowStatus::Ok, Some(&trace)),
                Err(e) => {
                    log::warn!("{} on cell seed={seed}: {e}", agent.name());
                    row(agent.name(), RowStatus::Failed, None)
                }
            }
        })
        .collect()
}

/// Runs every grid cell and returns rows in canonical order; writes the CSV
/// when `output_path` is set.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &kind in &spec.instance_kinds {
        for &n_actions in &spec.n_actions_grid {
            for &dim in &spec.dim_grid {
                for &epsilon in &spec.epsilon_grid {
                    for &seed in &spec.seeds {
                        cells.push(Cell {
                            kind,
                            n_actions,
                            dim,
                            epsilon,
                            seed,
                        });
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::NumericalFailure(format!("worker pool: {e}")))?;
    let mut rows: Vec<SweepResult> =
        pool.install(|| cells.par_iter().flat_map_iter(|&cell| run_cell(spec, cell)).collect());
    sort_rows(&mut rows);

    if let Some(path) = &spec.output_path {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_sweep_csv(file, &rows, spec.timestamp)?;
    }
    Ok(rows)
}

pub fn sort_rows(rows: &mut [SweepResult]) {
    rows.sort_by(|a, b| {
        a.kind
            .as_str()
            .cmp(b.kind.as_str())
            .then(a.n_actions.cmp(&b.n_actions))
            .then(a.dim.cmp(&b.dim))
            .then(a.epsilon.total_cmp(&b.epsilon))
            .then(a.agent.cmp(b.agent))
            .then(a.seed.cmp(&b.seed))
    });
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepResult], timestamp: bool) -> Result<()> {
    if timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(w, "# generated_unix={secs}")?;
    }
    writeln!(w, "{SWEEP_COLUMNS}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv_line())?;
    }
    w.flush()?;
    Ok(())
}

/// A point `(epsilon, d, |X|)` classified against both regime conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct RegimeCell {
    pub epsilon: f64,
    pub dim: usize,
    pub n_actions: usize,
    pub eps_sqrt_d: f64,
    /// `eps sqrt(d) >= sqrt(8 ln |X|)`: uninformative features reach accuracy `eps`.
    pub lower_regime: bool,
    /// `eps sqrt(d) <= 1/100`.
    pub upper_regime_simplified: bool,
    /// `1/4 >= min_tolerance(d, eps)`.
    pub upper_condition_exact: bool,
}

impl RegimeCell {
    pub fn is_grey(&self) -> bool {
        !self.lower_regime && !self.upper_regime_simplified
    }

    fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            fmt12(self.epsilon),
            self.dim,
            self.n_actions,
            fmt12(self.eps_sqrt_d),
            self.lower_regime,
            self.upper_regime_simplified,
            self.upper_condition_exact
        )
    }
}

pub fn classify_regime(epsilon: f64, dim: usize, n_actions: usize) -> Result<RegimeCell> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if dim == 0 || n_actions == 0 {
        return Err(invalid("dim and n_actions must be positive"));
    }
    let eps_sqrt_d = epsilon * (dim as f64).sqrt();
    let lower_threshold = (8.0 * (n_actions as f64).ln()).sqrt();
    Ok(RegimeCell {
        epsilon,
        dim,
        n_actions,
        eps_sqrt_d,
        lower_regime: eps_sqrt_d >= lower_threshold,
        upper_regime_simplified: eps_sqrt_d <= UPPER_SIMPLIFIED_BOUND,
        upper_condition_exact: REGIME_EPSILON_PRIME >= min_tolerance(dim, epsilon)?,
    })
}

/// `steps` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && steps >= 2) {
        return Err(invalid(format!(
            "log grid needs 0 < lo < hi and steps >= 2, got {lo}:{hi}:{steps}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..steps)
        .map(|i| match i {
            0 => lo,
            i if i == steps - 1 => hi,
            i => (a + (b - a) * i as f64 / (steps - 1) as f64).exp(),
        })
        .collect())
}

/// `steps` integer values linearly spaced from `lo` to `hi` inclusive (rounded).
pub fn int_grid(lo: usize, hi: usize, steps: usize) -> Result<Vec<usize>> {
    if !(lo >= 1 && hi >= lo && steps >= 2) {
        return Err(invalid(format!(
            "integer grid needs 1 <= lo <= hi and steps >= 2, got {lo}:{hi}:{steps}"
        )));
    }
    Ok((0..steps)
        .map(|i| (lo as f64 + (hi - lo) as f64 * i as f64 / (steps - 1) as f64).round() as usize)
        .collect())
}

/// Classifies the log-spaced epsilon grid times the integer dim grid, epsilon outer.
pub fn regime_map(
    n_actions: usize,
    epsilon_range: (f64, f64, usize),
    dim_range: (usize, usize, usize),
) -> Result<Vec<RegimeCell>> {
    let eps = log_grid(epsilon_range.0, epsilon_range.1, epsilon_range.2)?;
    let dims = int_grid(dim_range.0, dim_range.1, dim_range.2)?;
    let mut cells = Vec::with_capacity(eps.len() * dims.len());
    for &e in &eps {
        for &d in &dims {
            cells.push(classify_regime(e, d, n_actions)?);
        }
    }
    Ok(cells)
}

pub fn write_regime_csv<W: Write>(mut w: W, cells: &[RegimeCell]) -> Result<()> {
    writeln!(w, "{REGIME_COLUMNS}")?;
    for c in cells {
        writeln!(w, "{}", c.to_csv_line())?;
    }
    w.flush()?;
    Ok(())
}
