//! `mbl`: command-line front end for the misspecified-bandit simulator.
//!
//! Exit codes: 0 success, 1 invalid input, 2 runtime failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use misspec_bandit::agent::{run_episode, AgentConfig, WidthMode};
use misspec_bandit::harness::{
    int_grid, log_grid, regime_map, run_sweep, write_regime_csv, AgentSpec, EpsilonPrimeRule, SweepSpec,
};
use misspec_bandit::instances::{gen_needle_instance, gen_realizable_instance, Instance, InstanceKind};
use misspec_bandit::numfmt::fmt12;
use misspec_bandit::{run_baseline, verify, BaselineKind, Error};

#[derive(Parser)]
#[command(name = "mbl", version, about = "Pure exploration with misspecified linear features")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as JSON.
    Gen(GenArgs),
    /// Run one episode on an instance file.
    Run(RunArgs),
    /// Monte Carlo sweep over instance and agent grids.
    Sweep(SweepArgs),
    /// Classify an (epsilon, dim) grid into lower/upper-bound regimes.
    RegimeMap(RegimeArgs),
    /// Brute-force oracle checks of the numerical core.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: InstanceKind,
    #[arg(long)]
    n_actions: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    seed: u64,
    /// Position of the rewarding action (needle only).
    #[arg(long)]
    x_star: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    max_attempts: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Declared misspecification; defaults to the instance's.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    epsilon_prime: f64,
    #[arg(long, default_value = "relaxed")]
    width_mode: WidthMode,
    /// Defaults to 4 * n_actions.
    #[arg(long)]
    max_trials: Option<usize>,
    /// Run a baseline instead of the width agent.
    #[arg(long)]
    baseline: Option<BaselineKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace JSONL destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated: needle, realizable.
    #[arg(long, default_value = "realizable")]
    kinds: String,
    /// Comma list or lo:hi:steps.
    #[arg(long)]
    n_actions: String,
    /// Comma list or lo:hi:steps.
    #[arg(long)]
    dims: String,
    /// Comma list or lo:hi:steps (log-spaced).
    #[arg(long)]
    eps: String,
    /// Comma-separated agent names: width_relaxed, width_exact, exhaustive,
    /// uniform_random, greedy_ls.
    #[arg(long, default_value = "width_relaxed")]
    agents: String,
    /// First seed; the sweep uses `seed .. seed + n_seeds`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    n_seeds: u64,
    /// A number, or `min` for the smallest tolerance with a guarantee.
    #[arg(long, default_value = "min")]
    epsilon_prime: String,
    #[arg(long)]
    max_trials: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    max_attempts: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    no_timestamp: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegimeArgs {
    #[arg(long)]
    n_actions: usize,
    /// lo:hi:steps, log-spaced.
    #[arg(long)]
    eps: String,
    /// lo:hi:steps, integer-spaced.
    #[arg(long)]
    dim: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Fewer cases per suite.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn create(path: &PathBuf) -> std::result::Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn range3(s: &str) -> std::result::Result<Option<(&str, &str, usize)>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => Ok(None),
        [lo, hi, steps] => {
            let steps = steps
                .parse()
                .map_err(|_| Failure::Invalid(format!("bad step count in {s:?}")))?;
            Ok(Some((lo, hi, steps)))
        }
        _ => Err(Failure::Invalid(format!("expected lo:hi:steps, got {s:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Invalid(format!("cannot parse {s:?}")))
}

fn list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, Failure> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_num).collect()
}

fn float_grid(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    match range3(s)? {
        Some((lo, hi, steps)) => Ok(log_grid(parse_num(lo)?, parse_num(hi)?, steps)?),
        None => list(s),
    }
}

fn int_list(s: &str) -> std::result::Result<Vec<usize>, Failure> {
    match range3(s)? {
        Some((lo, hi, steps)) => Ok(int_grid(parse_num(lo)?, parse_num(hi)?, steps)?),
        None => list(s),
    }
}

fn named<T>(s: &str) -> std::result::Result<Vec<T>, Failure>
where
    T: std::str::FromStr<Err = Error>,
{
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(Failure::from))
        .collect()
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let inst = match a.kind {
        InstanceKind::Needle => {
            let x_star = a
                .x_star
                .ok_or_else(|| Failure::Invalid("--x-star is required for needle instances".into()))?;
            gen_needle_instance(a.n_actions, x_star, a.dim, a.epsilon, a.seed, a.max_attempts)?
        }
        InstanceKind::Realizable => gen_realizable_instance(a.n_actions, a.dim, a.epsilon, a.seed)?,
    };
    let mut w = create(&a.out)?;
    inst.write_json(&mut w)?;
    w.flush()?;
    println!(
        "wrote {} instance to {}: n_actions={} dim={} epsilon={} certificate_error={}",
        inst.kind,
        a.out.display(),
        inst.n_actions,
        inst.dim,
        fmt12(inst.epsilon),
        fmt12(inst.certificate.achieved_error)
    );
    Ok(())
}

fn cmd_run(a: RunArgs) -> CmdResult {
    let file = File::open(&a.instance).map_err(|e| Failure::Runtime(format!("{}: {e}", a.instance.display())))?;
    let inst = Instance::read_json(std::io::BufReader::new(file))?;
    let epsilon = a.epsilon.unwrap_or(inst.epsilon);
    let mut cfg = AgentConfig::new(epsilon, a.epsilon_prime, inst.n_actions).with_width_mode(a.width_mode);
    if let Some(m) = a.max_trials {
        cfg = cfg.with_max_trials(m);
    }
    cfg.validate()?;
    let trace = match a.baseline {
        Some(kind) => run_baseline(&inst, kind, a.epsilon_prime, a.seed, cfg.max_trials)?,
        None => {
            if !cfg.stopping_reachable() {
                println!(
                    "warning: stopping rule unreachable (epsilon'={} <= 2*epsilon={}); running to the trial budget",
                    fmt12(a.epsilon_prime),
                    fmt12(2.0 * epsilon)
                );
            }
            run_episode(&inst, &cfg)?
        }
    };
    if let Some(out) = &a.out {
        let mut w = create(out)?;
        trace.write_jsonl(&mut w)?;
        w.flush()?;
    }
    let rec = trace.recommendation.map_or("none".to_string(), |r| r.to_string());
    let optimal = trace.recommendation_optimal.unwrap_or(false);
    println!(
        "trials={} stopped={} recommendation={} optimal={} bound_B={} epsilon_prime_min={} guarantee_active={}",
        trace.trials,
        trace.stopped,
        rec,
        optimal,
        fmt12(trace.bound_b),
        fmt12(trace.epsilon_prime_min),
        cfg.guarantee_active(inst.dim)
    );
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let n_seeds = a.n_seeds;
    let epsilon_prime = match a.epsilon_prime.trim() {
        "min" => EpsilonPrimeRule::MinTolerance,
        v => EpsilonPrimeRule::Fixed(parse_num(v)?),
    };
    let spec = SweepSpec {
        instance_kinds: named(&a.kinds)?,
        n_actions_grid: int_list(&a.n_actions)?,
        dim_grid: int_list(&a.dims)?,
        epsilon_grid: float_grid(&a.eps)?,
        agents: named::<AgentSpec>(&a.agents)?,
        seeds: (0..n_seeds).map(|i| a.seed.wrapping_add(i)).collect(),
        epsilon_prime,
        max_trials: a.max_trials,
        max_attempts: a.max_attempts,
        workers: a.workers,
        timestamp: !a.no_timestamp,
        output_path: a.out.clone(),
    };
    let rows = run_sweep(&spec)?;
    let ok = rows.iter().filter(|r| r.status.as_str() == "ok").count();
    let stopped = rows.iter().filter(|r| r.stopped).count();
    println!("sweep: {} rows, {} ok, {} stopped", rows.len(), ok, stopped);
    if let Some(out) = &a.out {
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_regime_map(a: RegimeArgs) -> CmdResult {
    let (elo, ehi, esteps) = range3(&a.eps)?.ok_or_else(|| Failure::Invalid("--eps expects lo:hi:steps".into()))?;
    let (dlo, dhi, dsteps) = range3(&a.dim)?.ok_or_else(|| Failure::Invalid("--dim expects lo:hi:steps".into()))?;
    let cells = regime_map(
        a.n_actions,
        (parse_num(elo)?, parse_num(ehi)?, esteps),
        (parse_num(dlo)?, parse_num(dhi)?, dsteps),
    )?;
    let lower = cells.iter().filter(|c| c.lower_regime).count();
    let upper = cells.iter().filter(|c| c.upper_regime_simplified).count();
    let grey = cells.iter().filter(|c| c.is_grey()).count();
    println!(
        "regime map: {} cells, {} lower, {} upper (simplified), {} grey",
        cells.len(),
        lower,
        upper,
        grey
    );
    if let Some(out) = &a.out {
        let mut w = create(out)?;
        write_regime_csv(&mut w, &cells)?;
        w.flush()?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let outcomes = verify::run_all(a.quick, a.seed);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} verification suite(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MBL_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::RegimeMap(a) => cmd_regime_map(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
