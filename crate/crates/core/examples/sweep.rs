//! A small seeded sweep written as CSV to stdout.
//!
//! The same spec always produces the same bytes, whatever the worker count.
//! Needle cells at `dim < n_actions` with tiny epsilon cannot be generated and
//! show up as `gen_failed` rows rather than aborting the sweep.

use misspec_bandit::harness::{write_sweep_csv, EpsilonPrimeRule};
use misspec_bandit::{run_sweep, AgentSpec, InstanceKind, SweepSpec};

fn main() -> misspec_bandit::Result<()> {
    let mut spec = SweepSpec::new(InstanceKind::Realizable, 200, 4, 1e-3);
    spec.instance_kinds = vec![InstanceKind::Realizable, InstanceKind::Needle];
    spec.dim_grid = vec![4, 8];
    spec.epsilon_grid = vec![1e-3, 0.01];
    spec.agents = vec!["width".parse()?, "greedy_ls".parse::<AgentSpec>()?];
    spec.seeds = (0..2).collect();
    spec.epsilon_prime = EpsilonPrimeRule::Fixed(0.25);
    spec.workers = 2;

    let rows = run_sweep(&spec)?;
    write_sweep_csv(std::io::stdout().lock(), &rows, false)
}
