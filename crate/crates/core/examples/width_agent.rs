//! The width-maximizing agent on informative instances.
//!
//! With `eps' = min_tolerance(d, eps)` the agent must stop within
//! `B = 3 d ln(1 + 1/(d eps^2))` trials and recommend an `eps'`-optimal action.

use misspec_bandit::{gen_realizable_instance, min_tolerance, run_episode, trial_bound, AgentConfig, WidthMode};

fn main() -> misspec_bandit::Result<()> {
    let eps = 1e-3;
    println!(
        "{:>3} {:>5} {:>9} {:>7} {:>8} {:>6} {:>8}",
        "d", "seed", "eps'", "trials", "B", "wide", "optimal"
    );
    for d in [2, 4, 8, 16] {
        let eps_prime = min_tolerance(d, eps)?;
        for seed in 0..3 {
            let inst = gen_realizable_instance(1000, d, eps, seed)?;
            let cfg = AgentConfig::new(eps, eps_prime, inst.n_actions);
            let trace = run_episode(&inst, &cfg)?;
            println!(
                "{d:>3} {seed:>5} {eps_prime:>9.5} {:>7} {:>8.1} {:>6} {:>8}",
                trace.trials,
                trial_bound(d, eps)?,
                trace.wide_round_count,
                trace.recommendation_optimal.unwrap_or(false)
            );
        }
    }

    // Exact widths never stop later than relaxed ones.
    let inst = gen_realizable_instance(100, 2, 0.01, 11)?;
    for mode in [WidthMode::Relaxed, WidthMode::Exact] {
        let cfg = AgentConfig::new(0.01, 0.1, inst.n_actions).with_width_mode(mode);
        let trace = run_episode(&inst, &cfg)?;
        println!(
            "{mode:?}: trials={} recommendation={:?}",
            trace.trials, trace.recommendation
        );
    }
    Ok(())
}
