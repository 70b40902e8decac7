//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! Run alone with `cargo test --release --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use misspec_bandit::agent::{run_baseline, BaselineKind};
use misspec_bandit::harness::{classify_regime, regime_map};
use misspec_bandit::verify::{self, needle_feature_report};
use misspec_bandit::{
    gen_needle_instance, gen_realizable_instance, min_tolerance, run_episode, trial_bound, AgentConfig,
};

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(lines: &mut Vec<Line>, name: &'static str, pass: bool, detail: String) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    lines.push(Line { name, pass, detail });
}

struct UpperStats {
    runs: usize,
    over_budget: usize,
    not_stopped: usize,
    suboptimal: usize,
    wide_violations: usize,
    worst_ratio: f64,
}

fn upper_bound_runs() -> UpperStats {
    let eps = 1e-3;
    let mut s = UpperStats {
        runs: 0,
        over_budget: 0,
        not_stopped: 0,
        suboptimal: 0,
        wide_violations: 0,
        worst_ratio: 0.0,
    };
    for d in [4, 8, 16] {
        let eps_prime = min_tolerance(d, eps).unwrap();
        let b = trial_bound(d, eps).unwrap();
        let cap = b.ceil() as usize;
        for seed in 0..100 {
            let inst = gen_realizable_instance(1000, d, eps, seed).unwrap();
            let cfg = AgentConfig::new(eps, eps_prime, inst.n_actions);
            let trace = run_episode(&inst, &cfg).unwrap();
            s.runs += 1;
            s.not_stopped += usize::from(!trace.stopped);
            s.over_budget += usize::from(trace.trials > cap);
            s.suboptimal += usize::from(trace.recommendation_optimal != Some(true));
            s.wide_violations += usize::from(trace.wide_round_count as f64 > b + 1.0);
            s.worst_ratio = s.worst_ratio.max(trace.trials as f64 / cap as f64);
        }
    }
    s
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

fn main() -> ExitCode {
    let mut lines = Vec::new();

    let clock = Instant::now();
    let up = upper_bound_runs();
    let upper_secs = clock.elapsed().as_secs_f64();
    report(
        &mut lines,
        "upper-bound reproduction",
        up.over_budget == 0 && up.not_stopped == 0 && up.suboptimal == 0,
        format!(
            "{} runs, {} unstopped, {} over ceil(B), {} not eps'-optimal, max trials/ceil(B) {:.4} ({upper_secs:.1}s)",
            up.runs, up.not_stopped, up.over_budget, up.suboptimal, up.worst_ratio
        ),
    );
    report(
        &mut lines,
        "counting-lemma check",
        up.wide_violations == 0 && up.runs == 300,
        format!("{} episodes, {} with wide rounds > B + 1", up.runs, up.wide_violations),
    );

    // Needle positions are stratified over the action range so the exhaustive
    // scan's sample mean is not at the mercy of 50 uniform draws.
    let (n, eps, dim, eps_prime) = (256usize, 0.49, 185usize, 0.4);
    let clock = Instant::now();
    let mut identification = Vec::new();
    let mut first_hits = Vec::new();
    let mut exhaustive = Vec::new();
    let mut cert_fail = 0;
    let mut worst_ip: f64 = 0.0;
    let mut worst_cert: f64 = 0.0;
    for i in 0..50u64 {
        let x_star = ((2 * i as usize + 1) * n) / 100;
        let inst = gen_needle_instance(n, x_star, dim, eps, i, 1000).unwrap();
        let (norm_dev, ip, cert) = needle_feature_report(&inst);
        worst_ip = worst_ip.max(ip);
        worst_cert = worst_cert.max(cert);
        if norm_dev > 1e-9 || ip > eps || cert > eps {
            cert_fail += 1;
        }
        let trace = run_episode(&inst, &AgentConfig::new(eps, eps_prime, n)).unwrap();
        // An episode that never stops never identifies: censored at infinity.
        identification.push(if trace.stopped {
            trace.trials as f64
        } else {
            f64::INFINITY
        });
        first_hits.push(trace.first_optimal_pull.map_or(f64::INFINITY, |t| t as f64));
        exhaustive.push(
            run_baseline(&inst, BaselineKind::Exhaustive, eps_prime, i, 4 * n)
                .unwrap()
                .trials as f64,
        );
    }
    let needle_secs = clock.elapsed().as_secs_f64();
    let med = median(identification);
    let mean_ex = exhaustive.iter().sum::<f64>() / exhaustive.len() as f64;
    let target = (n as f64 + 1.0) / 2.0;
    report(
        &mut lines,
        "lower-regime demonstration",
        med >= n as f64 / 4.0 && (mean_ex - target).abs() <= 0.1 * target,
        format!(
            "width agent median trials-to-identification {med} (>= {}), first needle pull median {}, exhaustive mean {mean_ex:.2} (target {target} +/- 10%) ({needle_secs:.1}s)",
            n / 4,
            median(first_hits)
        ),
    );

    let w = verify::check_width_oracle(200, 2024);
    report(&mut lines, "width oracle equivalence", w.passed(), w.to_string());

    let mdl = verify::check_determinant_lemma(1000, 2024);
    let amgm = verify::check_am_gm_cap(1000, 2024);
    report(
        &mut lines,
        "linear-algebra identities",
        mdl.passed() && amgm.passed(),
        format!("{mdl}; {amgm}"),
    );

    let extra = verify::check_needle_certificates(&(0..10).collect::<Vec<u64>>());
    report(
        &mut lines,
        "feature certificate",
        cert_fail == 0 && extra.passed(),
        format!(
            "50 acceptance needles: {cert_fail} failures, max |<phi_x, phi_y>| {worst_ip:.4}, max certificate error {worst_cert:.4}; {extra}"
        ),
    );

    let mut regime_ok = true;
    let a = classify_regime(0.5, 128, 16).unwrap();
    regime_ok &= a.eps_sqrt_d == 0.5 * 128f64.sqrt() && a.lower_regime && !a.upper_regime_simplified;
    let b = classify_regime(0.0005, 100, 2).unwrap();
    regime_ok &= b.eps_sqrt_d == 0.0005 * 10.0 && b.upper_regime_simplified && !b.lower_regime;
    let c = classify_regime(0.1, 4, 1024).unwrap();
    regime_ok &= c.eps_sqrt_d == 0.2 && c.is_grey();
    let mut cells = 0;
    let mut overlap = 0;
    let mut exact_in_lower = 0;
    for n in [2usize, 1 << 10, 1 << 20] {
        for cell in regime_map(n, (1e-4, 10.0, 60), (1, 1024, 60)).unwrap() {
            cells += 1;
            overlap += usize::from(cell.lower_regime && cell.upper_regime_simplified);
            exact_in_lower += usize::from(cell.upper_condition_exact && cell.lower_regime);
        }
    }
    report(
        &mut lines,
        "regime formulas",
        regime_ok && overlap == 0 && exact_in_lower == 0 && cells == 3 * 3600,
        format!(
            "quoted evaluations {}, {cells} cells, {overlap} in both regimes, {exact_in_lower} exact-upper cells in the lower regime",
            if regime_ok { "reproduced" } else { "MISMATCH" }
        ),
    );

    let failed: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.name).collect();
    println!("{}/{} criteria passed", lines.len() - failed.len(), lines.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for l in lines.iter().filter(|l| !l.pass) {
            eprintln!("failed: {} ({})", l.name, l.detail);
        }
        ExitCode::FAILURE
    }
}
