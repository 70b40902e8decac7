use proptest::prelude::*;

use misspec_bandit::geometry::WIDTH_TOL;
use misspec_bandit::harness::classify_regime;
use misspec_bandit::instances::min_misspec_oracle_from;
use misspec_bandit::rng::{stream, unit_vector};
use misspec_bandit::verify::{needle_feature_report, random_trajectory};
use misspec_bandit::{
    certify_misspecification, gen_needle_instance, gen_realizable_instance, min_misspec_oracle, required_dim,
    run_episode, AgentConfig, ConfidenceState, FixedRidge, WidthMode,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generators_are_deterministic(n in 2usize..40, dim in 2usize..10, seed in any::<u64>()) {
        let a = gen_realizable_instance(n, dim, 0.01, seed).unwrap();
        let b = gen_realizable_instance(n, dim, 0.01, seed).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());

        let x_star = (seed % n as u64) as usize;
        let a = gen_needle_instance(n, x_star, dim.max(n), 0.5, seed, 10).unwrap();
        let b = gen_needle_instance(n, x_star, dim.max(n), 0.5, seed, 10).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn episodes_are_deterministic(seed in any::<u64>(), d in 2usize..6) {
        let inst = gen_realizable_instance(60, d, 0.005, seed).unwrap();
        let cfg = AgentConfig::new(0.005, 0.1, inst.n_actions);
        prop_assert_eq!(run_episode(&inst, &cfg).unwrap(), run_episode(&inst, &cfg).unwrap());
    }

    #[test]
    fn stored_witness_certifies_declared_epsilon(n in 2usize..200, dim in 2usize..12, eps in 0.0f64..0.25, seed in any::<u64>()) {
        let inst = gen_realizable_instance(n, dim, eps, seed).unwrap();
        let cert = certify_misspecification(&inst, &inst.certificate.theta).unwrap();
        prop_assert!(cert.achieved_error <= inst.epsilon + 1e-12);
        prop_assert!(cert.theta_norm <= 1.0 + 1e-12);
        prop_assert!(inst.rewards.iter().all(|r| (0.0..=1.0).contains(r)));
    }

    #[test]
    fn oracle_never_worse_than_witness(n in 2usize..60, dim in 2usize..6, eps in 0.0f64..0.25, seed in any::<u64>()) {
        let inst = gen_realizable_instance(n, dim, eps, seed).unwrap();
        let stored = inst.certificate.achieved_error;
        prop_assert!(min_misspec_oracle(&inst, 1e-9, 500).achieved_error <= stored + 1e-15);
        // From a cold start the oracle is only a heuristic, but it must return
        // a genuine unit-ball certificate.
        let cold = min_misspec_oracle_from(&inst, &vec![0.0; dim], 1e-9, 500);
        prop_assert!(cold.theta_norm <= 1.0 + 1e-12);
        let recheck = certify_misspecification(&inst, &cold.theta).unwrap();
        prop_assert!((recheck.achieved_error - cold.achieved_error).abs() <= 1e-12);
    }

    #[test]
    fn witness_stays_in_confidence_set(dim in 1usize..6, t in 0usize..20, eps in 0.01f64..0.5, seed in any::<u64>()) {
        let mut rng = stream(seed, 1, 0, 0);
        let (state, witness) = random_trajectory(&mut rng, dim, t, eps);
        prop_assert!(state.membership(&witness).unwrap());
    }

    #[test]
    fn exact_width_dominated_by_relaxed(dim in 1usize..5, t in 0usize..8, eps in 0.05f64..0.5, seed in any::<u64>()) {
        let mut rng = stream(seed, 2, 0, 0);
        let (state, _) = random_trajectory(&mut rng, dim, t, eps);
        let phi = unit_vector(&mut rng, dim);
        let r = state.exact_width(&phi, WIDTH_TOL).unwrap();
        let exact = r.exact.unwrap();
        prop_assert!(exact <= r.relaxed + WIDTH_TOL, "exact {} relaxed {}", exact, r.relaxed);
        prop_assert!(exact >= -WIDTH_TOL);
        for theta in [r.theta_max.unwrap(), r.theta_min.unwrap()] {
            prop_assert!(state.membership(&theta).unwrap());
        }
    }

    #[test]
    fn stopping_is_sound(d in 2usize..8, eps in 0.0005f64..0.01, eps_prime in 0.05f64..0.3, seed in any::<u64>()) {
        let inst = gen_realizable_instance(100, d, eps, seed).unwrap();
        let trace = run_episode(&inst, &AgentConfig::new(eps, eps_prime, inst.n_actions)).unwrap();
        if trace.stopped {
            prop_assert_eq!(trace.recommendation_optimal, Some(true));
        }
    }

    #[test]
    fn trials_monotone_in_tolerance(d in 2usize..6, eps in 0.001f64..0.02, a in 0.05f64..0.5, b in 0.05f64..0.5, seed in any::<u64>()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let inst = gen_realizable_instance(80, d, eps, seed).unwrap();
        let t_lo = run_episode(&inst, &AgentConfig::new(eps, lo, inst.n_actions)).unwrap().trials;
        let t_hi = run_episode(&inst, &AgentConfig::new(eps, hi, inst.n_actions)).unwrap().trials;
        prop_assert!(t_hi <= t_lo);
    }

    #[test]
    fn exact_mode_never_slower(eps in 0.001f64..0.02, eps_prime in 0.05f64..0.3, seed in any::<u64>()) {
        let inst = gen_realizable_instance(40, 2, eps, seed).unwrap();
        let relaxed = run_episode(&inst, &AgentConfig::new(eps, eps_prime, inst.n_actions)).unwrap();
        let exact = run_episode(
            &inst,
            &AgentConfig::new(eps, eps_prime, inst.n_actions).with_width_mode(WidthMode::Exact),
        ).unwrap();
        // Relaxed widths plateau near 2 sqrt(2) eps and may never reach the
        // threshold; exact widths keep shrinking.
        prop_assert!(exact.trials <= relaxed.trials);
        if relaxed.stopped {
            prop_assert!(exact.stopped);
        }
        for trace in [&exact, &relaxed] {
            if trace.stopped {
                prop_assert_eq!(trace.recommendation_optimal, Some(true));
            }
        }
    }

    #[test]
    fn needle_features_pass_exhaustive_checks(n in 2usize..64, eps in 0.45f64..0.95, seed in any::<u64>()) {
        let dim = required_dim(n, eps).ceil().max(2.0) as usize;
        let inst = gen_needle_instance(n, (seed % n as u64) as usize, dim, eps, seed, 1000).unwrap();
        let (norm_dev, ip, cert) = needle_feature_report(&inst);
        prop_assert!(norm_dev <= 1e-9);
        prop_assert!(ip <= eps);
        prop_assert!(cert <= eps);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn regimes_disjoint_and_exact_condition_informative(log_n in 1u32..=20, log_eps in -6.0f64..1.5, dim in 1usize..5000) {
        let cell = classify_regime(10f64.powf(log_eps), dim, 1usize << log_n).unwrap();
        prop_assert!(!(cell.lower_regime && cell.upper_regime_simplified));
        prop_assert!(!(cell.upper_condition_exact && cell.lower_regime));
    }

    #[test]
    fn ridge_potential_respects_am_gm(dim in 1usize..16, t in 0usize..64, lambda in 0.001f64..2.0, seed in any::<u64>()) {
        let mut rng = stream(seed, 3, 0, 0);
        let mut ridge = FixedRidge::new(dim, lambda).unwrap();
        let mut prev = ridge.log_det();
        for _ in 0..t {
            let phi = unit_vector(&mut rng, dim);
            let lev = ridge.leverage(&phi);
            let growth = ridge.push(&phi).unwrap();
            prop_assert!((growth - (1.0 + lev)).abs() <= 1e-9 * growth);
            prop_assert!(ridge.log_det() >= prev);
            prev = ridge.log_det();
        }
        let cap = dim as f64 * (lambda + t as f64 / dim as f64).ln();
        prop_assert!(ridge.log_det() <= cap + 1e-9);
    }
}

#[test]
fn needle_features_at_full_scale() {
    let (n, eps) = (4096, 0.9);
    let dim = required_dim(n, eps).ceil() as usize;
    let inst = gen_needle_instance(n, 4000, dim, eps, 99, 1000).unwrap();
    let (norm_dev, ip, cert) = needle_feature_report(&inst);
    assert!(norm_dev <= 1e-9 && ip <= eps && cert <= eps, "{norm_dev} {ip} {cert}");
}

#[test]
fn zero_misspecification_set_collapses_to_interpolants() {
    let mut state = ConfidenceState::new(2, 0.0).unwrap();
    state = state.update(&[1.0, 0.0], 0.3).unwrap();
    let r = state.exact_width(&[1.0, 0.0], WIDTH_TOL).unwrap();
    assert!(r.exact.unwrap().abs() <= 1e-6);
    assert!(state.membership(&[0.3, 0.5]).unwrap());
    assert!(!state.membership(&[0.31, 0.0]).unwrap());
}
