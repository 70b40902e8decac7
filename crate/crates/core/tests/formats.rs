use misspec_bandit::agent::{run_episode, AgentConfig};
use misspec_bandit::harness::{
    classify_regime, run_sweep, write_regime_csv, write_sweep_csv, REGIME_COLUMNS, SWEEP_COLUMNS,
};
use misspec_bandit::{gen_needle_instance, gen_realizable_instance, Instance, InstanceKind, SweepSpec};

#[test]
fn csv_headers() {
    assert_eq!(
        SWEEP_COLUMNS,
        "kind,n_actions,dim,epsilon,epsilon_prime,agent,seed,status,trials,stopped,recommendation,recommendation_optimal,bound_B,epsilon_prime_min,wide_rounds"
    );
    assert_eq!(
        REGIME_COLUMNS,
        "epsilon,dim,n_actions,eps_sqrt_d,lower_regime,upper_regime_simplified,upper_condition_exact"
    );
}

#[test]
fn regime_csv_rows() {
    let mut buf = Vec::new();
    write_regime_csv(&mut buf, &[classify_regime(0.1, 4, 1024).unwrap()]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec![REGIME_COLUMNS, "0.1,4,1024,0.2,false,false,false"]);
}

#[test]
fn sweep_csv_rows() {
    let rows = run_sweep(&SweepSpec::new(InstanceKind::Realizable, 20, 3, 0.001)).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows, false).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells.len(), SWEEP_COLUMNS.split(',').count());
    assert_eq!(&cells[..3], &["realizable", "20", "3"]);
    assert_eq!(cells[5], "width_relaxed");
    assert_eq!(cells[7], "ok");
    assert!(matches!(cells[9], "true" | "false"));
    // 12 significant digits at most.
    let digits = cells[12].chars().filter(|c| c.is_ascii_digit()).count();
    assert!(digits <= 12, "{}", cells[12]);
}

#[test]
fn instance_json_schema() {
    let inst = gen_needle_instance(5, 2, 5, 0.5, 3, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&inst.to_json()).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "certificate",
            "dim",
            "epsilon",
            "features",
            "kind",
            "n_actions",
            "rewards",
            "seed",
            "x_star"
        ]
    );
    assert_eq!(v["kind"], "needle");
    assert_eq!(v["x_star"], 2);
    assert_eq!(v["features"].as_array().unwrap().len(), 25);
    assert!(v["certificate"]["theta"].is_array() && v["certificate"]["achieved_error"].is_number());

    let inst = gen_realizable_instance(5, 3, 0.01, 3).unwrap();
    let json = inst.to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["x_star"].is_null());
    assert_eq!(v["kind"], "realizable");
    assert_eq!(Instance::from_json(&json).unwrap(), inst);
}

#[test]
fn trace_jsonl_layout() {
    let inst = gen_realizable_instance(30, 3, 0.001, 1).unwrap();
    let trace = run_episode(&inst, &AgentConfig::new(0.001, 0.2, 30)).unwrap();
    let mut buf = Vec::new();
    trace.write_jsonl(&mut buf).unwrap();
    let lines: Vec<serde_json::Value> = String::from_utf8(buf)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), trace.trials + 1);
    for (i, round) in lines[..trace.trials].iter().enumerate() {
        let mut keys: Vec<&str> = round.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["action", "t", "width", "y"]);
        assert_eq!(round["t"], i);
    }
    let summary = lines.last().unwrap().as_object().unwrap();
    let mut keys: Vec<&str> = summary.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "bound_B",
            "epsilon_prime_min",
            "recommendation",
            "recommendation_optimal",
            "stopped",
            "trials",
            "wide_rounds"
        ]
    );
}
