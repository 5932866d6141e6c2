use std::process::{Command, Output};

use serde_json::Value;

fn kober_env(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kober"));
    cmd.args(args).env_remove("KOBER_SEED");
    if let Some(s) = seed {
        cmd.env("KOBER_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn kober(args: &[&str]) -> Output {
    kober_env(args, None)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect()
}

#[test]
fn eval_examples() {
    let out = kober(&["eval", "--op", "kober1", "--zeta", "1", "--alpha", "0.5", "--f", "power:2", "--u", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let got = json(&out)["cases"][0]["got"].as_f64().unwrap();
    assert!((got - 0.515_830_476_386_52).abs() < 1e-10, "{got}");

    let out = kober(&["eval", "--op", "weyl-right", "--alpha", "0.7", "--f", "exp", "--x", "1"]);
    let got = json(&out)["cases"][0]["got"].as_f64().unwrap();
    assert!((got - (-1.0f64).exp()).abs() < 1e-9);

    let out = kober(&["eval", "--op", "saigo", "--alpha", "0.5", "--beta", "0.25", "--gamma", "0.5", "--zeta", "1", "--f", "power:1", "--u", "1.3"]);
    let got = json(&out)["cases"][0]["got"].as_f64().unwrap();
    assert!((got - 0.686_835_295_525_934).abs() < 1e-7);
}

#[test]
fn eval_matrix_and_multivar() {
    let out = kober(&[
        "eval", "--op", "kober2", "--p", "2", "--zeta", "2", "--alpha", "1.5", "--f", "detpower:-0.5", "--u", "1.2,0.3,0.7",
        "--n-samples", "2e5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let case = &json(&out)["cases"][0];
    let got = case["got"].as_f64().unwrap();
    let se = case["se"].as_f64().unwrap();
    let closed: f64 = case["detail"].as_str().unwrap().trim_start_matches("closed form ").parse().unwrap();
    assert!((got - closed).abs() < 4.0 * se, "{got} vs {closed} ± {se}");

    let out = kober(&["eval", "--op", "kober1", "--zeta", "1,0.5", "--alpha", "0.5", "--f", "power:1", "--u", "1,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // separable power: product of one-variable closed forms
    let got = json(&out)["cases"][0]["got"].as_f64().unwrap();
    let g = |a: f64| libm::tgamma(a);
    let want = g(3.0) / g(3.5) * (g(2.5) / g(3.0) * 2.0);
    assert!((got / want - 1.0).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn power_table_is_homogeneous() {
    let out = kober(&["table", "--op", "kober1", "--zeta", "1", "--alpha", "0.5", "--f", "power:2", "--u", "0.5", "--u", "1", "--u", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    let c: Vec<f64> = r.iter().map(|row| row[3].parse().unwrap()).collect();
    assert!(c.iter().all(|v| (v / c[0] - 1.0).abs() < 1e-10), "{c:?}");
}

#[test]
fn transform_table_ratios() {
    let out = kober(&["table", "--op", "kober2", "--zeta", "2", "--alpha", "1.5", "--f", "exp", "--s", "0.8", "--s", "1.5", "--s", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for row in rows(&out) {
        let ratio: f64 = row[4].parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-6, "{row:?}");
    }
    let out = kober(&["table", "--op", "kober1", "--zeta", "2", "--alpha", "1.5", "--f", "exp", "--s", "3.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)[0]["detail"].as_str().unwrap().contains("violates"));
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["table", "--op", "kober1", "--zeta", "1", "--alpha", "0.5", "--f", "power:2"],
        &["eval", "--op", "kober3", "--zeta", "1", "--alpha", "0.5", "--f", "exp", "--u", "1"],
        &["eval", "--op", "kober1", "--zeta", "1", "--alpha", "0.5", "--f", "bessel", "--u", "1"],
        &["eval", "--op", "kober1", "--zeta", "1", "--alpha", "-0.5", "--f", "exp", "--u", "1"],
        &["verify"],
        &["verify", "--suite", "jacobians", "--n-samples", "1.5"],
        &[],
    ];
    for args in cases {
        let out = kober(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
    let out = kober(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--n-samples"));
}

#[test]
fn verify_jacobians_p2() {
    let out = kober(&["verify", "--suite", "jacobians", "--p", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["suite"], "jacobians");
    assert!(v["elapsed_ms"].is_null());
    let cases = v["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 120);
    assert!(cases.iter().all(|c| c["pass"] == true && c["id"].as_str().unwrap().contains("/p=2/")));
}

#[test]
fn seeds_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "command = verify\nsuite = dirichlet-chain\nseed = 0x2A\nformat = csv\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = kober(&["--config", cfg]);
    assert_eq!(from_file.status.code(), Some(0));
    assert!(rows(&from_file).iter().all(|r| r[1] == "42"));

    let overridden = kober(&["--config", cfg, "--seed", "43"]);
    assert!(rows(&overridden).iter().all(|r| r[1] == "43"));
    assert_ne!(from_file.stdout, overridden.stdout);

    let env_only = kober_env(&["verify", "--suite", "dirichlet-chain"], Some("42"));
    assert_eq!(json(&env_only)["seed"], 42);
    let env_loses = kober_env(&["--config", cfg], Some("99"));
    assert_eq!(env_loses.stdout, from_file.stdout);
    let default = kober(&["verify", "--suite", "dirichlet-chain"]);
    assert_eq!(json(&default)["seed"], 0xE4DE17);
}

#[test]
fn timing_is_opt_in() {
    let out = kober(&["verify", "--suite", "jacobians", "--p", "1", "--timing"]);
    assert!(json(&out)["elapsed_ms"].is_u64());
}

#[test]
fn out_file_written_after_success() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let p = path.to_str().unwrap();
    let out = kober(&["verify", "--suite", "jacobians", "--p", "1", "--format", "csv", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("suite,seed,id,paper_ref,expected,got,se,tol,pass,detail,elapsed_ms\n"));
}
