//! Acceptance run: one PASS/FAIL line per criterion, each with its case
//! count, wall time and time budget. Exits non-zero when any criterion
//! fails.

use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use kober::report::Case;
use kober::runner::Parallel;
use kober::suites::{run_suite, SuiteCtx};
use kober_core::mc::DEFAULT_SEED;

struct Run {
    cases: Vec<Case>,
    elapsed: Duration,
}

fn suite(name: &str) -> Run {
    let ctx = SuiteCtx { seed: DEFAULT_SEED, p: None, n_samples: None, s: &[], runner: &Parallel };
    let start = Instant::now();
    let cases = run_suite(name, &ctx).unwrap_or_else(|e| panic!("suite {name}: {e}"));
    Run { cases, elapsed: start.elapsed() }
}

struct Line {
    pass: bool,
    text: String,
}

fn criterion(n: u32, title: &str, run: &Run, prefixes: &[&str], budget_s: f64) -> Line {
    let picked: Vec<&Case> = run.cases.iter().filter(|c| prefixes.is_empty() || prefixes.iter().any(|p| c.id.starts_with(p))).collect();
    let failed: Vec<&str> = picked.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
    let secs = run.elapsed.as_secs_f64();
    let in_time = secs < budget_s;
    let pass = !picked.is_empty() && failed.is_empty() && in_time;
    let mut text = format!(
        "criterion {n:>2} {}  {title}: {}/{} cases, {secs:.1} s (budget {budget_s} s)",
        if pass { "PASS" } else { "FAIL" },
        picked.len() - failed.len(),
        picked.len()
    );
    if !failed.is_empty() {
        text.push_str(&format!("; failed: {}", failed.join(", ")));
    }
    if !in_time {
        text.push_str("; over time budget");
    }
    Line { pass, text }
}

fn kober(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kober")).args(args).env_remove("KOBER_SEED").output().expect("binary runs")
}

fn cli_contract() -> Line {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut checks = 0;
    let mut check = |ok: bool, what: &str| {
        checks += 1;
        if !ok {
            problems.push(what.to_owned());
        }
    };

    for suite in ["scalar-closed-forms", "jacobians", "dirichlet-chain"] {
        let a = kober(&["verify", "--suite", suite, "--seed", "7"]);
        let b = kober(&["verify", "--suite", suite, "--seed", "7"]);
        check(a.status.code() == Some(0) && !a.stdout.is_empty() && a.stdout == b.stdout, &format!("{suite} is not byte-identical"));
    }

    let dir = tempfile::tempdir().expect("temp dir");
    let out = dir.path().join("report.json");
    let out_s = out.to_str().expect("utf-8 path");
    let r = kober(&["verify", "--suite", "no-such-suite", "--out", out_s]);
    let listed = String::from_utf8_lossy(&r.stderr).contains("mtransform-second");
    check(r.status.code() == Some(2) && listed && !Path::new(&out).exists(), "unknown suite must exit 2 with the suite list");
    let r = kober(&["eval", "--op", "kober1", "--zeta", "one", "--alpha", "0.5", "--f", "power:2", "--u", "1", "--out", out_s]);
    check(r.status.code() == Some(2) && !Path::new(&out).exists(), "malformed flag must exit 2 without an output file");
    let r = kober(&["eval", "--op", "kober1", "--zeta", "-3", "--alpha", "0.5", "--f", "power:0", "--u", "1"]);
    check(r.status.code() == Some(2) && String::from_utf8_lossy(&r.stderr).contains("violates"), "domain error must exit 2 naming the bound");
    let r = kober(&["verify", "--suite", "mtransform-first", "--p", "1", "--s", "3.5"]);
    check(r.status.code() == Some(1), "out-of-domain transform point must fail the suite with exit 1");
    let r = kober(&["eval", "--op", "kober1", "--zeta", "1", "--alpha", "0.5", "--f", "power:2", "--u", "1", "--out", out_s]);
    let written = std::fs::read_to_string(&out).unwrap_or_default();
    check(r.status.code() == Some(0) && written.contains("\"got\": 0.515830476387"), "eval must exit 0 and write the report");

    let secs = start.elapsed().as_secs_f64();
    let pass = problems.is_empty() && secs < 10.0;
    let mut text = format!(
        "criterion 11 {}  CLI determinism and exit statuses: {}/{checks} checks, {secs:.1} s (budget 10 s)",
        if pass { "PASS" } else { "FAIL" },
        checks - problems.len()
    );
    if !problems.is_empty() {
        text.push_str(&format!("; {}", problems.join("; ")));
    }
    Line { pass, text }
}

fn main() -> ExitCode {
    let mut lines = Vec::new();
    let mut emit = |l: Line| {
        println!("{}", l.text);
        lines.push(l.pass);
    };

    let scalar = suite("scalar-closed-forms");
    emit(criterion(1, "scalar closed forms", &scalar, &["kober1/", "kober2/", "riemann-liouville/", "weyl-right/"], 5.0));
    emit(criterion(2, "Saigo reduction and oracle", &scalar, &["saigo/"], 10.0));
    emit(criterion(3, "fractional derivative", &scalar, &["frac-derivative/", "derivative-of-integral/"], 5.0));
    emit(criterion(4, "Jacobians against finite differences", &suite("jacobians"), &[], 10.0));
    emit(criterion(5, "matrix beta integral and multivariate gamma", &suite("beta-moments"), &[], 60.0));
    emit(criterion(6, "Dirichlet chain", &suite("dirichlet-chain"), &[], 60.0));
    let density = suite("density-identity");
    emit(criterion(7, "operator estimator consistency", &density, &["estimator/", "se-rate/"], 120.0));
    emit(criterion(8, "second-kind M-transform", &suite("mtransform-second"), &[], 180.0));
    emit(criterion(9, "first-kind M-transform", &suite("mtransform-first"), &[], 180.0));
    emit(criterion(10, "density identity", &density, &["density-mode/"], 120.0));
    emit(cli_contract());

    let passed = lines.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", lines.len());
    if passed == lines.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
