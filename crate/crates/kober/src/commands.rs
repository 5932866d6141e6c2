//! `eval`, `verify` and `table`.

use std::time::Instant;

use kober_core::matrix_ops::{det_power_closed_form, kober_matrix_first, kober_matrix_second, MatrixOpParams, OpKind};
use kober_core::mc::McConfig;
use kober_core::mtransform::{verify_transform, MPoint, TransformTarget};
use kober_core::quad::QuadConfig;
use kober_core::scalar_ops::{frac_derivative, Func1D, MultivarOperator, ScalarOpSpec, ScalarOperator};
use kober_core::special::gamma;
use kober_core::spd::{packed_len, SymMat};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::func::FnSpec;
use crate::num::fmt12;
use crate::report::{Case, Cell, SuiteResult, Table};
use crate::runner::Parallel;
use crate::suites::{run_suite, transform_quad, SuiteCtx, SUITES};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Kober1,
    Kober2,
    RiemannLiouville,
    WeylRight,
    WeylLeft,
    Saigo,
    FracDerivative,
}

impl Op {
    pub fn parse(name: &str) -> CliResult<Op> {
        Ok(match name {
            "kober1" => Op::Kober1,
            "kober2" => Op::Kober2,
            "riemann-liouville" | "rl" => Op::RiemannLiouville,
            "weyl-right" => Op::WeylRight,
            "weyl-left" => Op::WeylLeft,
            "saigo" => Op::Saigo,
            "frac-derivative" => Op::FracDerivative,
            _ => {
                return Err(CliError::usage(format!(
                    "unknown operator {name:?}; expected kober1, kober2, riemann-liouville, weyl-right, weyl-left, saigo or frac-derivative"
                )))
            }
        })
    }

    fn kind(self) -> Option<OpKind> {
        match self {
            Op::Kober1 => Some(OpKind::First),
            Op::Kober2 => Some(OpKind::Second),
            _ => None,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Op::Kober1 => "first-kind operator",
            Op::Kober2 => "second-kind operator",
            Op::RiemannLiouville => "Riemann-Liouville integral",
            Op::WeylRight => "right Weyl integral",
            Op::WeylLeft => "left Weyl integral",
            Op::Saigo => "Saigo operator",
            Op::FracDerivative => "fractional derivative",
        }
    }

    fn var(self) -> &'static str {
        match self {
            Op::Kober1 | Op::Kober2 | Op::Saigo => "u",
            _ => "x",
        }
    }
}

/// A finished command: the rendered report and the exit status.
pub struct Outcome {
    pub text: String,
    pub code: u8,
    /// One-line summary for stderr.
    pub summary: Option<String>,
}

pub fn execute(cfg: &RunConfig) -> CliResult<Outcome> {
    use crate::config::{Command, Format};
    match cfg.command {
        Command::Verify => {
            let r = verify(cfg)?;
            let code = u8::from(!r.passed());
            let fails: Vec<&str> = r.failures().map(|c| c.id.as_str()).collect();
            let mut summary = format!("{}: {}/{} cases passed", r.suite, r.cases.len() - fails.len(), r.cases.len());
            if !fails.is_empty() {
                summary.push_str(&format!("; failed: {}", fails.join(", ")));
            }
            let text = if cfg.format == Some(Format::Csv) { r.to_csv() } else { r.to_json() };
            Ok(Outcome { text, code, summary: Some(summary) })
        }
        Command::Eval => {
            let r = eval(cfg)?;
            let text = if cfg.format == Some(Format::Csv) { r.to_csv() } else { r.to_json() };
            Ok(Outcome { text, code: 0, summary: None })
        }
        Command::Table => {
            let (t, ok) = table(cfg)?;
            let text = if cfg.format == Some(Format::Json) { t.to_json() } else { t.to_csv() };
            Ok(Outcome { text, code: u8::from(!ok), summary: None })
        }
    }
}

pub fn verify(cfg: &RunConfig) -> CliResult<SuiteResult> {
    let name = cfg.suite.as_deref().ok_or_else(|| CliError::usage(format!("verify needs --suite; available: all, {}", SUITES.join(", "))))?;
    let ctx = SuiteCtx { seed: cfg.seed, p: cfg.p, n_samples: cfg.n_samples, s: &cfg.s, runner: &Parallel };
    let start = Instant::now();
    let cases = if name == "all" {
        let mut all = Vec::new();
        for s in SUITES {
            all.extend(run_suite(s, &ctx)?.into_iter().map(|mut c| {
                c.id = format!("{s}/{}", c.id);
                c
            }));
        }
        all
    } else {
        run_suite(name, &ctx)?
    };
    let elapsed_ms = cfg.timing.then(|| start.elapsed().as_millis() as u64);
    Ok(SuiteResult { suite: name.to_owned(), seed: cfg.seed, cases, elapsed_ms })
}

/// One evaluated point.
struct Value {
    point: Vec<f64>,
    value: f64,
    /// Quadrature convergence delta or Monte Carlo standard error.
    err: f64,
    closed: Option<f64>,
}

/// Per-variable `(ζ, α)` with a single value broadcast over `k`.
fn pairs(cfg: &RunConfig, k: usize, need_zeta: bool) -> CliResult<Vec<(f64, f64)>> {
    let spread = |name: &str, v: &[f64], default: Option<f64>| -> CliResult<Vec<f64>> {
        match v.len() {
            0 => default.map(|d| vec![d; k]).ok_or_else(|| CliError::usage(format!("--{name} is required"))),
            1 => Ok(vec![v[0]; k]),
            n if n == k => Ok(v.to_vec()),
            n => Err(CliError::usage(format!("--{name} has {n} values for {k} variables"))),
        }
    };
    let z = spread("zeta", &cfg.zeta, (!need_zeta).then_some(0.0))?;
    let a = spread("alpha", &cfg.alpha, None)?;
    Ok(z.into_iter().zip(a).collect())
}

fn point_count(cfg: &RunConfig) -> usize {
    let from_params = cfg.zeta.len().max(cfg.alpha.len()).max(1);
    cfg.k.unwrap_or(from_params)
}

fn function(cfg: &RunConfig) -> CliResult<FnSpec> {
    cfg.f.ok_or_else(|| CliError::usage("--f is required"))
}

fn evaluate(cfg: &RunConfig) -> CliResult<(Op, Vec<Value>)> {
    let op = Op::parse(cfg.op.as_deref().ok_or_else(|| CliError::usage("--op is required"))?)?;
    let f = function(cfg)?;
    if cfg.points.is_empty() {
        return Err(CliError::usage("no evaluation points; give --u (or --x)"));
    }
    let p = cfg.p.unwrap_or(1);
    let k = point_count(cfg);
    let q = QuadConfig::default();
    let check_len = |pt: &[f64], n: usize| {
        if pt.len() == n {
            Ok(())
        } else {
            Err(CliError::usage(format!("point ({}) has {} coordinates, expected {n}", fmt_point(pt), pt.len())))
        }
    };
    let mut out = Vec::with_capacity(cfg.points.len());

    if p >= 2 {
        let kind = op.kind().ok_or_else(|| CliError::usage("only kober1 and kober2 have matrix arguments"))?;
        let params = MatrixOpParams::new(kind, p, &pairs(cfg, k, true)?)?;
        let mf = f.matrix()?;
        let n = cfg.n_samples.unwrap_or(100_000);
        for (i, pt) in cfg.points.iter().enumerate() {
            check_len(pt, k * packed_len(p))?;
            let us = pt.chunks(packed_len(p)).map(|c| SymMat::from_packed(p, c)).collect::<kober_core::Result<Vec<_>>>()?;
            let mc = McConfig::with_samples(n, cfg.seed.wrapping_add(i as u64));
            let e = match kind {
                OpKind::First => kober_matrix_first(&params, &mf, &us, &mc, &Parallel)?,
                OpKind::Second => kober_matrix_second(&params, &mf, &us, &mc, &Parallel)?,
            };
            let closed = f.power().and_then(|l| det_power_closed_form(&params, l, &us).ok());
            out.push(Value { point: pt.clone(), value: e.mean, err: e.se, closed });
        }
        return Ok((op, out));
    }

    if k > 1 {
        let kind = op.kind().ok_or_else(|| CliError::usage("only kober1 and kober2 take several variables"))?;
        let opr = MultivarOperator::new(kind, &pairs(cfg, k, true)?, f.multivar(k)?, &q)?;
        for pt in &cfg.points {
            check_len(pt, k)?;
            let r = opr.eval(pt)?;
            out.push(Value { point: pt.clone(), value: r.value, err: r.last_delta, closed: None });
        }
        return Ok((op, out));
    }

    let func = f.scalar()?;
    let alpha = *cfg.alpha.first().ok_or_else(|| CliError::usage("--alpha is required"))?;
    let zeta = || cfg.zeta.first().copied().ok_or_else(|| CliError::usage("--zeta is required"));
    let spec = match op {
        Op::Kober1 => Some(ScalarOpSpec::kober1(zeta()?, alpha)),
        Op::Kober2 => Some(ScalarOpSpec::kober2(zeta()?, alpha)),
        Op::RiemannLiouville => Some(ScalarOpSpec::riemann_liouville(alpha, 0.0)),
        Op::WeylRight => Some(ScalarOpSpec::weyl_right(alpha)),
        Op::WeylLeft => Some(ScalarOpSpec::weyl_left(alpha)),
        Op::Saigo => {
            let beta = cfg.beta.ok_or_else(|| CliError::usage("--beta is required for saigo"))?;
            let g = cfg.gamma.ok_or_else(|| CliError::usage("--gamma is required for saigo"))?;
            Some(ScalarOpSpec::saigo1(alpha, beta, g, zeta()?))
        }
        Op::FracDerivative => None,
    };
    let opr = spec.map(|s| ScalarOperator::new(s, func, &q)).transpose()?;
    for pt in &cfg.points {
        check_len(pt, 1)?;
        let x = pt[0];
        let (value, err) = match &opr {
            Some(o) => {
                let r = o.eval(x)?;
                (r.value, r.last_delta)
            }
            None => (frac_derivative(alpha, &func, x, &q)?, 0.0),
        };
        let closed = spec.and_then(|s| power_closed_form(op, &s, &func, x));
        out.push(Value { point: pt.clone(), value, err, closed });
    }
    Ok((op, out))
}

/// Closed forms of the scalar operators on `v^λ`.
fn power_closed_form(op: Op, s: &ScalarOpSpec, f: &Func1D, x: f64) -> Option<f64> {
    let Func1D::Power { lambda } = *f else { return None };
    let r = |a: f64, b: f64| Some(gamma(a).ok()? / gamma(b).ok()?);
    match op {
        Op::Kober1 => Some(r(s.zeta + lambda + 1.0, s.zeta + lambda + 1.0 + s.alpha)? * x.powf(lambda)),
        Op::Kober2 => Some(r(s.zeta - lambda, s.zeta - lambda + s.alpha)? * x.powf(lambda)),
        Op::RiemannLiouville => Some(r(lambda + 1.0, lambda + 1.0 + s.alpha)? * x.powf(lambda + s.alpha)),
        _ => None,
    }
}

fn fmt_point(pt: &[f64]) -> String {
    pt.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn eval(cfg: &RunConfig) -> CliResult<SuiteResult> {
    let (op, values) = evaluate(cfg)?;
    let cases = values
        .into_iter()
        .map(|v| {
            let mut c = Case::flag(format!("{}={}", op.var(), fmt_point(&v.point)), op.describe(), true, "");
            c.got = Some(v.value);
            c.se = Some(v.err);
            c.detail = v.closed.map(|e| format!("closed form {}", fmt12(e)));
            c
        })
        .collect();
    Ok(SuiteResult { suite: format!("eval:{}", cfg.op.as_deref().unwrap_or_default()), seed: cfg.seed, cases, elapsed_ms: None })
}

/// The table and whether every row passed.
pub fn table(cfg: &RunConfig) -> CliResult<(Table, bool)> {
    if cfg.s.is_empty() {
        let (op, values) = evaluate(cfg)?;
        let power = cfg.f.and_then(|f| f.power()).filter(|_| op.var() == "u" && cfg.p.unwrap_or(1) == 1 && point_count(cfg) == 1);
        let mut columns = vec![op.var().to_owned(), "value".to_owned(), "err".to_owned()];
        if power.is_some() {
            columns.push("value/u^lambda".to_owned());
        }
        let rows = values
            .iter()
            .map(|v| {
                let mut row = vec![Cell::Text(fmt_point(&v.point)), Cell::Num(v.value), Cell::Num(v.err)];
                if let Some(l) = power {
                    row.push(Cell::Num(v.value / v.point[0].powf(l)));
                }
                row
            })
            .collect();
        return Ok((Table { columns, rows }, true));
    }

    let op = Op::parse(cfg.op.as_deref().ok_or_else(|| CliError::usage("--op is required"))?)?;
    let kind = op.kind().ok_or_else(|| CliError::usage("transform tables need --op kober1 or kober2"))?;
    let f = function(cfg)?;
    let p = cfg.p.unwrap_or(1);
    let k = cfg.s[0].len();
    let params = MatrixOpParams::new(kind, p, &pairs(cfg, k, true)?)?;
    let target = match (p, k) {
        (1, 1) => TransformTarget::Scalar(f.scalar()?),
        (1, _) => TransformTarget::Multivar(f.multivar(k)?),
        _ => TransformTarget::Matrix(f.matrix()?),
    };
    let grid: Vec<MPoint> = cfg.s.iter().map(|s| MPoint::new(s)).collect();
    let mc = McConfig::with_samples(cfg.n_samples.unwrap_or(100_000), cfg.seed);
    let reports = verify_transform(&params, &target, &grid, &transform_quad(), &mc, &Parallel);
    let ok = reports.iter().all(|r| r.pass);
    let columns = ["s", "lhs", "lhs_err", "rhs", "ratio", "pass", "detail"].map(String::from).to_vec();
    let rows = reports
        .into_iter()
        .map(|r| {
            vec![
                Cell::Text(fmt_point(&r.s)),
                Cell::Num(r.lhs),
                Cell::Num(r.lhs_err),
                Cell::Num(r.rhs),
                Cell::Num(r.ratio),
                Cell::Bool(r.pass),
                Cell::Text(r.error.map(|e| e.to_string()).unwrap_or_default()),
            ]
        })
        .collect();
    Ok((Table { columns, rows }, ok))
}
