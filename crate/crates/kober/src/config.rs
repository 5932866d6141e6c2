//! Command line, configuration file and their merge.
//!
//! A `--config FILE` holds `key = value` lines using the long flag names
//! (`n-samples = 1e5`, `zeta = 1, 0.5`). Flags given on the command line
//! override the file. `KOBER_SEED` supplies the seed when neither sets one.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use kober_core::mc::DEFAULT_SEED;

use crate::error::{CliError, CliResult};
use crate::func::FnSpec;
use crate::num::{parse_count, parse_list, parse_number, parse_seed};

/// Evaluate and verify fractional integral operators of the first and
/// second kind.
#[derive(Parser, Debug, Clone, Default, PartialEq)]
#[command(name = "kober", version, disable_help_subcommand = true)]
pub struct Args {
    /// eval, verify or table
    pub command: Option<String>,
    /// Operator for eval/table: kober1, kober2, riemann-liouville,
    /// weyl-right, weyl-left, saigo, frac-derivative
    #[arg(long)]
    pub op: Option<String>,
    /// Verification suite
    #[arg(long)]
    pub suite: Option<String>,
    /// Matrix dimension
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Number of variables
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// ζ, one per variable (repeat or comma-separate)
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Vec<String>,
    /// α, one per variable (repeat or comma-separate)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Vec<String>,
    /// Saigo β
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Saigo γ
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Test function, e.g. exp, power:2, powerexp:1:1, wishart:5
    #[arg(long)]
    pub f: Option<String>,
    /// Evaluation point; repeat for a grid. Matrices are packed upper
    /// triangles, k matrices separated by ';'
    #[arg(long, allow_hyphen_values = true)]
    pub u: Vec<String>,
    /// Alias of --u for the Riemann-Liouville family
    #[arg(long, allow_hyphen_values = true)]
    pub x: Vec<String>,
    /// Transform point; repeat for a grid, comma-separate for k > 1
    #[arg(long, allow_hyphen_values = true)]
    pub s: Vec<String>,
    /// Monte Carlo sample size
    #[arg(long = "n-samples")]
    pub n_samples: Option<String>,
    /// Seed, decimal or 0x-hex
    #[arg(long)]
    pub seed: Option<String>,
    /// json or csv
    #[arg(long)]
    pub format: Option<String>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Record wall-clock time in the report
    #[arg(long)]
    pub timing: bool,
}

impl Args {
    /// Parses a configuration file into the same shape as the flags.
    pub fn from_file(path: &Path) -> CliResult<Args> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        Self::from_config_text(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn from_config_text(text: &str) -> CliResult<Args> {
        let mut a = Args::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| CliError::usage(format!("line {}: expected key = value", n + 1)))?;
            let value = value.trim().to_owned();
            match key.trim().replace('_', "-").as_str() {
                "command" => a.command = Some(value),
                "op" => a.op = Some(value),
                "suite" => a.suite = Some(value),
                "p" => a.p = Some(value),
                "k" => a.k = Some(value),
                "zeta" => a.zeta.push(value),
                "alpha" => a.alpha.push(value),
                "beta" => a.beta = Some(value),
                "gamma" => a.gamma = Some(value),
                "f" => a.f = Some(value),
                "u" => a.u.push(value),
                "x" => a.x.push(value),
                "s" => a.s.push(value),
                "n-samples" => a.n_samples = Some(value),
                "seed" => a.seed = Some(value),
                "format" => a.format = Some(value),
                "out" => a.out = Some(PathBuf::from(value)),
                "timing" => {
                    a.timing = match value.as_str() {
                        "true" | "1" | "yes" => true,
                        "false" | "0" | "no" => false,
                        _ => return Err(CliError::usage(format!("line {}: timing must be true or false", n + 1))),
                    }
                }
                "config" => return Err(CliError::usage(format!("line {}: nested config files are not supported", n + 1))),
                other => return Err(CliError::usage(format!("line {}: unknown key {other:?}", n + 1))),
            }
        }
        Ok(a)
    }

    /// `self` with gaps filled from `file`.
    pub fn over(self, file: Args) -> Args {
        fn pick<T>(a: Option<T>, b: Option<T>) -> Option<T> {
            a.or(b)
        }
        fn pick_vec<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Args {
            command: pick(self.command, file.command),
            op: pick(self.op, file.op),
            suite: pick(self.suite, file.suite),
            p: pick(self.p, file.p),
            k: pick(self.k, file.k),
            zeta: pick_vec(self.zeta, file.zeta),
            alpha: pick_vec(self.alpha, file.alpha),
            beta: pick(self.beta, file.beta),
            gamma: pick(self.gamma, file.gamma),
            f: pick(self.f, file.f),
            u: pick_vec(self.u, file.u),
            x: pick_vec(self.x, file.x),
            s: pick_vec(self.s, file.s),
            n_samples: pick(self.n_samples, file.n_samples),
            seed: pick(self.seed, file.seed),
            format: pick(self.format, file.format),
            out: pick(self.out, file.out),
            config: self.config,
            timing: self.timing || file.timing,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Eval,
    Verify,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Validated run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub op: Option<String>,
    pub suite: Option<String>,
    pub p: Option<usize>,
    pub k: Option<usize>,
    pub zeta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub f: Option<FnSpec>,
    /// Evaluation points from `--u` and `--x`.
    pub points: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub n_samples: Option<usize>,
    pub seed: u64,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

fn flat_list(items: &[String]) -> CliResult<Vec<f64>> {
    let mut v = Vec::new();
    for it in items {
        v.extend(parse_list(it)?);
    }
    Ok(v)
}

fn flag<T>(name: &str, r: CliResult<T>) -> CliResult<T> {
    r.map_err(|e| CliError::usage(format!("--{name}: {e}")))
}

impl RunConfig {
    /// Reads `argv` (program name first), merging any configuration file.
    pub fn from_args<I, T>(argv: I, env_seed: Option<String>) -> CliResult<RunConfig>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Args::try_parse_from(argv).map_err(|e| match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
            _ => CliError::usage(e.to_string()),
        })?;
        let merged = match &cli.config {
            Some(path) => {
                let file = Args::from_file(path)?;
                cli.over(file)
            }
            None => cli,
        };
        Self::resolve(merged, env_seed)
    }

    pub fn resolve(a: Args, env_seed: Option<String>) -> CliResult<RunConfig> {
        let command = match a.command.as_deref() {
            Some("eval") => Command::Eval,
            Some("verify") => Command::Verify,
            Some("table") => Command::Table,
            Some(other) => return Err(CliError::usage(format!("unknown command {other:?}; expected eval, verify or table"))),
            None => return Err(CliError::usage("missing command; expected eval, verify or table")),
        };
        let dim = |name: &str, v: &Option<String>| -> CliResult<Option<usize>> {
            v.as_deref()
                .map(|t| {
                    let n = flag(name, parse_count(t))?;
                    if n == 0 {
                        Err(CliError::usage(format!("--{name} must be at least 1")))
                    } else {
                        Ok(n)
                    }
                })
                .transpose()
        };
        let scalar = |name: &str, v: &Option<String>| v.as_deref().map(|t| flag(name, parse_number(t))).transpose();
        let points = |name: &str, v: &[String]| v.iter().map(|t| flag(name, parse_list(t))).collect::<CliResult<Vec<_>>>();
        let mut pts = points("u", &a.u)?;
        pts.extend(points("x", &a.x)?);
        let seed = match (&a.seed, env_seed) {
            (Some(t), _) => flag("seed", parse_seed(t))?,
            (None, Some(t)) => parse_seed(&t).map_err(|e| CliError::usage(format!("KOBER_SEED: {e}")))?,
            (None, None) => DEFAULT_SEED,
        };
        let format = match a.format.as_deref() {
            None => None,
            Some("json") => Some(Format::Json),
            Some("csv") => Some(Format::Csv),
            Some(other) => return Err(CliError::usage(format!("--format: expected json or csv, got {other:?}"))),
        };
        Ok(RunConfig {
            command,
            op: a.op,
            suite: a.suite,
            p: dim("p", &a.p)?,
            k: dim("k", &a.k)?,
            zeta: flag("zeta", flat_list(&a.zeta))?,
            alpha: flag("alpha", flat_list(&a.alpha))?,
            beta: scalar("beta", &a.beta)?,
            gamma: scalar("gamma", &a.gamma)?,
            f: a.f.as_deref().map(|t| flag("f", t.parse())).transpose()?,
            points: pts,
            s: points("s", &a.s)?,
            n_samples: a.n_samples.as_deref().map(|t| flag("n-samples", parse_count(t))).transpose()?,
            seed,
            format,
            out: a.out,
            timing: a.timing,
        })
    }
}
