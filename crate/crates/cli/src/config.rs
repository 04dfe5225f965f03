//! Run configuration: command-line flags merged over an optional
//! `key = value` file.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use ostrovsky_core::lemmas::LemmaId;
use ostrovsky_core::Sign;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const THREADS_ENV: &str = "OSTROVSKY_LAB_THREADS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("missing required parameter `{0}`")]
    Missing(&'static str),

    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("config line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("invalid parameters: {0}")]
    Invalid(String),

    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Parser, Debug)]
#[command(name = "ostrovsky-lab", version, about = "Numerical experiments with the free Ostrovsky propagator")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Sub {
    /// Evolve a profile to time t and write the field on an x-grid.
    Propagate(PropagateArgs),
    /// Maximal-function ratios R_k for the band-limited family and their log2 slope.
    Counterexample(CounterexampleArgs),
    /// Gaussian moment ratios against sqrt(p).
    Khinchine(KhinchineArgs),
    /// Empirical P(|U(t)f - f| > alpha) for randomized data.
    StochasticContinuity(ContinuityArgs),
    /// Run the inequality checks over a profile corpus.
    VerifyLemmas(LemmaArgs),
    /// |U(t)f(x) - f(x)| for a list of times.
    Trace(TraceArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct Common {
    /// Output CSV path; the sidecar goes to <out>.meta.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dispersion sign, + or -. [default: +]
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<Sign>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap; falls back to OSTROVSKY_LAB_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct PropagateArgs {
    /// Profile CSV (xi,re,im) or builtin:<id>.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<f64>,
    /// Number of x points. [default: 4096]
    #[arg(long)]
    nx: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct CounterexampleArgs {
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long)]
    k_min: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    /// Coarse time samples. [default: 256]
    #[arg(long)]
    nt: Option<usize>,
    /// Refinement samples around each coarse argmax. [default: 8]
    #[arg(long)]
    refine: Option<usize>,
    /// Frequency cells per 2^k. [default: 512]
    #[arg(long)]
    band_cells: Option<usize>,
    /// x points on |x| <= 2^-k. [default: 129]
    #[arg(long)]
    x_points: Option<usize>,
    /// Allowed |slope - expected_slope|. [default: 0.05]
    #[arg(long)]
    slope_tol: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct KhinchineArgs {
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    /// Real coefficient sequence, comma separated. [default: 1]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    c: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct ContinuityArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// Profile CSV (xi,re,im) or builtin:<id>.
    #[arg(long)]
    profile: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct LemmaArgs {
    /// Directory of profile CSVs; the built-in corpus when absent.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Check ids, comma separated (L2_2, L2_3, ..., NORM_EQUIV, BERNSTEIN).
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<LemmaId>>,
    /// x-grid size for sup norms. [default: 4096]
    #[arg(long)]
    x_points: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
struct TraceArgs {
    /// Profile CSV (xi,re,im) or builtin:<id>.
    #[arg(long)]
    profile: Option<String>,
    /// [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileSource {
    File(PathBuf),
    Builtin(String),
}

impl ProfileSource {
    fn parse(s: &str) -> Self {
        match s.strip_prefix("builtin:") {
            Some(id) => ProfileSource::Builtin(id.to_owned()),
            None => ProfileSource::File(PathBuf::from(s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    Propagate {
        profile: ProfileSource,
        t: f64,
        x_range: Option<(f64, f64)>,
        nx: usize,
    },
    Counterexample {
        s: f64,
        k_min: u32,
        k_max: u32,
        nt: usize,
        refine: usize,
        band_cells: usize,
        x_points: usize,
        slope_tol: f64,
    },
    Khinchine {
        p: Vec<f64>,
        n: usize,
        c: Vec<f64>,
    },
    StochasticContinuity {
        alpha: f64,
        t: Vec<f64>,
        n: usize,
        x: f64,
        profile: ProfileSource,
    },
    VerifyLemmas {
        corpus: Option<PathBuf>,
        only: Option<Vec<LemmaId>>,
        x_points: usize,
    },
    Trace {
        profile: ProfileSource,
        x: f64,
        t: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Propagate { .. } => "propagate",
            Command::Counterexample { .. } => "counterexample",
            Command::Khinchine { .. } => "khinchine",
            Command::StochasticContinuity { .. } => "stochastic-continuity",
            Command::VerifyLemmas { .. } => "verify-lemmas",
            Command::Trace { .. } => "trace",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub sign: Sign,
    pub seed: u64,
    /// Excluded from the echo in reports: it must not change any output.
    #[serde(skip)]
    pub threads: Option<usize>,
    pub out: PathBuf,
}

/// Parses `argv` (program name first). A `--config <file>` flag is read
/// and merged under the flags.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv)?;
    let text = match common(&cli.command).config.as_deref() {
        Some(path) => Some(read_config(path)?),
        None => None,
    };
    merge(cli.command, text.as_deref())
}

/// Like [`parse_config`] with the file contents supplied directly.
pub fn parse_config_str<I, T>(argv: I, file: Option<&str>) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    merge(cli.command, file)
}

fn read_config(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })
}

fn common(sub: &Sub) -> &Common {
    match sub {
        Sub::Propagate(a) => &a.common,
        Sub::Counterexample(a) => &a.common,
        Sub::Khinchine(a) => &a.common,
        Sub::StochasticContinuity(a) => &a.common,
        Sub::VerifyLemmas(a) => &a.common,
        Sub::Trace(a) => &a.common,
    }
}

fn subcommand_name(sub: &Sub) -> &'static str {
    match sub {
        Sub::Propagate(_) => "propagate",
        Sub::Counterexample(_) => "counterexample",
        Sub::Khinchine(_) => "khinchine",
        Sub::StochasticContinuity(_) => "stochastic-continuity",
        Sub::VerifyLemmas(_) => "verify-lemmas",
        Sub::Trace(_) => "trace",
    }
}

fn allowed_keys(sub: &str) -> BTreeSet<String> {
    let cmd = Cli::command();
    let sc = cmd.find_subcommand(sub).expect("subcommand is registered");
    sc.get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|l| *l != "config" && *l != "help")
        .map(str::to_owned)
        .collect()
}

/// Fills every null in `base` from `extra`, recursively.
fn fill_nulls(base: &mut Value, extra: Value) {
    match (base, extra) {
        (Value::Object(b), Value::Object(e)) => {
            for (k, v) in e {
                match b.get_mut(&k) {
                    Some(slot) => fill_nulls(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot @ Value::Null, v) => *slot = v,
        _ => {}
    }
}

fn merge(sub: Sub, file: Option<&str>) -> Result<RunConfig, ConfigError> {
    let Some(text) = file else {
        return finish(sub);
    };
    let name = subcommand_name(&sub);
    let allowed = allowed_keys(name);
    let mut merged = serde_json::to_value(&sub).expect("arguments serialize");
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Malformed { line, msg: format!("expected `key = value`, got `{body}`") });
        };
        let key = key.trim().replace('_', "-");
        let value = value.split(',').map(str::trim).collect::<Vec<_>>().join(",");
        if !allowed.contains(&key) {
            return Err(ConfigError::UnknownKey { line, key });
        }
        let single = Cli::try_parse_from(["ostrovsky-lab".to_owned(), name.to_owned(), format!("--{key}={value}")])
            .map_err(|e| ConfigError::Malformed {
                line,
                msg: format!("bad value `{value}` for `{key}`: {}", first_line(&e)),
            })?;
        fill_nulls(&mut merged, serde_json::to_value(&single.command).expect("arguments serialize"));
    }
    let sub: Sub = serde_json::from_value(merged).expect("merged arguments deserialize");
    finish(sub)
}

fn first_line(e: &clap::Error) -> String {
    let s = e.to_string();
    let line = s.lines().next().unwrap_or("").trim_start_matches("error: ");
    line.to_owned()
}

fn need<T>(v: Option<T>, key: &'static str) -> Result<T, ConfigError> {
    v.ok_or(ConfigError::Missing(key))
}

fn finish(sub: Sub) -> Result<RunConfig, ConfigError> {
    let command = match &sub {
        Sub::Propagate(a) => {
            let x_range = match (a.x_min, a.x_max) {
                (Some(lo), Some(hi)) if lo < hi => Some((lo, hi)),
                (Some(_), Some(_)) => return Err(ConfigError::Invalid("x-min must be below x-max".into())),
                (None, None) => None,
                (None, Some(_)) => return Err(ConfigError::Missing("x-min")),
                (Some(_), None) => return Err(ConfigError::Missing("x-max")),
            };
            Command::Propagate {
                profile: ProfileSource::parse(&need(a.profile.clone(), "profile")?),
                t: need(a.t, "t")?,
                x_range,
                nx: a.nx.unwrap_or(4096),
            }
        }
        Sub::Counterexample(a) => {
            let (k_min, k_max) = (need(a.k_min, "k-min")?, need(a.k_max, "k-max")?);
            if k_min > k_max {
                return Err(ConfigError::Invalid(format!("k-min = {k_min} exceeds k-max = {k_max}")));
            }
            Command::Counterexample {
                s: need(a.s, "s")?,
                k_min,
                k_max,
                nt: a.nt.unwrap_or(256),
                refine: a.refine.unwrap_or(8),
                band_cells: a.band_cells.unwrap_or(512),
                x_points: a.x_points.unwrap_or(129),
                slope_tol: a.slope_tol.unwrap_or(0.05),
            }
        }
        Sub::Khinchine(a) => Command::Khinchine {
            p: need(a.p.clone(), "p")?,
            n: need(a.n, "n")?,
            c: a.c.clone().unwrap_or_else(|| vec![1.0]),
        },
        Sub::StochasticContinuity(a) => Command::StochasticContinuity {
            alpha: need(a.alpha, "alpha")?,
            t: need(a.t.clone(), "t")?,
            n: need(a.n, "n")?,
            x: need(a.x, "x")?,
            profile: ProfileSource::parse(&need(a.profile.clone(), "profile")?),
        },
        Sub::VerifyLemmas(a) => Command::VerifyLemmas {
            corpus: a.corpus.clone(),
            only: a.only.clone(),
            x_points: a.x_points.unwrap_or(4096),
        },
        Sub::Trace(a) => Command::Trace {
            profile: ProfileSource::parse(&need(a.profile.clone(), "profile")?),
            x: a.x.unwrap_or(0.0),
            t: need(a.t.clone(), "t")?,
        },
    };
    let c = common(&sub);
    let threads = match c.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse()
                    .map_err(|_| ConfigError::Invalid(format!("{THREADS_ENV} = `{v}` is not a thread count")))?,
            ),
            _ => None,
        },
    };
    if threads == Some(0) {
        return Err(ConfigError::Invalid("thread count must be at least 1".into()));
    }
    Ok(RunConfig {
        command,
        sign: c.sign.unwrap_or(Sign::Plus),
        seed: c.seed.unwrap_or(0),
        threads,
        out: need(c.out.clone(), "out")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str, file: Option<&str>) -> Result<RunConfig, ConfigError> {
        parse_config_str(std::iter::once("ostrovsky-lab").chain(args.split_whitespace()), file)
    }

    #[test]
    fn counterexample_flags() {
        let cfg = parse("counterexample --s 0.0 --k-min 3 --k-max 8 --out r.csv", None).unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.sign, Sign::Plus);
        assert_eq!(cfg.out, PathBuf::from("r.csv"));
        match cfg.command {
            Command::Counterexample { s, k_min, k_max, nt, .. } => {
                assert_eq!((s, k_min, k_max, nt), (0.0, 3, 8, 256));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flag_beats_file() {
        let file = "s = 0.25\nk-min = 3\nk_max = 5\n";
        let cfg = parse("counterexample --s 0.1 --out r.csv", Some(file)).unwrap();
        let Command::Counterexample { s, k_min, k_max, .. } = cfg.command else { panic!() };
        assert_eq!((s, k_min, k_max), (0.1, 3, 5));
        let cfg = parse("counterexample --out r.csv", Some(file)).unwrap();
        let Command::Counterexample { s, .. } = cfg.command else { panic!() };
        assert_eq!(s, 0.25);
    }

    #[test]
    fn inverted_k_range() {
        let e = parse("counterexample --s 0 --k-min 5 --k-max 3 --out r.csv", None).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(_)), "{e}");
    }

    #[test]
    fn missing_key_is_named() {
        let e = parse("counterexample --k-min 3 --k-max 4 --out r.csv", None).unwrap_err();
        assert_eq!(e.to_string(), "missing required parameter `s`");
        let e = parse("khinchine --p 2 --n 10", None).unwrap_err();
        assert_eq!(e.to_string(), "missing required parameter `out`");
    }

    #[test]
    fn malformed_number_reports_line() {
        let e = parse("counterexample --out r.csv", Some("# header\ns = 0\nk-min = three\n")).unwrap_err();
        match e {
            ConfigError::Malformed { line, ref msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("k-min"), "{msg}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse("trace --t 0 --profile p.csv --out o.csv", Some("\nalpha = 1\n")).unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { line: 2, .. }), "{e}");
        let e = parse("trace --t 0 --profile p.csv --out o.csv", Some("config = x\n")).unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { .. }), "{e}");
    }

    #[test]
    fn lists_signs_and_builtins() {
        let cfg = parse(
            "stochastic-continuity --alpha 0.5 --t 0,1e-1,1e-2 --n 10 --x -1.5 --profile builtin:gauss_bump --sign - --out o.csv",
            None,
        )
        .unwrap();
        assert_eq!(cfg.sign, Sign::Minus);
        let Command::StochasticContinuity { t, x, profile, .. } = cfg.command else { panic!() };
        assert_eq!(t, vec![0.0, 0.1, 0.01]);
        assert_eq!(x, -1.5);
        assert_eq!(profile, ProfileSource::Builtin("gauss_bump".into()));
        let cfg = parse("khinchine --n 5 --out o.csv", Some("p = 2, 4\nc = 1,-2\nsign = -\n")).unwrap();
        let Command::Khinchine { p, c, .. } = cfg.command else { panic!() };
        assert_eq!((p, c), (vec![2.0, 4.0], vec![1.0, -2.0]));
        assert_eq!(cfg.sign, Sign::Minus);
    }

    #[test]
    fn lemma_ids_parse() {
        let cfg = parse("verify-lemmas --only L2_6,NORM_EQUIV --out o.csv", None).unwrap();
        let Command::VerifyLemmas { only, .. } = cfg.command else { panic!() };
        assert_eq!(only, Some(vec![LemmaId::SquareFunction, LemmaId::NormEquivalence]));
        assert!(parse("verify-lemmas --only L9 --out o.csv", None).is_err());
    }

    #[test]
    fn zero_threads_rejected() {
        assert!(parse("trace --t 0 --profile p.csv --out o.csv --threads 0", None).is_err());
    }
}
