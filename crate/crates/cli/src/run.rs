//! Experiment dispatch and report emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use ostrovsky_core::io::{fmt_f64, read_profile};
use ostrovsky_core::lemmas::{default_corpus, harness_grid, load_corpus, run_corpus, HarnessConfig, LemmaId};
use ostrovsky_core::random::{khinchine_check, stochastic_continuity, tail_bound_curve, DEFAULT_C1};
use ostrovsky_core::rough::{
    convergence_trace, counterexample_ratio, expected_slope, scaling_fit, CounterexampleParams, CounterexampleSpec,
    ScanParams,
};
use ostrovsky_core::{propagate, Complex64, PropagatorConfig, SpaceGrid, SpectralProfile};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ProfileSource, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Gaussian bump used by the stochastic-continuity runs: amplitude 4, unit
/// width, sampled at 0.005 on |xi| < 6 with the 0.1 notch around zero.
pub fn gauss_bump() -> SpectralProfile {
    let (lo, hi, h) = (-6.0 + 0.0025, 6.0 - 0.0025, 0.005f64);
    let n = ((hi - lo) / h).round() as usize + 1;
    SpectralProfile::from_fn(lo, h, n, 0.1, |xi| Complex64::new(4.0 * (-0.5 * xi * xi).exp(), 0.0))
        .expect("bump is finite")
}

pub fn load_profile(src: &ProfileSource) -> Result<SpectralProfile> {
    match src {
        ProfileSource::File(path) => {
            read_profile(path).with_context(|| format!("reading profile {}", path.display()))
        }
        ProfileSource::Builtin(id) if id == "gauss_bump" => Ok(gauss_bump()),
        ProfileSource::Builtin(id) => default_corpus()
            .into_iter()
            .find(|e| e.id == *id)
            .map(|e| e.profile)
            .ok_or_else(|| anyhow!("no built-in profile `{id}`")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub version: &'static str,
    pub config: RunConfig,
    pub header: Vec<&'static str>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
    pub row_count: usize,
    pub fits: Value,
    pub tolerances: Value,
    pub checks: Vec<Check>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    fn new(config: &RunConfig, header: Vec<&'static str>) -> Self {
        Self {
            version: VERSION,
            config: config.clone(),
            header,
            rows: Vec::new(),
            row_count: 0,
            fits: Value::Null,
            tolerances: Value::Null,
            checks: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check { name: name.into(), passed });
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn failed(&self) -> bool {
        self.failed_checks().next().is_some()
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| anyhow!("{e}"))
    }

    pub fn meta_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `<out>.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Runs the experiment under the configured thread cap, then writes the CSV
/// and its sidecar.
pub fn dispatch(cfg: &RunConfig) -> Result<ExperimentReport> {
    let report = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")?
            .install(|| execute(cfg))?,
        None => execute(cfg)?,
    };
    write_outputs(&report, &cfg.out)?;
    Ok(report)
}

pub fn write_outputs(report: &ExperimentReport, out: &Path) -> Result<()> {
    std::fs::write(out, report.csv_bytes()?).with_context(|| format!("writing {}", out.display()))?;
    let meta = meta_path(out);
    std::fs::write(&meta, report.meta_json()).with_context(|| format!("writing {}", meta.display()))?;
    Ok(())
}

/// Computes the report without touching the file system.
pub fn execute(cfg: &RunConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = match &cfg.command {
        Command::Propagate { profile, t, x_range, nx } => run_propagate(cfg, profile, *t, *x_range, *nx)?,
        Command::Counterexample { .. } => run_counterexample(cfg)?,
        Command::Khinchine { p, n, c } => run_khinchine(cfg, p, *n, c)?,
        Command::StochasticContinuity { alpha, t, n, x, profile } => {
            run_continuity(cfg, *alpha, t, *n, *x, profile)?
        }
        Command::VerifyLemmas { corpus, only, x_points } => run_lemmas(cfg, corpus.as_deref(), only.as_deref(), *x_points)?,
        Command::Trace { profile, x, t } => run_trace(cfg, profile, *x, t)?,
    };
    report.row_count = report.rows.len();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn run_propagate(
    cfg: &RunConfig,
    src: &ProfileSource,
    t: f64,
    x_range: Option<(f64, f64)>,
    nx: usize,
) -> Result<ExperimentReport> {
    let p = load_profile(src)?;
    let grid = match x_range {
        Some((lo, hi)) => SpaceGrid::spanning(lo, hi, nx)?,
        None => harness_grid(&p, t, &HarnessConfig { x_points: nx, sign: cfg.sign, ..HarnessConfig::default() })?,
    };
    let u = propagate(&p, PropagatorConfig::new(t, cfg.sign), &grid)?;
    let mut report = ExperimentReport::new(cfg, vec!["x", "re", "im", "abs"]);
    report.rows = u
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| vec![fmt_f64(u.x(j)), fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm())])
        .collect();
    report.fits = json!({ "l2_norm_spectral": p.l2_norm(), "max_modulus": u.max_modulus() });
    Ok(report)
}

fn run_counterexample(cfg: &RunConfig) -> Result<ExperimentReport> {
    let Command::Counterexample { s, k_min, k_max, nt, refine, band_cells, x_points, slope_tol } = cfg.command else {
        unreachable!()
    };
    let params = CounterexampleParams {
        sign: cfg.sign,
        band_cells,
        x_points,
        scan: ScanParams { n_t: nt, refine_points: refine },
    };
    let mut report = ExperimentReport::new(cfg, vec!["k", "Rk", "log2Rk"]);
    let mut points = Vec::new();
    let mut details = Vec::new();
    for k in k_min..=k_max {
        let r = counterexample_ratio(&CounterexampleSpec::new(k, s)?, &params)?;
        report.rows.push(vec![k.to_string(), fmt_f64(r.ratio), fmt_f64(r.ratio.log2())]);
        points.push((f64::from(k), r.ratio));
        details.push(r);
    }
    let expected = expected_slope(s);
    report.tolerances = json!({ "slope_tol": slope_tol });
    report.fits = if points.len() >= 3 {
        let fit = scaling_fit(&points)?;
        report.check("slope", (fit.slope - expected).abs() <= slope_tol);
        json!({ "slope": fit.slope, "residual": fit.residual, "expected_slope": expected, "ratios": details })
    } else {
        json!({ "slope": null, "residual": null, "expected_slope": expected, "ratios": details })
    };
    Ok(report)
}

fn run_khinchine(cfg: &RunConfig, ps: &[f64], n: usize, c: &[f64]) -> Result<ExperimentReport> {
    let coeffs: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let results = khinchine_check(&coeffs, ps, n, cfg.seed)?;
    let mut report = ExperimentReport::new(cfg, vec!["p", "ratio", "std_error", "exact", "z"]);
    for r in &results {
        let z = (r.ratio - r.exact) / r.std_error;
        report.rows.push(vec![fmt_f64(r.p), fmt_f64(r.ratio), fmt_f64(r.std_error), fmt_f64(r.exact), fmt_f64(z)]);
        report.check(format!("ratio<=2 at p={}", r.p), r.ratio <= 2.0);
    }
    report.tolerances = json!({ "ratio_bound": 2.0 });
    report.fits = json!({ "results": results });
    Ok(report)
}

fn run_continuity(
    cfg: &RunConfig,
    alpha: f64,
    t: &[f64],
    n: usize,
    x: f64,
    src: &ProfileSource,
) -> Result<ExperimentReport> {
    let p = load_profile(src)?;
    let curve = stochastic_continuity(&p, x, alpha, t, n, cfg.seed, cfg.sign)?;
    let mut report = ExperimentReport::new(cfg, vec!["t", "prob", "wilson_lo", "wilson_hi"]);
    for (j, &tj) in t.iter().enumerate() {
        report.rows.push(vec![
            fmt_f64(tj),
            fmt_f64(curve.empirical_probs[j]),
            fmt_f64(curve.wilson_lo[j]),
            fmt_f64(curve.wilson_hi[j]),
        ]);
    }
    let bound: Vec<Option<f64>> = t
        .iter()
        .map(|&tj| curve.c_fit.filter(|_| tj > 0.0).map(|c| tail_bound_curve(alpha, tj.sqrt(), c, DEFAULT_C1)))
        .collect();
    report.fits = json!({
        "c_fit": curve.c_fit,
        "c1": DEFAULT_C1,
        "epsilon": "sqrt(t)",
        "tail_bound": bound,
        "wilson_halfwidth": curve.wilson_halfwidth,
    });
    report.tolerances = json!({ "wilson_level": 0.95 });
    Ok(report)
}

fn run_lemmas(cfg: &RunConfig, corpus: Option<&Path>, only: Option<&[LemmaId]>, x_points: usize) -> Result<ExperimentReport> {
    let corpus = match corpus {
        Some(dir) => load_corpus(dir).with_context(|| format!("loading corpus {}", dir.display()))?,
        None => default_corpus(),
    };
    let checks = only.unwrap_or(&LemmaId::ALL);
    let harness = HarnessConfig { sign: cfg.sign, x_points, ..HarnessConfig::default() };
    let reports = run_corpus(&corpus, checks, &harness);
    if reports.is_empty() {
        bail!("no checks apply to the selected corpus");
    }
    let mut report = ExperimentReport::new(
        cfg,
        vec!["lemma_id", "profile_id", "params", "measured_lhs", "bound_rhs", "fitted_C", "pass"],
    );
    let mut spread: BTreeMap<&'static str, (f64, f64, usize)> = BTreeMap::new();
    for r in &reports {
        report.rows.push(vec![
            r.lemma_id.as_str().to_owned(),
            r.profile_id.clone(),
            r.params.clone(),
            fmt_f64(r.measured_lhs),
            fmt_f64(r.bound_rhs),
            r.fitted_c.map(fmt_f64).unwrap_or_default(),
            r.outcome.to_string(),
        ]);
        if r.failed() {
            report.check(format!("{} {} {}", r.lemma_id, r.profile_id, r.params), false);
        }
        if let Some(c) = r.fitted_c {
            let e = spread.entry(r.lemma_id.as_str()).or_insert((f64::INFINITY, f64::NEG_INFINITY, 0));
            e.0 = e.0.min(c);
            e.1 = e.1.max(c);
            e.2 += 1;
        }
    }
    report.fits = Value::Object(
        spread
            .into_iter()
            .map(|(k, (lo, hi, n))| (k.to_owned(), json!({ "min_c": lo, "max_c": hi, "count": n })))
            .collect(),
    );
    report.tolerances = serde_json::to_value(&harness)?;
    Ok(report)
}

fn run_trace(cfg: &RunConfig, src: &ProfileSource, x: f64, t: &[f64]) -> Result<ExperimentReport> {
    let p = load_profile(src)?;
    let dev = convergence_trace(&p, x, t, cfg.sign)?;
    let mut report = ExperimentReport::new(cfg, vec!["t", "deviation"]);
    report.rows = t.iter().zip(&dev).map(|(t, d)| vec![fmt_f64(*t), fmt_f64(*d)]).collect();
    Ok(report)
}
