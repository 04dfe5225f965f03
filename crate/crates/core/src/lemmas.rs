//! Corpus-driven checks of the deterministic frequency estimates.
//!
//! Every report carries the measured left-hand side and the right-hand side
//! it was compared against, so `pass` can be recomputed from the stored
//! numbers. Checks that do not apply to a profile are either omitted (scope)
//! or recorded as skips (degenerate input, numerical errors).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_profile;
use crate::projections::{project_high, project_low, square_function, wiener_decompose, wiener_project};
use crate::spectral::{
    deviation_spectral, evolve_spectral, lp_norm_space, phase_unchecked, require_resolution, synthesize,
    PropagatorConfig, Sign, SpaceGrid, SpectralProfile,
};
use crate::stats::least_squares;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    #[serde(rename = "L2_2")]
    LowFrequency,
    #[serde(rename = "L2_3")]
    HighFrequency,
    #[serde(rename = "L2_4")]
    LowFrequencyEps,
    #[serde(rename = "L2_5")]
    WienerLow,
    #[serde(rename = "L2_6")]
    SquareFunction,
    #[serde(rename = "L2_7")]
    SquareFunctionEvolved,
    #[serde(rename = "NORM_EQUIV")]
    NormEquivalence,
    #[serde(rename = "BERNSTEIN")]
    Bernstein,
}

impl LemmaId {
    pub const ALL: [LemmaId; 8] = [
        LemmaId::NormEquivalence,
        LemmaId::SquareFunction,
        LemmaId::SquareFunctionEvolved,
        LemmaId::LowFrequency,
        LemmaId::LowFrequencyEps,
        LemmaId::HighFrequency,
        LemmaId::WienerLow,
        LemmaId::Bernstein,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::LowFrequency => "L2_2",
            LemmaId::HighFrequency => "L2_3",
            LemmaId::LowFrequencyEps => "L2_4",
            LemmaId::WienerLow => "L2_5",
            LemmaId::SquareFunction => "L2_6",
            LemmaId::SquareFunctionEvolved => "L2_7",
            LemmaId::NormEquivalence => "NORM_EQUIV",
            LemmaId::Bernstein => "BERNSTEIN",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        LemmaId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown lemma id `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "true",
            Outcome::Fail => "false",
            Outcome::Skip => "skip",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub profile_id: String,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    pub measured_lhs: f64,
    pub bound_rhs: f64,
    pub fitted_c: Option<f64>,
    pub outcome: Outcome,
}

impl LemmaReport {
    fn compare(lemma_id: LemmaId, profile_id: &str, params: String, lhs: f64, rhs: f64, fitted_c: Option<f64>) -> Self {
        let outcome = if lhs <= rhs { Outcome::Pass } else { Outcome::Fail };
        Self {
            lemma_id,
            profile_id: profile_id.to_owned(),
            params,
            measured_lhs: lhs,
            bound_rhs: rhs,
            fitted_c,
            outcome,
        }
    }

    fn skip(lemma_id: LemmaId, profile_id: &str, reason: impl fmt::Display) -> Self {
        Self {
            lemma_id,
            profile_id: profile_id.to_owned(),
            params: format!("skipped={}", reason.to_string().replace([',', '\n'], " ")),
            measured_lhs: f64::NAN,
            bound_rhs: f64::NAN,
            fitted_c: None,
            outcome: Outcome::Skip,
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }

    /// Recomputes the outcome from the stored numbers.
    pub fn is_consistent(&self) -> bool {
        match self.outcome {
            Outcome::Skip => true,
            Outcome::Pass => self.measured_lhs <= self.bound_rhs,
            Outcome::Fail => !(self.measured_lhs <= self.bound_rhs),
        }
    }
}

/// Harness calibration; none of these are constants of the estimates themselves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub sign: Sign,
    pub x_points: usize,
    /// Relative margin added around the numerically supported region.
    pub margin: f64,
    /// Admissible fitted constant for the low-frequency checks.
    pub c_cal: f64,
    pub slope_window: (f64, f64),
    pub square_tolerance: f64,
    pub norm_slack: f64,
    pub low_eps: f64,
    pub low_times: Vec<f64>,
    pub high_times: Vec<f64>,
    pub square_times: Vec<f64>,
    pub wiener_eps: f64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            sign: Sign::Plus,
            x_points: 4096,
            margin: 0.5,
            c_cal: 10.0,
            slope_window: (0.95, 1.05),
            square_tolerance: 1e-6,
            norm_slack: 1e-12,
            low_eps: 1e-2,
            low_times: vec![1e-3, 1e-2],
            high_times: (0..7).map(|j| 1e-6 * 10f64.powf(0.5 * f64::from(j))).collect(),
            square_times: vec![0.1, 1.0],
            wiener_eps: 0.1,
        }
    }
}

/// Largest `|phase'(xi)|` over the nonzero samples, for either sign.
pub fn max_phase_derivative(p: &SpectralProfile) -> f64 {
    p.amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
        .map(|(j, _)| {
            let xi = p.xi(j);
            3.0 * xi * xi + 1.0 / (xi * xi)
        })
        .fold(0.0, f64::max)
}

/// RMS spatial spread `||d f^/d xi|| / ||f^||`, from grid differences.
pub fn spatial_spread(p: &SpectralProfile) -> f64 {
    let a = p.amplitudes();
    let h = p.xi_step();
    let mut d2 = 0.0;
    for w in a.windows(2) {
        d2 += (w[1] - w[0]).norm_sqr();
    }
    let norm = p.l2_norm();
    if norm == 0.0 {
        return 0.0;
    }
    (d2 / h).sqrt() / norm
}

/// Symmetric x-grid covering the profile's spatial extent after time `t`,
/// enlarged by the configured margin.
pub fn harness_grid(p: &SpectralProfile, t: f64, cfg: &HarnessConfig) -> Result<SpaceGrid> {
    let reach = (6.0 * spatial_spread(p)).clamp(4.0, 100.0) + t.abs() * max_phase_derivative(p);
    SpaceGrid::symmetric((1.0 + cfg.margin) * reach, cfg.x_points.max(2))
}

/// Largest grid-aligned `delta <= 1/2` with `(int_{|xi| <= delta} |f^|^2)^(1/2) <= eps`.
///
/// Candidates are the distinct `|xi_j| < 1/2` and `1/2` itself. When even the
/// smallest candidate carries too much mass, half the smallest `|xi_j|` is
/// returned (an interval containing no samples).
pub fn delta_epsilon(p: &SpectralProfile, eps: f64) -> f64 {
    let mut cands: Vec<f64> = p.frequencies().map(f64::abs).filter(|r| *r < 0.5).collect();
    cands.push(0.5);
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let limit = eps * eps;
    let mass = |delta: f64| low_mass(p, delta);
    if mass(cands[cands.len() - 1]) <= limit {
        return 0.5;
    }
    if mass(cands[0]) > limit {
        return 0.5 * cands[0];
    }
    // invariant: mass(cands[lo]) <= limit < mass(cands[hi])
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if mass(cands[mid]) <= limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    cands[lo]
}

/// `int_{|xi| <= delta} |f^|^2` by the profile's quadrature.
pub fn low_mass(p: &SpectralProfile, delta: f64) -> f64 {
    p.integrate(|xi, a| if xi.abs() <= delta { a.norm_sqr() } else { 0.0 })
}

fn sup_deviation(p: &SpectralProfile, cfg: PropagatorConfig, grid: &SpaceGrid) -> f64 {
    synthesize(&deviation_spectral(p, cfg), grid).max_modulus()
}

fn params(pairs: &[(&str, f64)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v:?}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Low-frequency estimate `|U(t) P_{<=8} g - P_{<=8} g| <= eps + C |t| / delta_eps ||g||`.
/// With `use_eps_scale` the scale `delta_eps` is replaced by `eps`.
pub fn check_low_frequency(
    id: &str,
    p: &SpectralProfile,
    t: f64,
    eps: f64,
    use_eps_scale: bool,
    cfg: &HarnessConfig,
) -> Result<LemmaReport> {
    let pc = PropagatorConfig::new(t, cfg.sign);
    let low = project_low(p, 8.0)?;
    require_resolution(&low, pc)?;
    let grid = harness_grid(&low, t, cfg)?;
    let lhs = sup_deviation(&low, pc, &grid);
    let delta = if use_eps_scale { eps } else { delta_epsilon(&low, eps) };
    let norm = p.l2_norm();
    let scale = t.abs() / delta * norm;
    let c = if scale > 0.0 { (lhs - eps).max(0.0) / scale } else { 0.0 };
    let lemma = if use_eps_scale { LemmaId::LowFrequencyEps } else { LemmaId::LowFrequency };
    let rhs = eps + cfg.c_cal * scale;
    Ok(LemmaReport::compare(
        lemma,
        id,
        params(&[("t", t), ("eps", eps), ("delta", delta), ("x_half_width", grid.x_max())]),
        lhs,
        rhs,
        Some(c),
    ))
}

/// `int_{|xi| >= 8} |phase(xi)| |f^(xi)| d xi` on the grid.
pub fn high_frequency_majorant(p: &SpectralProfile, sign: Sign) -> f64 {
    p.integrate(|xi, a| {
        if xi.abs() >= 8.0 {
            phase_unchecked(xi, sign).abs() * a.norm()
        } else {
            0.0
        }
    })
}

/// Deviations of `P_{>8} g` at each time, their log-log slope and the fitted
/// constant `max_t dev(t) / t`.
pub struct HighFrequencyProbe {
    pub deviations: Vec<f64>,
    pub slope: f64,
    pub fitted_c: f64,
    pub majorant: f64,
    pub x_half_width: f64,
}

pub fn probe_high_frequency(p: &SpectralProfile, times: &[f64], cfg: &HarnessConfig) -> Result<HighFrequencyProbe> {
    let high = project_high(p, 8.0)?;
    if high.is_zero() {
        return Err(Error::Degenerate("profile has no frequencies above 8".into()));
    }
    if times.len() < 2 || times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Domain("high-frequency probe needs at least two positive times".into()));
    }
    let t_big = times.iter().copied().fold(0.0, f64::max);
    require_resolution(&high, PropagatorConfig::new(t_big, cfg.sign))?;
    let grid = harness_grid(&high, t_big, cfg)?;
    let deviations: Vec<f64> = times
        .iter()
        .map(|&t| sup_deviation(&high, PropagatorConfig::new(t, cfg.sign), &grid))
        .collect();
    let lt: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ld: Vec<f64> = deviations.iter().map(|d| d.ln()).collect();
    let fit = least_squares(&lt, &ld)?;
    let fitted_c = deviations
        .iter()
        .zip(times)
        .map(|(d, t)| d / t)
        .fold(0.0, f64::max);
    Ok(HighFrequencyProbe {
        deviations,
        slope: fit.slope,
        fitted_c,
        majorant: high_frequency_majorant(&high, cfg.sign),
        x_half_width: grid.x_max(),
    })
}

/// Two reports: the slope window and the constant against the majorant.
pub fn check_high_frequency(id: &str, p: &SpectralProfile, times: &[f64], cfg: &HarnessConfig) -> Result<Vec<LemmaReport>> {
    let probe = probe_high_frequency(p, times, cfg)?;
    let (lo, hi) = cfg.slope_window;
    let half = 0.5 * (hi - lo);
    let centre = 0.5 * (hi + lo);
    let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let base = [("t_min", t_min), ("t_max", t_max), ("x_half_width", probe.x_half_width)];
    let mut slope_params = base.to_vec();
    slope_params.push(("slope", probe.slope));
    Ok(vec![
        LemmaReport::compare(
            LemmaId::HighFrequency,
            id,
            format!("check=slope;{}", params(&slope_params)),
            (probe.slope - centre).abs(),
            half,
            Some(probe.fitted_c),
        ),
        LemmaReport::compare(
            LemmaId::HighFrequency,
            id,
            format!("check=constant;{}", params(&base)),
            probe.fitted_c,
            probe.majorant,
            Some(probe.fitted_c),
        ),
    ])
}

/// `sup_x |U(t) psi(D - k) g - psi(D - k) g|` and the smallest `C` with
/// `lhs <= C (eps + |t| / eps)`. Passes when `C <= c_cal ||f^||_{L^1}`.
pub fn check_wiener_low(
    id: &str,
    p: &SpectralProfile,
    t: f64,
    eps: f64,
    k: i32,
    cfg: &HarnessConfig,
) -> Result<LemmaReport> {
    if k.abs() > 8 {
        return Err(Error::Domain(format!("window index |k| = {} exceeds 8", k.abs())));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let piece = wiener_project(p, k);
    let pc = PropagatorConfig::new(t, cfg.sign);
    require_resolution(&piece, pc)?;
    let (lhs, half_width) = if piece.is_zero() {
        (0.0, 0.0)
    } else {
        let grid = harness_grid(&piece, t, cfg)?;
        (sup_deviation(&piece, pc, &grid), grid.x_max())
    };
    let c = lhs / (eps + t.abs() / eps);
    let l1 = p.l1_norm();
    Ok(LemmaReport::compare(
        LemmaId::WienerLow,
        id,
        params(&[("t", t), ("eps", eps), ("k", f64::from(k)), ("l1_mass", l1), ("x_half_width", half_width)]),
        c,
        cfg.c_cal * l1,
        Some(c),
    ))
}

/// `max_x (sum_k |psi(D - k) U(t) f|^2)^(1/2)` against `||f||_{L^2} (1 + tol)`.
pub fn check_square_function(id: &str, p: &SpectralProfile, t: f64, cfg: &HarnessConfig) -> Result<LemmaReport> {
    let pc = PropagatorConfig::new(t, cfg.sign);
    require_resolution(p, pc)?;
    let grid = harness_grid(p, t, cfg)?;
    let lhs = square_function(&evolve_spectral(p, pc), &grid).max_modulus();
    let lemma = if t == 0.0 { LemmaId::SquareFunction } else { LemmaId::SquareFunctionEvolved };
    Ok(LemmaReport::compare(
        lemma,
        id,
        params(&[("t", t), ("x_half_width", grid.x_max())]),
        lhs,
        p.l2_norm() * (1.0 + cfg.square_tolerance),
        None,
    ))
}

/// Both sides of `sum_k ||psi_k f^||^2 <= ||f^||^2 <= 3 sum_k ||psi_k f^||^2`.
pub fn check_norm_equivalence(id: &str, p: &SpectralProfile, cfg: &HarnessConfig) -> Vec<LemmaReport> {
    let pieces = wiener_decompose(p).energy();
    let total = p.l2_norm().powi(2);
    let slack = 1.0 + cfg.norm_slack;
    vec![
        LemmaReport::compare(LemmaId::NormEquivalence, id, "side=lower".into(), pieces, total * slack, None),
        LemmaReport::compare(LemmaId::NormEquivalence, id, "side=upper".into(), total, 3.0 * pieces * slack, None),
    ]
}

/// Window `|k| <= 8` carrying the most energy (smallest `k` on ties).
pub fn dominant_window(p: &SpectralProfile) -> i32 {
    let d = wiener_decompose(p);
    let mut best = (0, 0.0);
    for (k, piece) in d.iter().filter(|(k, _)| k.abs() <= 8) {
        let e = piece.l2_norm();
        if e > best.1 {
            best = (k, e);
        }
    }
    best.0
}

/// `||psi(D - k) f||_{p2} / ||psi(D - k) f||_{p1}` for `(p1, p2)` in
/// `(2, 4), (2, inf), (4, inf)`.
pub fn bernstein_ratios(p: &SpectralProfile, k: i32, cfg: &HarnessConfig) -> Result<[f64; 3]> {
    let piece = wiener_project(p, k);
    if piece.is_zero() {
        return Err(Error::Degenerate(format!("window {k} carries no mass")));
    }
    let grid = harness_grid(&piece, 0.0, cfg)?;
    let u = synthesize(&piece, &grid);
    let n2 = lp_norm_space(&u, 2.0)?;
    let n4 = lp_norm_space(&u, 4.0)?;
    let ninf = lp_norm_space(&u, f64::INFINITY)?;
    Ok([n4 / n2, ninf / n2, ninf / n4])
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub profile: SpectralProfile,
}

/// Grid step that keeps the phase resolved up to `t = 1` for either sign
/// on `[lo, hi]`, with a 5% safety factor.
fn resolved_step(lo: f64, hi: f64, notch: f64) -> f64 {
    let r = lo.abs().max(hi.abs());
    let d = 3.0 * r * r + 1.0 / (notch * notch);
    0.095 / d
}

fn entry(id: &str, lo: f64, hi: f64, notch: f64, f: impl Fn(f64) -> Complex64) -> CorpusEntry {
    let h = resolved_step(lo, hi, notch);
    let start = lo - 2.0 * h;
    let len = ((hi - lo) / h).ceil() as usize + 5;
    let profile = SpectralProfile::from_fn(start, h, len, notch, |xi| {
        if xi < lo || xi > hi {
            Complex64::new(0.0, 0.0)
        } else {
            f(xi)
        }
    })
    .expect("corpus profiles are finite");
    CorpusEntry { id: id.to_owned(), profile }
}

fn gauss(xi: f64, centre: f64, sigma: f64) -> f64 {
    let z = (xi - centre) / sigma;
    (-0.5 * z * z).exp()
}

fn indicator(r: f64, lo: f64, hi: f64) -> f64 {
    if r >= lo && r <= hi {
        1.0
    } else {
        0.0
    }
}

/// Twelve profiles: Gaussian bumps, band indicators, two-scale mixtures and
/// one-sided high-frequency data. All are resolved up to `t = 1`.
pub fn default_corpus() -> Vec<CorpusEntry> {
    let re = |v: f64| Complex64::new(v, 0.0);
    vec![
        entry("gauss_unit", -5.0, 5.0, 0.25, |xi| re(gauss(xi, 0.0, 1.0))),
        entry("gauss_narrow", -2.5, 2.5, 0.25, |xi| re(gauss(xi, 0.0, 0.5))),
        entry("gauss_shift_2", -0.5, 4.5, 0.25, |xi| re(gauss(xi, 2.0, 0.5))),
        entry("gauss_shift_m3_mod", -5.0, -1.0, 0.25, |xi| {
            Complex64::from_polar(gauss(xi, -3.0, 0.4), 1.5 * xi)
        }),
        entry("band_half_one", -1.0, 1.0, 0.25, |xi| re(indicator(xi.abs(), 0.5, 1.0))),
        entry("band_one_two", -2.0, 2.0, 0.25, |xi| re(indicator(xi.abs(), 1.0, 2.0))),
        entry("band_two_three", -3.0, 3.0, 0.25, |xi| re(indicator(xi.abs(), 2.0, 3.0))),
        entry("mix_wide_narrow", -5.0, 5.0, 0.25, |xi| {
            re(gauss(xi, 0.0, 1.0) + 0.5 * gauss(xi, 1.0, 0.2))
        }),
        entry("mix_broad_spike", -5.0, 5.0, 0.25, |xi| {
            re(gauss(xi, 0.0, 2.0)) + Complex64::new(0.0, gauss(xi, -2.0, 0.3))
        }),
        entry("hf_gauss", 7.8, 10.2, 0.25, |xi| re(gauss(xi, 9.0, 0.3))),
        entry("hf_band", 8.2, 10.0, 0.25, |xi| re(indicator(xi, 8.2, 10.0))),
        entry("hf_mix", 7.8, 10.2, 0.25, |xi| {
            re(0.5 * gauss(xi, 8.6, 0.2) + gauss(xi, 9.6, 0.3))
        }),
    ]
}

/// Every `*.csv` profile in `dir`, sorted by file name; the id is the stem.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let corpus = paths
        .iter()
        .map(|path| {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("profile").to_owned();
            Ok(CorpusEntry { id, profile: read_profile(path)? })
        })
        .collect::<Result<Vec<_>>>()?;
    if corpus.is_empty() {
        return Err(Error::Domain(format!("no profile csv files in {}", dir.display())));
    }
    Ok(corpus)
}

fn support_within(p: &SpectralProfile, r: f64) -> bool {
    p.support().is_some_and(|(lo, hi)| lo >= -r && hi <= r)
}

fn collect(lemma: LemmaId, id: &str, out: &mut Vec<LemmaReport>, r: Result<LemmaReport>) {
    out.push(r.unwrap_or_else(|e| LemmaReport::skip(lemma, id, e)));
}

fn run_profile(entry: &CorpusEntry, checks: &[LemmaId], cfg: &HarnessConfig) -> Vec<LemmaReport> {
    let (id, p) = (entry.id.as_str(), &entry.profile);
    let mut out = Vec::new();
    for &lemma in checks {
        match lemma {
            LemmaId::NormEquivalence => out.extend(check_norm_equivalence(id, p, cfg)),
            LemmaId::SquareFunction => collect(lemma, id, &mut out, check_square_function(id, p, 0.0, cfg)),
            LemmaId::SquareFunctionEvolved => {
                for &t in &cfg.square_times {
                    collect(lemma, id, &mut out, check_square_function(id, p, t, cfg));
                }
            }
            LemmaId::LowFrequency | LemmaId::LowFrequencyEps => {
                if support_within(p, 8.0) {
                    for &t in &cfg.low_times {
                        let r = check_low_frequency(id, p, t, cfg.low_eps, lemma == LemmaId::LowFrequencyEps, cfg);
                        collect(lemma, id, &mut out, r);
                    }
                }
            }
            LemmaId::HighFrequency => match check_high_frequency(id, p, &cfg.high_times, cfg) {
                Ok(r) => out.extend(r),
                Err(e) => out.push(LemmaReport::skip(lemma, id, e)),
            },
            LemmaId::WienerLow => {
                let eps = cfg.wiener_eps;
                let r = check_wiener_low(id, p, eps * eps, eps, dominant_window(p), cfg);
                collect(lemma, id, &mut out, r);
            }
            LemmaId::Bernstein => {}
        }
    }
    out
}

/// Runs the selected checks on every profile. Reports come out ordered by
/// profile, then by check, independent of scheduling. Bernstein ratios are
/// compared against the corpus-wide maximum of the same ratio.
pub fn run_corpus(corpus: &[CorpusEntry], checks: &[LemmaId], cfg: &HarnessConfig) -> Vec<LemmaReport> {
    let mut reports: Vec<LemmaReport> = corpus
        .par_iter()
        .map(|e| run_profile(e, checks, cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    if checks.contains(&LemmaId::Bernstein) {
        reports.extend(run_bernstein(corpus, cfg));
    }
    reports
}

fn run_bernstein(corpus: &[CorpusEntry], cfg: &HarnessConfig) -> Vec<LemmaReport> {
    const PAIRS: [&str; 3] = ["p1=2;p2=4", "p1=2;p2=inf", "p1=4;p2=inf"];
    let ratios: Vec<(i32, Result<[f64; 3]>)> = corpus
        .par_iter()
        .map(|e| {
            let k = dominant_window(&e.profile);
            (k, bernstein_ratios(&e.profile, k, cfg))
        })
        .collect();
    let mut max = [0.0f64; 3];
    for (_, r) in &ratios {
        if let Ok(r) = r {
            for i in 0..3 {
                max[i] = max[i].max(r[i]);
            }
        }
    }
    let mut out = Vec::new();
    for (e, (k, r)) in corpus.iter().zip(ratios) {
        match r {
            Ok(r) => {
                for i in 0..3 {
                    out.push(LemmaReport::compare(
                        LemmaId::Bernstein,
                        &e.id,
                        format!("k={k};{}", PAIRS[i]),
                        r[i],
                        max[i],
                        Some(max[i]),
                    ));
                }
            }
            Err(err) => out.push(LemmaReport::skip(LemmaId::Bernstein, &e.id, err)),
        }
    }
    out
}
