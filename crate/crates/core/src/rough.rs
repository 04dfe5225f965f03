//! Counterexample family with indicator spectrum on a dyadic band, sampled
//! maximal functions over short time windows, and scaling fits.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::synth::KernelTable;
use crate::spectral::{
    deviation_spectral, evolve_spectral, hs_norm, lp_norm_samples, require_resolution,
    synthesize_at, PropagatorConfig, Sign, SpaceGrid, SpectralProfile, DEFAULT_ZERO_EXCLUSION,
};
use crate::stats::least_squares;

/// Fewest grid cells allowed across one half-band `[2^k, 2^(k+1)]`.
pub const MIN_BAND_CELLS: usize = 64;

/// Ratio between the smallest and the largest time of a maximal scan.
pub const T_DECADES: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CounterexampleSpec {
    pub k: u32,
    pub s: f64,
}

impl CounterexampleSpec {
    pub fn new(k: u32, s: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("band index k must be at least 1".into()));
        }
        if !s.is_finite() {
            return Err(Error::Domain("Sobolev exponent must be finite".into()));
        }
        Ok(Self { k, s })
    }

    pub fn band_start(&self) -> f64 {
        2f64.powi(self.k as i32)
    }

    pub fn amplitude(&self) -> f64 {
        2f64.powf(-f64::from(self.k) * (self.s + 0.5))
    }

    /// End of the time window, `2^(-3k) / 100`.
    pub fn t_max(&self) -> f64 {
        2f64.powi(-3 * self.k as i32) / 100.0
    }

    /// Space window `|x| <= 2^(-k)`.
    pub fn x_half_width(&self) -> f64 {
        2f64.powi(-(self.k as i32))
    }
}

/// `2^(-k(s+1/2))` on `2^k <= |xi| <= 2^(k+1)`, sampled on a grid that spans
/// exactly `[-2^(k+1), 2^(k+1)]`.
pub fn counterexample_profile(spec: &CounterexampleSpec, xi_step: f64) -> Result<SpectralProfile> {
    let lo = spec.band_start();
    let hi = 2.0 * lo;
    let cells = lo / xi_step;
    if !(xi_step > 0.0) || cells + 1e-9 < MIN_BAND_CELLS as f64 {
        return Err(Error::InvalidGrid(format!(
            "xi_step {xi_step} gives {cells:.1} cells per band, need at least {MIN_BAND_CELLS}"
        )));
    }
    let len = (2.0 * hi / xi_step + 1e-9).floor() as usize + 1;
    let amp = Complex64::new(spec.amplitude(), 0.0);
    let tol = 1e-12 * lo;
    SpectralProfile::from_fn(-hi, xi_step, len, DEFAULT_ZERO_EXCLUSION, |xi| {
        let r = xi.abs();
        if r >= lo - tol && r <= hi + tol {
            amp
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `n_t` times `t_max * 10^(-4 (n_t - j) / n_t)`, `j = 1..=n_t`. Doubling `n_t`
/// keeps every previous time.
pub fn geometric_times(t_max: f64, n_t: usize) -> Vec<f64> {
    (1..=n_t)
        .map(|j| {
            if j == n_t {
                t_max
            } else {
                t_max * 10f64.powf(-T_DECADES * (n_t - j) as f64 / n_t as f64)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeGridMeta {
    pub count: usize,
    pub spacing: String,
    pub t_min: f64,
    pub t_max: f64,
    pub refine_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximalScan {
    pub grid: SpaceGrid,
    pub sup_values: Vec<f64>,
    /// Time at which each sup was attained.
    pub argmax_t: Vec<f64>,
    pub t_grid: TimeGridMeta,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub n_t: usize,
    /// Extra times sampled per `x` between the neighbours of the coarse argmax.
    pub refine_points: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { n_t: 256, refine_points: 8 }
    }
}

/// `sup_t |U(t) f(x)|` over a geometric time grid in `(0, t_max]`, followed by
/// a local refinement around the coarse argmax at every `x`.
pub fn maximal_scan(
    p: &SpectralProfile,
    sign: Sign,
    t_max: f64,
    grid: &SpaceGrid,
    opts: ScanOptions,
) -> Result<MaximalScan> {
    if opts.n_t == 0 || !(t_max > 0.0) {
        return Err(Error::Domain("maximal scan needs n_t >= 1 and t_max > 0".into()));
    }
    let cfg = PropagatorConfig::new(t_max, sign);
    require_resolution(p, cfg)?;
    let times = geometric_times(t_max, opts.n_t);
    let meta = TimeGridMeta {
        count: times.len(),
        spacing: "geometric".into(),
        t_min: times[0],
        t_max,
        refine_points: opts.refine_points,
    };
    let Some(table) = KernelTable::new(p, grid) else {
        return Ok(MaximalScan {
            grid: *grid,
            sup_values: vec![0.0; grid.len()],
            argmax_t: vec![t_max; grid.len()],
            t_grid: meta,
        });
    };
    let mut sup = vec![f64::NEG_INFINITY; grid.len()];
    let mut arg = vec![0usize; grid.len()];
    for (i, &t) in times.iter().enumerate() {
        let u = table.synthesize(&evolve_spectral(p, cfg.at(t)));
        for (j, v) in u.iter().enumerate() {
            let m = v.norm();
            if m > sup[j] {
                sup[j] = m;
                arg[j] = i;
            }
        }
    }
    let mut argmax_t: Vec<f64> = arg.iter().map(|&i| times[i]).collect();
    if opts.refine_points > 0 {
        let lower = t_max * 10f64.powf(-T_DECADES);
        let refined: Vec<(f64, f64)> = (0..grid.len())
            .into_par_iter()
            .map(|j| {
                let i = arg[j];
                let a = if i == 0 { lower } else { times[i - 1] };
                let b = if i + 1 == times.len() { times[i] } else { times[i + 1] };
                let x = grid.x(j);
                let mut best = (sup[j], argmax_t[j]);
                let r = (b / a).ln();
                for q in 1..=opts.refine_points {
                    let t = a * (r * q as f64 / (opts.refine_points + 1) as f64).exp();
                    let m = synthesize_at(&evolve_spectral(p, cfg.at(t)), x).norm();
                    if m > best.0 {
                        best = (m, t);
                    }
                }
                best
            })
            .collect();
        for (j, (m, t)) in refined.into_iter().enumerate() {
            sup[j] = m;
            argmax_t[j] = t;
        }
    }
    Ok(MaximalScan {
        grid: *grid,
        sup_values: sup,
        argmax_t,
        t_grid: meta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CounterexampleParams {
    pub sign: Sign,
    /// Grid cells per half-band.
    pub band_cells: usize,
    pub x_points: usize,
    pub scan: ScanParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanParams {
    pub n_t: usize,
    pub refine_points: usize,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self {
            sign: Sign::Plus,
            band_cells: 512,
            x_points: 129,
            scan: ScanParams { n_t: 256, refine_points: 8 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleResult {
    pub k: u32,
    pub s: f64,
    pub ratio: f64,
    pub maximal_l4: f64,
    pub hs_norm: f64,
}

/// `R_k = || sup_t |U(t) f_k| ||_{L^4(|x| <= 2^-k)} / ||f_k||_{H^s}`.
pub fn counterexample_ratio(spec: &CounterexampleSpec, params: &CounterexampleParams) -> Result<CounterexampleResult> {
    if params.band_cells < MIN_BAND_CELLS {
        return Err(Error::InvalidGrid(format!(
            "band_cells = {} is below the minimum {MIN_BAND_CELLS}",
            params.band_cells
        )));
    }
    let p = counterexample_profile(spec, spec.band_start() / params.band_cells as f64)?;
    let grid = SpaceGrid::symmetric(spec.x_half_width(), params.x_points.max(2))?;
    let scan = maximal_scan(
        &p,
        params.sign,
        spec.t_max(),
        &grid,
        ScanOptions {
            n_t: params.scan.n_t,
            refine_points: params.scan.refine_points,
        },
    )?;
    let l4 = lp_norm_samples(&scan.sup_values, grid.x_step(), 4.0)?;
    let hs = hs_norm(&p, spec.s);
    Ok(CounterexampleResult {
        k: spec.k,
        s: spec.s,
        ratio: l4 / hs,
        maximal_l4: l4,
        hs_norm: hs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub residual: f64,
}

/// Least-squares slope of `log2 R_k` against `k`.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate("scaling fit needs at least three points".into()));
    }
    if points.iter().any(|&(_, r)| !(r > 0.0 && r.is_finite())) {
        return Err(Error::Domain("scaling fit needs positive finite ratios".into()));
    }
    let ks: Vec<f64> = points.iter().map(|p| p.0).collect();
    let logs: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let fit = least_squares(&ks, &logs)?;
    Ok(ScalingFit {
        points: points.to_vec(),
        slope: fit.slope,
        residual: fit.residual,
    })
}

/// Growth exponent of `R_k` predicted by dyadic rescaling, `1/4 - s`.
pub fn expected_slope(s: f64) -> f64 {
    0.25 - s
}

/// `|U(t) f(x) - f(x)|` for each `t`.
pub fn convergence_trace(p: &SpectralProfile, x: f64, times: &[f64], sign: Sign) -> Result<Vec<f64>> {
    let t_big = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    require_resolution(p, PropagatorConfig::new(t_big, sign))?;
    Ok(times
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                0.0
            } else {
                synthesize_at(&deviation_spectral(p, PropagatorConfig::new(t, sign)), x).norm()
            }
        })
        .collect())
}
