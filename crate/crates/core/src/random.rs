//! Gaussian randomization of the Wiener pieces and the Monte Carlo
//! experiments built on it.
//!
//! Each coefficient `g_k` of sample `i` under seed `s` is read from a fixed
//! position of a ChaCha8 keystream: stream `i` of the generator keyed by `s`,
//! word offset determined by `k`. Draws therefore do not depend on evaluation
//! order or thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::projections::{window_split, wiener_decompose, wiener_range};
use crate::spectral::{
    deviation_spectral, require_resolution, synthesize_at, PropagatorConfig, Sign, SpectralProfile,
};
use crate::stats::{least_squares, pairwise_sum, pearson, wilson_interval};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `C_1 = e^2`.
pub const DEFAULT_C1: f64 = std::f64::consts::E * std::f64::consts::E;

/// Complex standard Gaussian `g_k(seed, sample_index)`: real and imaginary
/// parts independent `N(0, 1)`.
pub fn gaussian_coefficient(seed: u64, sample_index: u64, k: i32) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    let slot = (i64::from(k) - i64::from(i32::MIN)) as u128;
    rng.set_word_pos(slot * 4);
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    Complex64::new(r * c, r * s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianDraw {
    pub k_min: i32,
    pub k_max: i32,
    pub coefficients: Vec<Complex64>,
    pub seed: u64,
    pub sample_index: u64,
}

impl GaussianDraw {
    /// Draw with explicit coefficients (no seed provenance).
    pub fn from_coefficients(k_min: i32, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Domain("draw needs at least one coefficient".into()));
        }
        let k_max = k_min + coefficients.len() as i32 - 1;
        Ok(Self {
            k_min,
            k_max,
            coefficients,
            seed: 0,
            sample_index: 0,
        })
    }

    pub fn constant(k_min: i32, k_max: i32, value: Complex64) -> Result<Self> {
        if k_max < k_min {
            return Err(Error::Domain(format!("empty k range [{k_min}, {k_max}]")));
        }
        Self::from_coefficients(k_min, vec![value; (k_max - k_min + 1) as usize])
    }

    pub fn coefficient(&self, k: i32) -> Option<Complex64> {
        if k < self.k_min || k > self.k_max {
            return None;
        }
        Some(self.coefficients[(k - self.k_min) as usize])
    }
}

pub fn sample_draw(k_min: i32, k_max: i32, seed: u64, sample_index: u64) -> Result<GaussianDraw> {
    if k_max < k_min {
        return Err(Error::Domain(format!("empty k range [{k_min}, {k_max}]")));
    }
    let coefficients = (k_min..=k_max)
        .map(|k| gaussian_coefficient(seed, sample_index, k))
        .collect();
    Ok(GaussianDraw {
        k_min,
        k_max,
        coefficients,
        seed,
        sample_index,
    })
}

/// `f^omega = sum_k g_k psi(D - k) f`.
pub fn randomize(p: &SpectralProfile, draw: &GaussianDraw) -> Result<SpectralProfile> {
    let (need_min, need_max) = wiener_range(p);
    if !p.is_zero() && (draw.k_min > need_min || draw.k_max < need_max) {
        return Err(Error::KRangeMismatch {
            draw_min: draw.k_min,
            draw_max: draw.k_max,
            need_min,
            need_max,
        });
    }
    Ok(p.map(|xi, a| {
        if a == ZERO {
            return ZERO;
        }
        let (k, lower, upper) = window_split(xi, a);
        let g = |k: i64| draw.coefficient(k as i32).unwrap_or(ZERO);
        ZERO + g(k) * lower + g(k + 1) * upper
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhinchineResult {
    pub p: f64,
    /// `||sum g_k c_k||_{L^p} / (sqrt(p) ||c||_2)` estimated from the samples.
    pub ratio: f64,
    pub std_error: f64,
    /// The same ratio computed in closed form.
    pub exact: f64,
}

/// `(E|G|^p)^(1/p) / sqrt(p)` for a complex Gaussian `G` with `E|G|^2 = 2`.
pub fn khinchine_exact_ratio(p: f64) -> f64 {
    let m = (p / 2.0 * std::f64::consts::LN_2 + statrs::function::gamma::ln_gamma(1.0 + p / 2.0)) / p;
    m.exp() / p.sqrt()
}

/// Moment ratios for every order in `ps`, all from the same `n_samples` draws.
pub fn khinchine_check(c: &[Complex64], ps: &[f64], n_samples: usize, seed: u64) -> Result<Vec<KhinchineResult>> {
    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Degenerate("coefficient sequence is zero".into()));
    }
    if let Some(p) = ps.iter().find(|p| !(**p >= 2.0 && p.is_finite())) {
        return Err(Error::Domain(format!("moment order must be finite and >= 2, got {p}")));
    }
    if n_samples < 2 {
        return Err(Error::Domain("khinchine check needs at least two samples".into()));
    }
    let moduli: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = ZERO;
            for (k, ck) in c.iter().enumerate() {
                s += gaussian_coefficient(seed, i, k as i32) * ck;
            }
            s.norm() / norm
        })
        .collect();
    let n = n_samples as f64;
    Ok(ps
        .iter()
        .map(|&p| {
            let powers: Vec<f64> = moduli.iter().map(|m| m.powf(p)).collect();
            let mean = pairwise_sum(&powers) / n;
            let dev: Vec<f64> = powers.iter().map(|v| (v - mean) * (v - mean)).collect();
            let sd = (pairwise_sum(&dev) / (n - 1.0)).sqrt();
            let root = mean.powf(1.0 / p);
            KhinchineResult {
                p,
                ratio: root / p.sqrt(),
                std_error: root / (p * mean) * sd / n.sqrt() / p.sqrt(),
                exact: khinchine_exact_ratio(p),
            }
        })
        .collect())
}

/// Empirical `P(|U(t) f^omega(x) - f^omega(x)| > alpha)` against `t`, with the
/// same draws reused for every `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCurve {
    pub alpha: f64,
    pub x: f64,
    pub t_values: Vec<f64>,
    pub empirical_probs: Vec<f64>,
    pub wilson_lo: Vec<f64>,
    pub wilson_hi: Vec<f64>,
    pub wilson_halfwidth: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// Constant for which the bound of [`tail_bound_curve`] with `epsilon =
    /// sqrt(t)` touches the empirical curve; `None` when every probability is 0.
    pub c_fit: Option<f64>,
}

/// Values `c_k = [(U(t) - 1) psi(D - k) f](x)` so that the randomized deviation
/// is `sum_k g_k c_k` by linearity.
pub fn deviation_coefficients(
    p: &SpectralProfile,
    x: f64,
    cfg: PropagatorConfig,
) -> (i32, Vec<Complex64>) {
    let d = wiener_decompose(p);
    let c = d
        .pieces
        .par_iter()
        .map(|piece| {
            if piece.is_zero() || cfg.t == 0.0 {
                ZERO
            } else {
                synthesize_at(&deviation_spectral(piece, cfg), x)
            }
        })
        .collect();
    (d.k_min, c)
}

pub fn stochastic_continuity(
    p: &SpectralProfile,
    x: f64,
    alpha: f64,
    t_values: &[f64],
    n_samples: usize,
    seed: u64,
    sign: Sign,
) -> Result<TailCurve> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let t_big = t_values.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    require_resolution(p, PropagatorConfig::new(t_big, sign))?;
    let coeffs: Vec<(i32, Vec<Complex64>)> = t_values
        .iter()
        .map(|&t| deviation_coefficients(p, x, PropagatorConfig::new(t, sign)))
        .collect();
    let (k_min, k_max) = wiener_range(p);
    let exceed: Vec<Vec<bool>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let g: Vec<Complex64> = (k_min..=k_max).map(|k| gaussian_coefficient(seed, i, k)).collect();
            coeffs
                .iter()
                .map(|(_, c)| {
                    let mut d = ZERO;
                    for (gk, ck) in g.iter().zip(c) {
                        d += gk * ck;
                    }
                    d.norm() > alpha
                })
                .collect()
        })
        .collect();
    let mut curve = TailCurve {
        alpha,
        x,
        t_values: t_values.to_vec(),
        empirical_probs: Vec::new(),
        wilson_lo: Vec::new(),
        wilson_hi: Vec::new(),
        wilson_halfwidth: Vec::new(),
        n_samples,
        seed,
        c_fit: None,
    };
    for j in 0..t_values.len() {
        let hits = exceed.iter().filter(|row| row[j]).count();
        let (lo, hi) = wilson_interval(hits, n_samples);
        curve.empirical_probs.push(hits as f64 / n_samples as f64);
        curve.wilson_lo.push(lo);
        curve.wilson_hi.push(hi);
        curve.wilson_halfwidth.push(0.5 * (hi - lo));
    }
    curve.c_fit = fit_tail_constant(alpha, t_values, &curve.empirical_probs, DEFAULT_C1);
    Ok(curve)
}

/// `3 C1 exp(-(alpha / (2 C e epsilon))^2)`.
pub fn tail_bound_curve(alpha: f64, epsilon: f64, c_fit: f64, c1: f64) -> f64 {
    let z = alpha / (2.0 * c_fit * std::f64::consts::E * epsilon);
    3.0 * c1 * (-z * z).exp()
}

/// Smallest `C` for which `tail_bound_curve(alpha, sqrt(t), C, c1)` dominates
/// every empirical probability; the bound touches the curve where the
/// maximum is attained.
pub fn fit_tail_constant(alpha: f64, t_values: &[f64], probs: &[f64], c1: f64) -> Option<f64> {
    t_values
        .iter()
        .zip(probs)
        .filter(|(t, p)| **p > 0.0 && **t > 0.0)
        .map(|(t, p)| alpha / (2.0 * std::f64::consts::E * t.sqrt() * (3.0 * c1 / p).ln().sqrt()))
        .reduce(f64::max)
}

/// Empirical tail of `|U(t) h^omega(x)|` and its Gaussian fit
/// `P(|.| > alpha) ~ c1 exp(-c2 alpha^2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianTail {
    pub alphas: Vec<f64>,
    pub probs: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub correlation: f64,
    pub n_samples: usize,
}

/// Samples `U(t) h^omega(x)` and fits `log P(|.| > alpha)` against `alpha^2`
/// over `n_alpha` thresholds spaced up to the level where ten samples remain
/// above.
pub fn gaussian_tail(
    p: &SpectralProfile,
    x: f64,
    cfg: PropagatorConfig,
    n_samples: usize,
    seed: u64,
    n_alpha: usize,
) -> Result<GaussianTail> {
    if n_samples < 100 || n_alpha < 3 {
        return Err(Error::Domain("tail fit needs at least 100 samples and 3 thresholds".into()));
    }
    require_resolution(p, cfg)?;
    let d = wiener_decompose(p);
    let evolved = crate::spectral::evolve_spectral(p, cfg);
    let c: Vec<Complex64> = wiener_decompose(&evolved)
        .pieces
        .par_iter()
        .map(|q| if q.is_zero() { ZERO } else { synthesize_at(q, x) })
        .collect();
    if c.iter().all(|v| *v == ZERO) {
        return Err(Error::Degenerate("randomized value is identically zero".into()));
    }
    let mut moduli: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = ZERO;
            for (k, ck) in (d.k_min..).zip(&c) {
                s += gaussian_coefficient(seed, i, k) * ck;
            }
            s.norm()
        })
        .collect();
    moduli.sort_by(f64::total_cmp);
    let top = moduli[n_samples - 11];
    let n = n_samples as f64;
    let alphas: Vec<f64> = (1..=n_alpha).map(|j| top * j as f64 / n_alpha as f64).collect();
    let probs: Vec<f64> = alphas
        .iter()
        .map(|a| {
            let below = moduli.partition_point(|m| m <= a);
            (n_samples - below) as f64 / n
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = alphas
        .iter()
        .zip(&probs)
        .filter(|(_, p)| **p >= 10.0 / n)
        .map(|(a, p)| (a * a, p.ln()))
        .unzip();
    let fit = least_squares(&xs, &ys)?;
    let correlation = pearson(&xs, &ys)?;
    let c2 = -fit.slope;
    let c1 = xs
        .iter()
        .zip(&ys)
        .map(|(x2, y)| (y + c2 * x2).exp())
        .fold(0.0, f64::max);
    Ok(GaussianTail {
        alphas,
        probs,
        c1,
        c2,
        correlation,
        n_samples,
    })
}
