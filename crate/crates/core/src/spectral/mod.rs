//! Frequency-space data, the free Ostrovsky propagator and the norms used by
//! every experiment.
//!
//! The propagator is the unimodular multiplier `e^{i t (xi^3 +- 1/xi)}`
//! applied to sampled Fourier data, followed by direct trapezoid synthesis.
//! Near `xi = 0` the phase cannot be resolved on any fixed grid, so profiles
//! carry a hard exclusion radius and every propagation is gated by
//! [`validate_resolution`].

mod field;
mod profile;
pub(crate) mod synth;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::{lp_norm_samples, lp_norm_space, SpaceField, SpaceGrid};
pub use profile::{SpectralProfile, DEFAULT_ZERO_EXCLUSION};

/// Largest admissible phase increment `|t| |phase'(xi)| xi_step` per grid cell.
pub const MAX_PHASE_INCREMENT: f64 = 0.1;

/// Branch of the dispersion relation `xi^3 +- 1/xi`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "p" => Ok(Sign::Plus),
            "-" | "minus" | "m" => Ok(Sign::Minus),
            other => Err(Error::Domain(format!("sign must be + or -, got `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub sign: Sign,
    pub t: f64,
}

impl PropagatorConfig {
    pub fn new(t: f64, sign: Sign) -> Self {
        Self { sign, t }
    }

    pub fn plus(t: f64) -> Self {
        Self::new(t, Sign::Plus)
    }

    pub fn at(self, t: f64) -> Self {
        Self { t, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub max_phase_increment: f64,
    pub truncated_mass: f64,
    pub ok: bool,
}

/// `xi^3 + 1/xi` for [`Sign::Plus`], `xi^3 - 1/xi` for [`Sign::Minus`].
pub fn phase(xi: f64, sign: Sign) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::SingularFrequency);
    }
    Ok(phase_unchecked(xi, sign))
}

#[inline]
pub(crate) fn phase_unchecked(xi: f64, sign: Sign) -> f64 {
    xi * xi * xi + sign.factor() / xi
}

/// `3 xi^2 -+ 1/xi^2`.
pub fn phase_derivative(xi: f64, sign: Sign) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::SingularFrequency);
    }
    Ok(3.0 * xi * xi - sign.factor() / (xi * xi))
}

const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `t * phase` reduced to `[-pi, pi]` as an unevaluated sum `hi + lo`.
///
/// The product is formed exactly with an fma and the reduction uses a
/// two-word `2 pi`, so the angle is correct to a few ulps of the reduced
/// value rather than of `t * phase`.
#[inline]
fn reduced_angle(t: f64, phase: f64) -> (f64, f64) {
    let hi = t * phase;
    let lo = t.mul_add(phase, -hi);
    let k = (hi / std::f64::consts::TAU).round();
    if k == 0.0 {
        return (hi, lo);
    }
    if k.abs() > 4.0e15 {
        return (hi.rem_euclid(std::f64::consts::TAU), 0.0);
    }
    let p = k * std::f64::consts::TAU;
    let e = k.mul_add(std::f64::consts::TAU, -p);
    let d = hi - p;
    let r = d - e;
    let r_lo = ((d - r) - e) + (lo - k * TAU_LO);
    let s = r + r_lo;
    (s, (r - s) + r_lo)
}

/// `e^{i t phase}`.
#[inline]
pub(crate) fn unimodular(t: f64, phase: f64) -> Complex64 {
    let (hi, lo) = reduced_angle(t, phase);
    let (s, c) = hi.sin_cos();
    Complex64::new(c - s * lo, s + c * lo)
}

/// `e^{i t phase} - 1`, accurate for small angles.
#[inline]
pub(crate) fn unimodular_minus_one(t: f64, phase: f64) -> Complex64 {
    let (hi, lo) = reduced_angle(t, phase);
    let (s, c) = hi.sin_cos();
    let half = (0.5 * hi).sin();
    Complex64::new(-2.0 * half * half - s * lo, s + c * lo)
}

/// Multiplies every nonzero amplitude by `e^{i t phase(xi)}`. `t = 0` returns
/// an exact copy.
pub fn evolve_spectral(p: &SpectralProfile, cfg: PropagatorConfig) -> SpectralProfile {
    if cfg.t == 0.0 {
        return p.clone();
    }
    p.map(|xi, a| {
        if a == Complex64::new(0.0, 0.0) {
            a
        } else {
            a * unimodular(cfg.t, phase_unchecked(xi, cfg.sign))
        }
    })
}

/// Spectral data of `U(t)f - f`, i.e. amplitudes times `e^{i t phase} - 1`.
pub fn deviation_spectral(p: &SpectralProfile, cfg: PropagatorConfig) -> SpectralProfile {
    p.map(|xi, a| {
        if a == Complex64::new(0.0, 0.0) || cfg.t == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            a * unimodular_minus_one(cfg.t, phase_unchecked(xi, cfg.sign))
        }
    })
}

/// Inverse Fourier transform by the trapezoid rule on the profile grid.
pub fn synthesize(p: &SpectralProfile, grid: &SpaceGrid) -> SpaceField {
    synth::synthesize_grid(p, grid)
}

/// Synthesized value at a single point.
pub fn synthesize_at(p: &SpectralProfile, x: f64) -> Complex64 {
    synth::Coefficients::of(p).map_or(Complex64::new(0.0, 0.0), |c| c.eval(x))
}

/// Largest per-cell phase increment over the nonzero samples, and whether it
/// stays within [`MAX_PHASE_INCREMENT`].
pub fn validate_resolution(p: &SpectralProfile, cfg: PropagatorConfig) -> ResolutionReport {
    let mut max_inc: f64 = 0.0;
    if cfg.t != 0.0 {
        let h = p.xi_step();
        for (j, a) in p.amplitudes().iter().enumerate() {
            if *a != Complex64::new(0.0, 0.0) {
                let xi = p.xi(j);
                let d = 3.0 * xi * xi - cfg.sign.factor() / (xi * xi);
                max_inc = max_inc.max(cfg.t.abs() * d.abs() * h);
            }
        }
    }
    ResolutionReport {
        max_phase_increment: max_inc,
        truncated_mass: p.truncated_mass(),
        ok: max_inc <= MAX_PHASE_INCREMENT,
    }
}

pub(crate) fn require_resolution(p: &SpectralProfile, cfg: PropagatorConfig) -> Result<()> {
    let report = validate_resolution(p, cfg);
    if report.ok {
        Ok(())
    } else {
        Err(Error::Resolution(report))
    }
}

/// `U(t)f` sampled on `grid`; refuses when the phase is under-resolved.
pub fn propagate(p: &SpectralProfile, cfg: PropagatorConfig, grid: &SpaceGrid) -> Result<SpaceField> {
    require_resolution(p, cfg)?;
    Ok(synthesize(&evolve_spectral(p, cfg), grid))
}

/// `(sum_j w_j (1 + xi_j^2)^s |a_j|^2 xi_step)^(1/2)`.
pub fn hs_norm(p: &SpectralProfile, s: f64) -> f64 {
    p.integrate(|xi, a| (1.0 + xi * xi).powf(s) * a.norm_sqr()).sqrt()
}
