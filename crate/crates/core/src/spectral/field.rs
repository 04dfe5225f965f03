use num_complex::Complex64;

use super::profile::SpectralProfile;
use crate::error::{Error, Result};

/// Uniform space grid `x_j = x_min + j * x_step`, `j < len`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceGrid {
    x_min: f64,
    x_step: f64,
    len: usize,
}

impl SpaceGrid {
    pub fn new(x_min: f64, x_step: f64, len: usize) -> Result<Self> {
        if !(x_step.is_finite() && x_step > 0.0) {
            return Err(Error::InvalidGrid(format!("x_step must be positive, got {x_step}")));
        }
        if !x_min.is_finite() || len == 0 {
            return Err(Error::InvalidGrid("x grid needs a finite origin and at least one point".into()));
        }
        Ok(Self { x_min, x_step, len })
    }

    /// `len` points spanning `[lo, hi]` inclusive.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if len < 2 || !(hi > lo) {
            return Err(Error::InvalidGrid(format!("cannot span [{lo}, {hi}] with {len} points")));
        }
        Self::new(lo, (hi - lo) / (len - 1) as f64, len)
    }

    pub fn symmetric(half_width: f64, len: usize) -> Result<Self> {
        Self::spanning(-half_width, half_width, len)
    }

    pub fn single(x: f64) -> Self {
        Self { x_min: x, x_step: 1.0, len: 1 }
    }

    /// One full period `2 pi / xi_step` of the synthesized (periodic) field,
    /// sampled with enough points that the discrete L2 sum over the grid equals
    /// the spectral l2 norm exactly (no aliasing between active frequencies).
    /// Both period endpoints are included so the trapezoid rule applies.
    pub fn alias_free_period(p: &SpectralProfile) -> Self {
        let span = p.active_range().map(|(a, b)| b - a + 1).unwrap_or(1);
        let n = span.max(2);
        let period = std::f64::consts::TAU / p.xi_step();
        Self {
            x_min: -0.5 * period,
            x_step: period / n as f64,
            len: n + 1,
        }
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.x_step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|j| self.x(j))
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len - 1)
    }

    pub fn x_step(&self) -> f64 {
        self.x_step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Complex samples `u(x_j)` on a uniform space grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceField {
    x_min: f64,
    x_step: f64,
    values: Vec<Complex64>,
}

impl SpaceField {
    pub fn new(x_min: f64, x_step: f64, values: Vec<Complex64>) -> Result<Self> {
        SpaceGrid::new(x_min, x_step, values.len())?;
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { x_min, x_step, values })
    }

    pub(crate) fn from_grid(grid: &SpaceGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self {
            x_min: grid.x_min,
            x_step: grid.x_step,
            values,
        }
    }

    pub fn grid(&self) -> SpaceGrid {
        SpaceGrid {
            x_min: self.x_min,
            x_step: self.x_step,
            len: self.values.len(),
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.x_step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Trapezoid-rule `L^p` norm over the sampled window; `p = inf` gives the max modulus.
pub fn lp_norm_space(u: &SpaceField, p: f64) -> Result<f64> {
    lp_norm_samples(&u.moduli(), u.x_step, p)
}

/// Trapezoid-rule `L^p` norm of nonnegative samples with spacing `dx`.
pub fn lp_norm_samples(moduli: &[f64], dx: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(moduli.iter().copied().fold(0.0, f64::max));
    }
    let n = moduli.len();
    if n < 2 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for (j, m) in moduli.iter().enumerate() {
        let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
        acc += w * m.powf(p);
    }
    Ok((acc * dx).powf(1.0 / p))
}
