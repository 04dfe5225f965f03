//! Dyadic Littlewood-Paley projections and unit-scale Wiener windows.
//!
//! Multipliers are applied so that the algebraic identities hold to the last
//! bit: every product `m * a` is rounded onto the ulp grid of `a`, which makes
//! complements `a - m * a` and differences of two such products exact. The
//! price is a deviation of at most half an ulp of `a` from the plain product.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{synthesize, SpaceField, SpaceGrid, SpectralProfile};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dyadic cutoff: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`, quintic smoothstep between.
pub fn phi(xi: f64) -> f64 {
    let r = xi.abs();
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let u = r - 1.0;
        1.0 - u * u * u * (10.0 + u * (6.0 * u - 15.0))
    }
}

/// Wiener window: the hat `max(0, 1 - |xi|)`.
pub fn psi(xi: f64) -> f64 {
    (1.0 - xi.abs()).max(0.0)
}

pub fn low_multiplier(xi: f64, n: f64) -> f64 {
    phi(xi / n)
}

pub fn band_multiplier(xi: f64, n: f64) -> f64 {
    phi(xi / n) - phi(2.0 * xi / n)
}

pub fn high_multiplier(xi: f64, n: f64) -> f64 {
    1.0 - phi(xi / n)
}

fn ulp(v: f64) -> f64 {
    let a = v.abs();
    if a < f64::MIN_POSITIVE {
        return f64::from_bits(1);
    }
    f64::from_bits(a.to_bits() & 0x7ff0_0000_0000_0000) * f64::EPSILON
}

/// `m * v` rounded to a multiple of `ulp(v)`, for `0 <= m <= 1`.
fn scaled(m: f64, v: f64) -> f64 {
    if v == 0.0 || m == 1.0 {
        return v * m;
    }
    let u = ulp(v);
    (m * v / u).round() * u
}

fn scale(m: f64, a: Complex64) -> Complex64 {
    Complex64::new(scaled(m, a.re), scaled(m, a.im))
}

fn check_scale(n: f64) -> Result<()> {
    if n.is_finite() && n > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("dyadic scale must be positive, got {n}")))
    }
}

/// `P_{<=N}`: multiplier `phi(xi / N)`.
pub fn project_low(p: &SpectralProfile, n: f64) -> Result<SpectralProfile> {
    check_scale(n)?;
    Ok(p.map(|xi, a| scale(phi(xi / n), a)))
}

/// `P_N`: multiplier `phi(xi / N) - phi(2 xi / N)`.
pub fn project_band(p: &SpectralProfile, n: f64) -> Result<SpectralProfile> {
    check_scale(n)?;
    Ok(p.map(|xi, a| scale(phi(xi / n), a) - scale(phi(2.0 * xi / n), a)))
}

/// `P_{>N}`: multiplier `1 - phi(xi / N)`.
pub fn project_high(p: &SpectralProfile, n: f64) -> Result<SpectralProfile> {
    check_scale(n)?;
    Ok(p.map(|xi, a| a - scale(phi(xi / n), a)))
}

/// Splits `a` at `xi` between windows `floor(xi)` and `floor(xi) + 1`; the two
/// shares add up to `a` exactly.
pub(crate) fn window_split(xi: f64, a: Complex64) -> (i64, Complex64, Complex64) {
    let base = xi.floor();
    let lower = scale(1.0 - (xi - base), a);
    (base as i64, lower, a - lower)
}

fn window_share(xi: f64, k: i64, a: Complex64) -> Complex64 {
    let (kb, lower, upper) = window_split(xi, a);
    if k == kb {
        lower
    } else if k == kb + 1 {
        upper
    } else {
        ZERO
    }
}

/// `psi(D - k)`: amplitudes times `psi(xi - k)`.
pub fn wiener_project(p: &SpectralProfile, k: i32) -> SpectralProfile {
    p.map(|xi, a| window_share(xi, i64::from(k), a))
}

/// Windows `k_min..=k_max` whose pieces add up to the original profile.
#[derive(Clone, Debug, PartialEq)]
pub struct WienerDecomposition {
    pub k_min: i32,
    pub k_max: i32,
    pub pieces: Vec<SpectralProfile>,
}

impl WienerDecomposition {
    pub fn iter(&self) -> impl Iterator<Item = (i32, &SpectralProfile)> {
        (self.k_min..=self.k_max).zip(&self.pieces)
    }

    pub fn piece(&self, k: i32) -> Option<&SpectralProfile> {
        if k < self.k_min || k > self.k_max {
            return None;
        }
        self.pieces.get((k - self.k_min) as usize)
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Sum of the pieces in increasing `k`.
    pub fn reconstruct(&self) -> Result<SpectralProfile> {
        let mut acc = self
            .pieces
            .first()
            .ok_or_else(|| Error::Degenerate("empty decomposition".into()))?
            .zeros_like();
        for piece in &self.pieces {
            acc = acc.try_add(piece)?;
        }
        Ok(acc)
    }

    /// `sum_k ||piece_k||^2`.
    pub fn energy(&self) -> f64 {
        self.pieces.iter().map(|q| q.l2_norm().powi(2)).sum()
    }
}

/// Window range needed to cover the support of `p`, expanded by one on each side.
pub fn wiener_range(p: &SpectralProfile) -> (i32, i32) {
    match p.support() {
        Some((lo, hi)) => (lo.floor() as i32 - 1, hi.ceil() as i32 + 1),
        None => (0, 0),
    }
}

pub fn wiener_decompose(p: &SpectralProfile) -> WienerDecomposition {
    let (k_min, k_max) = wiener_range(p);
    let pieces = (k_min..=k_max)
        .into_par_iter()
        .map(|k| wiener_project(p, k))
        .collect();
    WienerDecomposition { k_min, k_max, pieces }
}

/// `(sum_k |psi(D - k) f|^2)^(1/2)` on `grid`, stored as a real field.
pub fn square_function(p: &SpectralProfile, grid: &SpaceGrid) -> SpaceField {
    let d = wiener_decompose(p);
    let mut acc = vec![0.0; grid.len()];
    for piece in d.pieces.iter().filter(|q| !q.is_zero()) {
        let u = synthesize(piece, grid);
        for (s, v) in acc.iter_mut().zip(u.values()) {
            *s += v.norm_sqr();
        }
    }
    let values = acc.into_iter().map(|s| Complex64::new(s.sqrt(), 0.0)).collect();
    SpaceField::new(grid.x_min(), grid.x_step(), values).expect("finite square function")
}
