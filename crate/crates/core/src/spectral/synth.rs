//! Direct trapezoid synthesis `u(x) = (2 pi)^(-1/2) sum_m w_m h e^{i x xi_m} a_m`.
//!
//! For a fixed `x` the exponentials `e^{i x xi_m}` are generated by rotation
//! along the grid and re-seeded with an exact `sin_cos` every [`RESEED`]
//! samples, so rounding drift stays at a few ulps. Summation runs in grid
//! order for every `x`; evaluating a precomputed kernel row gives the same
//! bits as streaming it.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{SpaceField, SpaceGrid};
use super::profile::SpectralProfile;

pub(crate) const INV_SQRT_TAU: f64 = 0.398_942_280_401_432_7;
const RESEED: usize = 32;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Quadrature-weighted coefficients `w_m * h * a_m` over the active index range.
#[derive(Clone, Debug)]
pub(crate) struct Coefficients {
    first: usize,
    xi_min: f64,
    xi_step: f64,
    values: Vec<Complex64>,
}

impl Coefficients {
    pub(crate) fn of(p: &SpectralProfile) -> Option<Self> {
        let (first, last) = p.active_range()?;
        let h = p.xi_step();
        let values = (first..=last)
            .map(|j| p.amplitudes()[j] * (p.weight(j) * h))
            .collect();
        Some(Self {
            first,
            xi_min: p.xi_min(),
            xi_step: h,
            values,
        })
    }

    /// Same index range and grid, coefficients built from another profile's
    /// amplitudes on that grid (used when the active range is shared).
    pub(crate) fn restrict(p: &SpectralProfile, first: usize, last: usize) -> Self {
        let h = p.xi_step();
        let values = (first..=last)
            .map(|j| p.amplitudes()[j] * (p.weight(j) * h))
            .collect();
        Self {
            first,
            xi_min: p.xi_min(),
            xi_step: h,
            values,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    fn xi(&self, i: usize) -> f64 {
        self.xi_min + (self.first + i) as f64 * self.xi_step
    }

    /// `e^{i x xi_m}` along the active range.
    pub(crate) fn kernel_row(&self, x: f64) -> Vec<Complex64> {
        let mut row = Vec::with_capacity(self.len());
        let rot = Complex64::cis(x * self.xi_step);
        let mut z = ZERO;
        for i in 0..self.len() {
            z = if i % RESEED == 0 {
                Complex64::cis(x * self.xi(i))
            } else {
                z * rot
            };
            row.push(z);
        }
        row
    }

    #[inline]
    pub(crate) fn apply_row(&self, row: &[Complex64]) -> Complex64 {
        let mut acc = ZERO;
        for (z, c) in row.iter().zip(&self.values) {
            if *c != ZERO {
                acc += z * c;
            }
        }
        acc * INV_SQRT_TAU
    }

    /// Streaming evaluation at one point; bit-identical to
    /// `apply_row(&kernel_row(x))`.
    pub(crate) fn eval(&self, x: f64) -> Complex64 {
        let rot = Complex64::cis(x * self.xi_step);
        let mut z = ZERO;
        let mut acc = ZERO;
        for (i, c) in self.values.iter().enumerate() {
            z = if i % RESEED == 0 {
                Complex64::cis(x * self.xi(i))
            } else {
                z * rot
            };
            if *c != ZERO {
                acc += z * c;
            }
        }
        acc * INV_SQRT_TAU
    }
}

pub(crate) fn synthesize_grid(p: &SpectralProfile, grid: &SpaceGrid) -> SpaceField {
    let values = match Coefficients::of(p) {
        None => vec![ZERO; grid.len()],
        Some(coeffs) => (0..grid.len())
            .into_par_iter()
            .map(|j| coeffs.eval(grid.x(j)))
            .collect(),
    };
    SpaceField::from_grid(grid, values)
}

/// Precomputed `e^{i x_j xi_m}` table for repeated synthesis of profiles that
/// share a grid and active range (time scans).
pub(crate) struct KernelTable {
    first: usize,
    last: usize,
    rows: Vec<Vec<Complex64>>,
}

impl KernelTable {
    pub(crate) fn new(p: &SpectralProfile, grid: &SpaceGrid) -> Option<Self> {
        let (first, last) = p.active_range()?;
        let coeffs = Coefficients::restrict(p, first, last);
        let rows = (0..grid.len())
            .into_par_iter()
            .map(|j| coeffs.kernel_row(grid.x(j)))
            .collect();
        Some(Self { first, last, rows })
    }

    /// Synthesizes `q`, which must share the grid of the profile the table was
    /// built from and vanish outside its active range.
    pub(crate) fn synthesize(&self, q: &SpectralProfile) -> Vec<Complex64> {
        let coeffs = Coefficients::restrict(q, self.first, self.last);
        self.rows.par_iter().map(|row| coeffs.apply_row(row)).collect()
    }
}
