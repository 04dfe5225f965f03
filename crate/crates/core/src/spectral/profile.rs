use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default radius of the frequency interval around `xi = 0` whose samples are
/// forced to zero (2^-20).
pub const DEFAULT_ZERO_EXCLUSION: f64 = 1.0 / 1_048_576.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier data sampled on a uniform frequency grid `xi_j = xi_min + j * xi_step`.
///
/// Samples with `|xi_j| < zero_exclusion` (and any sample sitting on `xi = 0`)
/// are zeroed at construction. The l1 mass removed that way is kept as
/// `truncated_mass` so that callers can report it.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralProfile {
    xi_min: f64,
    xi_step: f64,
    amplitudes: Vec<Complex64>,
    zero_exclusion: f64,
    truncated_mass: f64,
}

impl SpectralProfile {
    pub fn new(xi_min: f64, xi_step: f64, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_zero_exclusion(xi_min, xi_step, amplitudes, DEFAULT_ZERO_EXCLUSION)
    }

    pub fn with_zero_exclusion(
        xi_min: f64,
        xi_step: f64,
        mut amplitudes: Vec<Complex64>,
        zero_exclusion: f64,
    ) -> Result<Self> {
        if !(xi_step.is_finite() && xi_step > 0.0) {
            return Err(Error::InvalidGrid(format!("xi_step must be positive, got {xi_step}")));
        }
        if !xi_min.is_finite() {
            return Err(Error::InvalidGrid("xi_min must be finite".into()));
        }
        if amplitudes.is_empty() {
            return Err(Error::InvalidGrid("profile needs at least one sample".into()));
        }
        if !(zero_exclusion.is_finite() && zero_exclusion >= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "zero exclusion radius must be finite and >= 0, got {zero_exclusion}"
            )));
        }
        if let Some(index) = amplitudes.iter().position(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        let on_zero = xi_step * 1e-9;
        let mut truncated_mass = 0.0;
        for (j, a) in amplitudes.iter_mut().enumerate() {
            let xi = xi_min + j as f64 * xi_step;
            if xi.abs() < zero_exclusion || xi.abs() <= on_zero {
                truncated_mass += a.norm() * xi_step;
                *a = ZERO;
            }
        }
        Ok(Self {
            xi_min,
            xi_step,
            amplitudes,
            zero_exclusion,
            truncated_mass,
        })
    }

    /// Samples `f` on `len` grid points.
    pub fn from_fn(
        xi_min: f64,
        xi_step: f64,
        len: usize,
        zero_exclusion: f64,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let amplitudes = (0..len).map(|j| f(xi_min + j as f64 * xi_step)).collect();
        Self::with_zero_exclusion(xi_min, xi_step, amplitudes, zero_exclusion)
    }

    /// Same grid and exclusion radius, new amplitudes produced pointwise by `f`.
    ///
    /// Excluded samples stay zero whatever `f` returns there.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let xi = self.xi(j);
                if self.is_excluded(xi) {
                    ZERO
                } else {
                    f(xi, a)
                }
            })
            .collect();
        Self {
            amplitudes,
            ..self.clone_grid()
        }
    }

    /// Pointwise multiplication by a real multiplier `m(xi)`.
    pub fn multiply(&self, m: impl Fn(f64) -> f64) -> Self {
        self.map(|xi, a| if a == ZERO { ZERO } else { a * m(xi) })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            amplitudes: vec![ZERO; self.amplitudes.len()],
            ..self.clone_grid()
        }
    }

    /// Pointwise sum of two profiles on the same grid.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::InvalidGrid("profiles live on different grids".into()));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            amplitudes,
            ..self.clone_grid()
        })
    }

    fn clone_grid(&self) -> Self {
        Self {
            xi_min: self.xi_min,
            xi_step: self.xi_step,
            amplitudes: Vec::new(),
            zero_exclusion: self.zero_exclusion,
            truncated_mass: self.truncated_mass,
        }
    }

    fn is_excluded(&self, xi: f64) -> bool {
        xi.abs() < self.zero_exclusion || xi.abs() <= self.xi_step * 1e-9
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.xi_min == other.xi_min
            && self.xi_step == other.xi_step
            && self.amplitudes.len() == other.amplitudes.len()
    }

    #[inline]
    pub fn xi(&self, j: usize) -> f64 {
        self.xi_min + j as f64 * self.xi_step
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.xi(j))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    pub fn xi_max(&self) -> f64 {
        self.xi(self.len() - 1)
    }

    pub fn xi_step(&self) -> f64 {
        self.xi_step
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn zero_exclusion(&self) -> f64 {
        self.zero_exclusion
    }

    /// l1 mass (`sum |a| * xi_step`) removed from the exclusion zone at construction.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// Trapezoid weight of sample `j`: 1/2 at the two extreme grid points.
    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        if self.len() > 1 && (j == 0 || j + 1 == self.len()) {
            0.5
        } else {
            1.0
        }
    }

    /// Indices of the first and last nonzero samples.
    pub fn active_range(&self) -> Option<(usize, usize)> {
        let first = self.amplitudes.iter().position(|a| *a != ZERO)?;
        let last = self.amplitudes.iter().rposition(|a| *a != ZERO)?;
        Some((first, last))
    }

    /// Frequencies of the first and last nonzero samples.
    pub fn support(&self) -> Option<(f64, f64)> {
        self.active_range().map(|(a, b)| (self.xi(a), self.xi(b)))
    }

    pub fn is_zero(&self) -> bool {
        self.active_range().is_none()
    }

    /// Weighted quadrature `sum w_j * g(xi_j, a_j) * xi_step` over nonzero samples.
    pub fn integrate(&self, g: impl Fn(f64, Complex64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (j, &a) in self.amplitudes.iter().enumerate() {
            if a != ZERO {
                acc += self.weight(j) * g(self.xi(j), a);
            }
        }
        acc * self.xi_step
    }

    /// Trapezoid L2 norm of the sampled Fourier data; equals the L2 norm of the
    /// synthesized function by Plancherel.
    pub fn l2_norm(&self) -> f64 {
        self.integrate(|_, a| a.norm_sqr()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.integrate(|_, a| a.norm())
    }
}
