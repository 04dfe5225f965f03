#![allow(dead_code)]

use ostrovsky_core::{Complex64, SpectralProfile};

pub fn gaussian_bump(amp: f64, centre: f64, sigma: f64, lo: f64, hi: f64, h: f64, notch: f64) -> SpectralProfile {
    let n = ((hi - lo) / h).round() as usize + 1;
    SpectralProfile::from_fn(lo, h, n, notch, |xi| {
        let z = (xi - centre) / sigma;
        Complex64::new(amp * (-0.5 * z * z).exp(), 0.0)
    })
    .unwrap()
}

pub fn band(lo: f64, hi: f64, h: f64) -> SpectralProfile {
    let n = ((hi - lo) / h).round() as usize + 1;
    SpectralProfile::from_fn(lo, h, n, 0.0, |_| Complex64::new(1.0, 0.0)).unwrap()
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
