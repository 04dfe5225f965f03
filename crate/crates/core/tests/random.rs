mod common;

use common::{gaussian_bump, simpson};
use ostrovsky_core::projections::wiener_decompose;
use ostrovsky_core::random::{
    fit_tail_constant, gaussian_coefficient, gaussian_tail, khinchine_check, randomize, sample_draw,
    stochastic_continuity, tail_bound_curve, GaussianDraw, DEFAULT_C1,
};
use ostrovsky_core::spectral::{propagate, synthesize_at, PropagatorConfig, Sign, SpaceGrid};
use ostrovsky_core::stats::pairwise_sum;
use ostrovsky_core::{Complex64, Error};

fn bump() -> ostrovsky_core::SpectralProfile {
    gaussian_bump(4.0, 0.0, 1.0, -6.0 + 0.0025, 6.0 - 0.0025, 0.005, 0.1)
}

#[test]
fn coefficient_moments_over_1e5_draws() {
    let n = 100_000u64;
    let g: Vec<Complex64> = (0..n).map(|i| gaussian_coefficient(3, i, 5)).collect();
    let re: Vec<f64> = g.iter().map(|z| z.re).collect();
    let im: Vec<f64> = g.iter().map(|z| z.im).collect();
    let sq: Vec<f64> = g.iter().map(|z| z.norm_sqr()).collect();
    let bound = 4.0 / (n as f64).sqrt();
    assert!((pairwise_sum(&re) / n as f64).abs() <= bound);
    assert!((pairwise_sum(&im) / n as f64).abs() <= bound);
    assert!((pairwise_sum(&sq) / n as f64 - 2.0).abs() <= 0.05);
}

#[test]
fn fourth_moment_oracle_by_quadrature() {
    // E|g|^4 with independent N(0,1) parts, integrated on [-10, 10]^2
    let dens = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let inner = |x: f64| simpson(|y| (x * x + y * y).powi(2) * dens(y), -10.0, 10.0, 800) * dens(x);
    let m4 = simpson(inner, -10.0, 10.0, 800);
    assert!((m4 - 8.0).abs() < 1e-9);
    let r = &khinchine_check(&[Complex64::new(0.0, 1.0)], &[4.0], 100_000, 5).unwrap()[0];
    let exact = m4.powf(0.25) / 2.0;
    assert!((r.exact - exact).abs() < 1e-10);
    assert!((r.ratio - exact).abs() <= 3.0 * r.std_error, "{r:?}");
}

#[test]
fn second_moment_ratio_is_one() {
    let c = [Complex64::new(1.0, 0.0), Complex64::new(-0.4, 0.2), Complex64::new(0.0, 0.9), Complex64::new(0.3, 0.3)];
    let r = &khinchine_check(&c, &[2.0, 4.0, 8.0, 16.0], 100_000, 9).unwrap();
    assert!((r[0].ratio - 1.0).abs() <= 3.0 * r[0].std_error);
    assert!(r.iter().all(|x| x.ratio <= 2.0));
    assert!(khinchine_check(&[Complex64::new(0.0, 0.0)], &[2.0], 10, 0).is_err());
    assert!(khinchine_check(&c, &[1.5], 10, 0).is_err());
}

#[test]
fn unit_and_zero_coefficients() {
    let p = bump();
    let d = wiener_decompose(&p);
    let ones = GaussianDraw::constant(d.k_min, d.k_max, Complex64::new(1.0, 0.0)).unwrap();
    assert_eq!(randomize(&p, &ones).unwrap(), p);
    let zeros = GaussianDraw::constant(d.k_min, d.k_max, Complex64::new(0.0, 0.0)).unwrap();
    assert!(randomize(&p, &zeros).unwrap().is_zero());
    let short = GaussianDraw::constant(d.k_min + 1, d.k_max, Complex64::new(1.0, 0.0)).unwrap();
    assert!(matches!(randomize(&p, &short), Err(Error::KRangeMismatch { .. })));
}

#[test]
fn randomized_energy_mean() {
    let p = gaussian_bump(1.0, 0.5, 1.0, -4.0, 4.0, 0.02, 0.25);
    let d = wiener_decompose(&p);
    let n = 10_000u64;
    let e: Vec<f64> = (0..n)
        .map(|i| {
            let draw = sample_draw(d.k_min, d.k_max, 21, i).unwrap();
            randomize(&p, &draw).unwrap().l2_norm().powi(2)
        })
        .collect();
    let mean = pairwise_sum(&e) / n as f64;
    let var = e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    // oracle: 2 * sum_k int psi(xi - k)^2 |f^|^2, summed directly on the grid
    let mut oracle = 0.0;
    for (j, a) in p.amplitudes().iter().enumerate() {
        let xi = p.xi(j);
        let w2: f64 = (d.k_min..=d.k_max).map(|k| ostrovsky_core::projections::psi(xi - f64::from(k)).powi(2)).sum();
        oracle += 2.0 * p.weight(j) * w2 * a.norm_sqr() * p.xi_step();
    }
    assert!((mean - oracle).abs() <= 3.0 * (var / n as f64).sqrt(), "{mean} vs {oracle}");
}

#[test]
fn linear_route_matches_literal_propagation() {
    let p = gaussian_bump(2.0, 0.3, 0.8, -4.0, 4.0, 0.005, 0.25);
    let d = wiener_decompose(&p);
    let x = 0.7;
    let t = 0.05;
    let cfg = PropagatorConfig::plus(t);
    let (k0, c) = ostrovsky_core::random::deviation_coefficients(&p, x, cfg);
    let grid = SpaceGrid::single(x);
    for i in 0..5u64 {
        let draw = sample_draw(d.k_min, d.k_max, 4, i).unwrap();
        let f = randomize(&p, &draw).unwrap();
        let literal = propagate(&f, cfg, &grid).unwrap().values()[0] - synthesize_at(&f, x);
        let linear: Complex64 = c.iter().enumerate().map(|(j, ck)| draw.coefficient(k0 + j as i32).unwrap() * ck).sum();
        assert!((literal - linear).norm() < 1e-12, "{literal} {linear}");
    }
}

#[test]
fn continuity_curve_properties() {
    let p = bump();
    let times = [0.0, 1e-1, 1e-2, 1e-3, 1e-4];
    let curve = stochastic_continuity(&p, 0.0, 0.5, &times, 2000, 1, Sign::Plus).unwrap();
    assert_eq!(curve.empirical_probs[0], 0.0);
    assert!(curve.empirical_probs[4] <= 0.05);
    for j in 2..times.len() {
        assert!(curve.wilson_lo[j] <= curve.wilson_hi[j - 1]);
    }
    assert!(curve.wilson_halfwidth.iter().all(|h| *h > 0.0));
    let again = stochastic_continuity(&p, 0.0, 0.5, &times, 2000, 1, Sign::Plus).unwrap();
    assert_eq!(curve, again);
    let huge = stochastic_continuity(&p, 0.0, 1e6, &times, 500, 1, Sign::Plus).unwrap();
    assert!(huge.empirical_probs.iter().all(|p| *p == 0.0));
    assert!(stochastic_continuity(&p, 0.0, 0.5, &[10.0], 10, 1, Sign::Plus).is_err());
}

#[test]
fn overlay_bound_dominates_smaller_times() {
    let p = bump();
    let times = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let curve = stochastic_continuity(&p, 0.0, 0.5, &times, 2000, 2, Sign::Plus).unwrap();
    let c = curve.c_fit.unwrap();
    let (touch, _) = times
        .iter()
        .zip(&curve.empirical_probs)
        .enumerate()
        .filter(|(_, (_, p))| **p > 0.0)
        .map(|(j, (t, p))| (j, (tail_bound_curve(0.5, t.sqrt(), c, DEFAULT_C1) - p).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    for j in touch..times.len() {
        let b = tail_bound_curve(0.5, times[j].sqrt(), c, DEFAULT_C1);
        assert!(b >= curve.empirical_probs[j] * (1.0 - 1e-12));
    }
    assert_eq!(fit_tail_constant(0.5, &times, &[0.0; 5], DEFAULT_C1), None);
}

#[test]
fn bound_shape() {
    assert!(tail_bound_curve(1e6, 0.1, 1.0, DEFAULT_C1) == 0.0);
    let mut last = 0.0;
    for e in [0.02, 0.05, 0.1, 1.0] {
        let v = tail_bound_curve(0.5, e, 1.0, DEFAULT_C1);
        assert!(v > last);
        last = v;
    }
}

#[test]
fn gaussian_tail_shape_at_zero_and_positive_time() {
    let p = bump();
    for t in [0.0, 0.01] {
        let g = gaussian_tail(&p, 0.0, PropagatorConfig::plus(t), 20_000, 8, 20).unwrap();
        assert!(g.correlation <= -0.99, "t = {t}: {}", g.correlation);
        assert!(g.c1 > 0.0 && g.c2 > 0.0);
        for (a, pr) in g.alphas.iter().zip(&g.probs) {
            assert!(*pr <= g.c1 * (-g.c2 * a * a).exp() * (1.0 + 1e-12) || *pr < 10.0 / 20_000.0);
        }
    }
}
