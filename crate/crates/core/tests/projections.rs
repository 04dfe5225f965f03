mod common;

use common::{band, gaussian_bump};
use ostrovsky_core::io::{read_profile, write_decomposition};
use ostrovsky_core::lemmas::default_corpus;
use ostrovsky_core::projections::{
    band_multiplier, high_multiplier, low_multiplier, phi, project_band, project_high, project_low, psi,
    square_function, wiener_decompose, wiener_project,
};
use ostrovsky_core::spectral::{evolve_spectral, synthesize, PropagatorConfig, SpaceGrid};
use ostrovsky_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn partition_of_unity_at_a_million_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..1_000_000 {
        let xi: f64 = rng.random_range(-100.0..100.0);
        let lo = xi.floor() as i64 - 1;
        let hi = xi.ceil() as i64 + 1;
        let s: f64 = (lo..=hi).map(|k| psi(xi - k as f64)).sum();
        worst = worst.max((s - 1.0).abs());
    }
    assert!(worst <= 1e-15, "{worst}");
}

#[test]
fn cutoff_is_c2_at_the_joins() {
    let h = 1e-5;
    for r in [1.0, 2.0] {
        let d1 = (phi(r + h) - phi(r - h)) / (2.0 * h);
        let d2 = (phi(r + h) - 2.0 * phi(r) + phi(r - h)) / (h * h);
        assert!(d1.abs() < 1e-8 && d2.abs() < 1e-3, "r = {r}: {d1} {d2}");
    }
    assert_eq!(phi(-1.7), phi(1.7));
}

#[test]
fn projections_on_separated_supports() {
    let inner = band(0.2, 2.0, 0.01);
    assert_eq!(project_low(&inner, 2.0).unwrap(), inner);
    assert!(project_high(&inner, 2.0).unwrap().is_zero());
    let outer = band(4.0, 7.0, 0.01);
    assert!(project_low(&outer, 2.0).unwrap().is_zero());
    assert_eq!(project_high(&outer, 2.0).unwrap(), outer);
    let b = project_band(&band(0.01, 0.99, 0.01), 2.0).unwrap();
    assert!(b.is_zero());
}

#[test]
fn wiener_pieces_two_apart_are_disjoint() {
    let p = gaussian_bump(1.0, 1.0, 2.0, -6.0, 6.0, 0.01, 0.0);
    for k in -5..5 {
        let a = wiener_project(&p, k);
        let b = wiener_project(&p, k + 2);
        assert!(a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x * y).norm() == 0.0));
    }
}

#[test]
fn wiener_window_is_one_at_its_centre() {
    let p = band(-3.0, 3.0, 0.25);
    let j = p.frequencies().position(|xi| xi == 2.0).unwrap();
    assert_eq!(wiener_project(&p, 2).amplitudes()[j], p.amplitudes()[j]);
}

#[test]
fn corpus_decomposition_identities() {
    for e in default_corpus() {
        let p = &e.profile;
        let d = wiener_decompose(p);
        assert_eq!(&d.reconstruct().unwrap(), p, "{}", e.id);
        let pieces = d.energy();
        let total = p.l2_norm().powi(2);
        assert!(pieces <= total * (1.0 + 1e-12));
        assert!(total <= 3.0 * pieces * (1.0 + 1e-12));
        assert!(d.piece(d.k_min).unwrap().is_zero() && d.piece(d.k_max).unwrap().is_zero());
    }
}

#[test]
fn square_function_of_a_single_window() {
    // one sample at an integer frequency belongs to a single window
    let mut amps = vec![Complex64::new(0.0, 0.0); 9];
    amps[4] = Complex64::new(1.0, -2.0);
    let p = ostrovsky_core::SpectralProfile::new(2.0, 0.25, amps).unwrap();
    assert_eq!(p.xi(4), 3.0);
    let grid = SpaceGrid::symmetric(5.0, 33).unwrap();
    let s = square_function(&p, &grid);
    let u = synthesize(&p, &grid);
    for (a, b) in s.values().iter().zip(u.values()) {
        assert!((a.re - b.norm()).abs() < 1e-15);
    }
}

#[test]
fn square_function_is_bounded_by_the_l2_norm() {
    let p = gaussian_bump(1.5, 0.5, 1.5, -5.0, 5.0, 0.002, 0.25);
    let grid = SpaceGrid::symmetric(40.0, 801).unwrap();
    let bound = p.l2_norm();
    for t in [0.0, 0.1, 1.0] {
        let s = square_function(&evolve_spectral(&p, PropagatorConfig::plus(t)), &grid);
        assert!(s.max_modulus() <= bound * (1.0 + 1e-6), "t = {t}");
    }
}

#[test]
fn decomposition_export_names_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = band(2.0, 4.0, 0.05);
    let d = wiener_decompose(&p);
    let paths = write_decomposition(&d, &dir.path().join("run.csv")).unwrap();
    assert_eq!(paths.len(), 5);
    assert!(paths[0].ends_with("run_k1.csv"));
    assert!(paths[4].ends_with("run_k5.csv"));
    let back = read_profile(&paths[2]).unwrap();
    assert_eq!(back.amplitudes(), d.piece(3).unwrap().amplitudes());
}

proptest! {
    #[test]
    fn multipliers_lie_in_unit_interval(xi in -100.0f64..100.0, e in -10i32..10) {
        let n = 2f64.powi(e);
        for m in [low_multiplier(xi, n), band_multiplier(xi, n), high_multiplier(xi, n), psi(xi)] {
            prop_assert!((0.0..=1.0).contains(&m));
        }
    }

    #[test]
    fn telescoping_is_exact(lo in -8.0f64..0.0, len in 10usize..200, e in -3i32..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..len).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let p = ostrovsky_core::SpectralProfile::new(lo, 0.07, amps).unwrap();
        let n = 2f64.powi(e);
        let low = project_low(&p, n).unwrap();
        let half = project_low(&p, n / 2.0).unwrap();
        let bandp = project_band(&p, n).unwrap();
        prop_assert_eq!(half.try_add(&bandp).unwrap(), low.clone());
        prop_assert_eq!(low.try_add(&project_high(&p, n).unwrap()).unwrap(), p.clone());
        prop_assert_eq!(wiener_decompose(&p).reconstruct().unwrap(), p);
    }
}
