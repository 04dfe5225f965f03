//! Numerical laboratory for the free Ostrovsky equation
//! `u_t + u_xxx +- d_x^{-1} u = 0`.
//!
//! * [`spectral`]: sampled Fourier data, the propagator, norms.
//! * [`projections`]: dyadic Littlewood-Paley cutoffs and unit-scale Wiener windows.
//! * [`rough`]: counterexample family, maximal-function scans, scaling fits.
//! * [`random`]: Gaussian randomization, moment and tail experiments.
//! * [`lemmas`]: corpus-driven checks of the deterministic estimates.
//! * [`io`]: CSV readers and writers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod lemmas;
pub mod projections;
pub mod random;
pub mod rough;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectral::{
    evolve_spectral, hs_norm, lp_norm_space, phase, propagate, synthesize, validate_resolution,
    PropagatorConfig, ResolutionReport, Sign, SpaceField, SpaceGrid, SpectralProfile,
};
