//! Fixtures shared by the benches.

use ostrovsky_core::lemmas::default_corpus;
use ostrovsky_core::rough::{counterexample_profile, CounterexampleSpec};
use ostrovsky_core::{SpaceGrid, SpectralProfile};

pub fn corpus_profile(id: &str) -> SpectralProfile {
    default_corpus()
        .into_iter()
        .find(|e| e.id == id)
        .unwrap_or_else(|| panic!("no corpus profile `{id}`"))
        .profile
}

/// Indicator on `[2^k, 2^(k+1)]` at the default 512 cells per `2^k`.
pub fn band(k: u32) -> (CounterexampleSpec, SpectralProfile) {
    let spec = CounterexampleSpec::new(k, 0.0).expect("valid k");
    let p = counterexample_profile(&spec, spec.band_start() / 512.0).expect("band profile");
    (spec, p)
}

pub fn grid(half_width: f64, n: usize) -> SpaceGrid {
    SpaceGrid::symmetric(half_width, n).expect("valid grid")
}
