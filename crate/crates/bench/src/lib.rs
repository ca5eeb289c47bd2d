//! Shared fixtures for the criterion benchmarks.

pub use spinmem_core as core;

use spinmem_core::{ChainSpec, EnsembleSpec, FieldProfile, PerturbationCase};

/// Edge-stored excitation in a parabolic field.
pub fn edge_chain(n: usize, h_m: f64) -> ChainSpec {
    ChainSpec::new(n, 1, FieldProfile::parabola(h_m)).expect("valid bench chain")
}

/// Coupling noise at ten percent, redrawn every 0.1.
pub fn noise_ensemble(realizations: usize) -> EnsembleSpec {
    EnsembleSpec::new(PerturbationCase::CouplingNoise { eta: 0.1, tau: 0.1 }, realizations, 1)
        .expect("valid bench ensemble")
}
