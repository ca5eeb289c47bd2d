//! Dynamical quantum memory in a single-excitation XY chain.
//!
//! A chain of `N` two-level sites with nearest-neighbour XY coupling and an
//! on-site field `h(i)` keeps a single excitation in the one-magnon sector,
//! so the dynamics reduce to an `N x N` real symmetric banded matrix. With a
//! strong confining field an excitation stored near one end returns to its
//! site at discrete revival times (a breathing pattern).
//!
//! - [`lattice`]: field profiles, chain geometry, the one-magnon matrix and
//!   perturbation draws.
//! - [`propagator`]: eigensolver, exact and piecewise-constant evolution,
//!   fidelity and phase.
//! - [`disorder`]: seeded defect and noise ensembles.
//! - [`analysis`]: traces, windowed maxima, revivals, sweeps, predictors.
//! - [`units`]: optical-lattice unit conversion.

pub mod analysis;
pub mod chebyshev;
pub mod disorder;
mod eigen;
pub mod error;
pub mod lattice;
pub mod propagator;
pub mod units;

pub use analysis::{
    default_time_step, detect_drop, fidelity_at, fidelity_trace, fidelity_trace_with_phase,
    local_maxima, max_in_window, revival_times, semiclassical_drop_site, semiclassical_regime,
    sweep, uniform_grid, AxisKind, FidelityCurve, SweepAxis, SweepPoint, SweepTable,
    DROP_FRACTION,
};
pub use disorder::{
    ensemble_average_fidelity, ensemble_statistics, EnsembleSpec, EnsembleStatistics,
    PerturbationCase, Strengths,
};
pub use error::{Error, Result};
pub use lattice::{
    build_field, build_hamiltonian, sample_perturbation, vacuum_energy, BandedHamiltonian,
    ChainSpec, Convention, FieldKind, FieldProfile, FieldVector, PerturbationSample,
    RealizationStream,
};
pub use propagator::{
    diagonalize, evolve_piecewise, evolve_static, piecewise_site_amplitudes, relative_phase,
    site_fidelity, superposition_fidelity, AmplitudeVector, SiteAmplitude, Spectrum,
};
pub use units::{
    seconds_to_time, time_to_seconds, trap_frequency, tunneling_energy, LatticeContext,
    TunnelingEnergy,
};

pub use num_complex::Complex64;
