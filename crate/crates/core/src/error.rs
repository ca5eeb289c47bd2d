use thiserror::Error;

use crate::lattice::BandedHamiltonian;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid field profile: {0}")]
    InvalidField(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("unknown perturbation case id {0} (expected 0..=4)")]
    UnknownCase(u8),

    #[error("eigensolver did not converge within {cap} iterations (dimension {})", matrix.dim())]
    NoConvergence {
        cap: usize,
        matrix: Box<BandedHamiltonian>,
    },

    #[error("phase undefined at site {site}: |amplitude| = {magnitude:e}")]
    UndefinedPhase { site: usize, magnitude: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("window [{0}, {1}] does not overlap the sampled times")]
    EmptyWindow(f64, f64),

    #[error("h_m = {0} is outside the semiclassical edge regime (h_m > 4)")]
    OutsideRegime(f64),

    #[error("realization {index} failed: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::NoConvergence { .. }
                | Error::UndefinedPhase { .. }
                | Error::Realization { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
