//! Conversion between the dimensionless chain (`J = 1`, `hbar = 1`) and an
//! optical-lattice realization.
//!
//! The tunneling energy uses the tight-binding fit
//! `J = 1.43 s^0.98 exp(-2.07 sqrt(s)) E_R` with `E_R = hbar^2 k_L^2 / (2m)`.
//! Dimensionless time `t` maps to `t hbar / J` seconds; for 87Rb in a 1064 nm
//! lattice at depth `s = 23` this gives `hbar/J ~ 0.05 s`, so revival times
//! of order one are tens of milliseconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass constant, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of 87Rb in atomic mass units.
pub const RB87_MASS_U: f64 = 86.909_180_527;

/// Depth range in which the tunneling fit is trusted.
pub const FIT_VALIDITY: (f64, f64) = (5.0, 60.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeContext {
    /// Lattice depth in recoil energies.
    pub s: f64,
    /// Laser wave vector, 1/m.
    pub k_l: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Lattice spacing, m.
    pub spacing: f64,
    pub hbar: f64,
}

impl LatticeContext {
    /// Context with spacing `pi / k_L` (retro-reflected lattice).
    pub fn new(s: f64, k_l: f64, mass: f64) -> Result<Self> {
        let ctx = LatticeContext {
            s,
            k_l,
            mass,
            spacing: std::f64::consts::PI / k_l,
            hbar: HBAR,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    /// From laser wavelength in metres and mass in kg.
    pub fn from_wavelength(s: f64, wavelength: f64, mass: f64) -> Result<Self> {
        if wavelength.is_nan() || wavelength <= 0.0 {
            return Err(Error::param("wavelength", "must be positive"));
        }
        Self::new(s, 2.0 * std::f64::consts::PI / wavelength, mass)
    }

    /// 87Rb in a 1064 nm lattice (532 nm spacing).
    pub fn rb87_1064nm(s: f64) -> Result<Self> {
        Self::from_wavelength(s, 1064e-9, RB87_MASS_U * ATOMIC_MASS_UNIT)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("s", self.s),
            ("k_L", self.k_l),
            ("mass", self.mass),
            ("spacing", self.spacing),
            ("hbar", self.hbar),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn recoil_energy(&self) -> f64 {
        self.hbar * self.hbar * self.k_l * self.k_l / (2.0 * self.mass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunnelingEnergy {
    pub joules: f64,
    /// `J / E_R`.
    pub recoil_fraction: f64,
    /// Whether `s` lies inside [`FIT_VALIDITY`].
    pub within_fit_range: bool,
}

pub fn tunneling_energy(ctx: &LatticeContext) -> Result<TunnelingEnergy> {
    ctx.validate()?;
    let s = ctx.s;
    let within = (FIT_VALIDITY.0..=FIT_VALIDITY.1).contains(&s);
    if !within {
        log::warn!(
            "lattice depth s = {s} is outside the tunneling fit range [{}, {}]",
            FIT_VALIDITY.0,
            FIT_VALIDITY.1
        );
    }
    let recoil_fraction = 1.43 * s.powf(0.98) * (-2.07 * s.sqrt()).exp();
    Ok(TunnelingEnergy {
        joules: recoil_fraction * ctx.recoil_energy(),
        recoil_fraction,
        within_fit_range: within,
    })
}

/// `hbar / J` in seconds.
pub fn time_unit(ctx: &LatticeContext) -> Result<f64> {
    Ok(ctx.hbar / tunneling_energy(ctx)?.joules)
}

pub fn time_to_seconds(t: f64, ctx: &LatticeContext) -> Result<f64> {
    Ok(t * time_unit(ctx)?)
}

pub fn seconds_to_time(seconds: f64, ctx: &LatticeContext) -> Result<f64> {
    Ok(seconds / time_unit(ctx)?)
}

/// Harmonic trap frequency (rad/s) equivalent to a parabola of amplitude `h_m`
/// across `n` sites: `omega = sqrt(8 J h_m / m) / (d (N - 1))`.
pub fn trap_frequency(ctx: &LatticeContext, h_m: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("N", format!("needs at least 2 sites, got {n}")));
    }
    if !(h_m > 0.0 && h_m.is_finite()) {
        return Err(Error::param("h_m", format!("must be positive, got {h_m}")));
    }
    let j = tunneling_energy(ctx)?.joules;
    Ok((8.0 * j * h_m / ctx.mass).sqrt() / (ctx.spacing * (n - 1) as f64))
}
