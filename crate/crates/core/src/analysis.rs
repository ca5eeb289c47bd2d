//! Fidelity traces, windowed maxima, revival detection, parameter sweeps and
//! the semiclassical predictors for the edge-storage regime.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{ensemble_average_fidelity, EnsembleSpec};
use crate::error::{Error, Result};
use crate::lattice::{vacuum_energy, ChainSpec};
use crate::propagator::{diagonalize, phase_against_vacuum, AmplitudeVector, SiteAmplitude};

/// Default sample spacing: at least ten samples per period of the fastest
/// breathing oscillation.
pub fn default_time_step(h_m: f64) -> f64 {
    0.05f64.min(std::f64::consts::PI / (20.0 * h_m.max(1.0)))
}

/// Multiples of `dt` inside `[t1, t2]`.
pub fn uniform_grid(t1: f64, t2: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(t1.is_finite() && t2.is_finite()) || t1 < 0.0 || t2 < t1 {
        return Err(Error::InvalidTimeGrid(format!("bad interval [{t1}, {t2}]")));
    }
    let first = (t1 / dt - 1e-9).ceil().max(0.0) as u64;
    let last = (t2 / dt + 1e-9).floor() as u64;
    Ok((first..=last).map(|k| k as f64 * dt).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Phase against the vacuum at each sample; `None` where the amplitude vanishes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<Option<f64>>>,
    pub chain: ChainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
}

impl FidelityCurve {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Samples inside the closed window `[t1, t2]`.
    pub fn restrict(&self, t1: f64, t2: f64) -> FidelityCurve {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.times[i] >= t1 && self.times[i] <= t2)
            .collect();
        FidelityCurve {
            times: keep.iter().map(|&i| self.times[i]).collect(),
            values: keep.iter().map(|&i| self.values[i]).collect(),
            phases: self
                .phases
                .as_ref()
                .map(|p| keep.iter().map(|&i| p[i]).collect()),
            chain: self.chain.clone(),
            ensemble: self.ensemble,
        }
    }
}

/// Fidelity at the given times, averaged over `ensemble` when one is supplied.
pub fn fidelity_at(
    chain: &ChainSpec,
    ensemble: Option<&EnsembleSpec>,
    times: &[f64],
) -> Result<Vec<f64>> {
    match ensemble {
        Some(e) => ensemble_average_fidelity(chain, e, times),
        None => {
            let spectrum = diagonalize(&chain.hamiltonian()?)?;
            let psi0 = AmplitudeVector::localized(chain.n, chain.target)?;
            let site = SiteAmplitude::new(&spectrum, &psi0, chain.target)?;
            Ok(site.along(times).iter().map(|c| c.norm()).collect())
        }
    }
}

fn resolve_step(chain: &ChainSpec, dt: Option<f64>) -> f64 {
    dt.unwrap_or_else(|| default_time_step(chain.profile.peak_hint()))
}

/// `F(t)` on `[0, t_max]`, sampled every `dt` (default [`default_time_step`]).
pub fn fidelity_trace(
    chain: &ChainSpec,
    ensemble: Option<&EnsembleSpec>,
    t_max: f64,
    dt: Option<f64>,
) -> Result<FidelityCurve> {
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::param("t_max", format!("must be positive, got {t_max}")));
    }
    chain.validate()?;
    let times = uniform_grid(0.0, t_max, resolve_step(chain, dt))?;
    let values = fidelity_at(chain, ensemble, &times)?;
    Ok(FidelityCurve {
        times,
        values,
        phases: None,
        chain: chain.clone(),
        ensemble: ensemble.copied(),
    })
}

/// Unperturbed trace that also records the phase against the vacuum.
pub fn fidelity_trace_with_phase(
    chain: &ChainSpec,
    t_max: f64,
    dt: Option<f64>,
) -> Result<FidelityCurve> {
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::param("t_max", format!("must be positive, got {t_max}")));
    }
    let field = chain.field()?;
    let e_vac = vacuum_energy(&field);
    let times = uniform_grid(0.0, t_max, resolve_step(chain, dt))?;
    let spectrum = diagonalize(&chain.hamiltonian()?)?;
    let psi0 = AmplitudeVector::localized(chain.n, chain.target)?;
    let amps = SiteAmplitude::new(&spectrum, &psi0, chain.target)?.along(&times);
    let phases = amps
        .iter()
        .zip(&times)
        .map(|(c, &t)| phase_against_vacuum(*c, t, e_vac))
        .collect();
    Ok(FidelityCurve {
        values: amps.iter().map(|c| c.norm()).collect(),
        times,
        phases: Some(phases),
        chain: chain.clone(),
        ensemble: None,
    })
}

/// Largest sample in the closed window and the earliest time it is attained.
pub fn max_in_window(curve: &FidelityCurve, window: (f64, f64)) -> Result<(f64, f64)> {
    let (t1, t2) = window;
    let mut best: Option<(f64, f64)> = None;
    for (&t, &v) in curve.times.iter().zip(&curve.values) {
        if t < t1 || t > t2 {
            continue;
        }
        match best {
            Some((bv, _)) if v <= bv => {}
            _ => best = Some((v, t)),
        }
    }
    best.ok_or(Error::EmptyWindow(t1, t2))
}

/// Local maxima of a sampled curve as `(time, value)`.
///
/// A single sample must exceed both neighbours. A run of at least two equal
/// samples counts when each side is lower or is the end of the data; it is
/// reported at the midpoint of the run.
pub fn local_maxima(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len().min(times.len());
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let v = values[i];
        let left_lower = i > 0 && values[i - 1] < v;
        let right_lower = j + 1 < n && values[j + 1] < v;
        let peak = if j > i {
            (i == 0 || left_lower) && (j + 1 == n || right_lower)
        } else {
            left_lower && right_lower
        };
        if peak {
            out.push((0.5 * (times[i] + times[j]), v));
        }
        i = j + 1;
    }
    out
}

/// Times of local maxima whose value reaches `threshold`.
pub fn revival_times(curve: &FidelityCurve, threshold: f64) -> Result<Vec<f64>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::param("threshold", format!("must lie in (0, 1), got {threshold}")));
    }
    Ok(local_maxima(&curve.times, &curve.values)
        .into_iter()
        .filter(|&(_, v)| v >= threshold)
        .map(|(t, _)| t)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisKind {
    ChainLength,
    StorageSite,
    FieldAmplitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SweepAxis {
    ChainLength(Vec<usize>),
    StorageSite(Vec<usize>),
    FieldAmplitude(Vec<f64>),
}

impl SweepAxis {
    pub fn kind(&self) -> AxisKind {
        match self {
            SweepAxis::ChainLength(_) => AxisKind::ChainLength,
            SweepAxis::StorageSite(_) => AxisKind::StorageSite,
            SweepAxis::FieldAmplitude(_) => AxisKind::FieldAmplitude,
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            SweepAxis::ChainLength(v) | SweepAxis::StorageSite(v) => {
                v.iter().map(|&x| x as f64).collect()
            }
            SweepAxis::FieldAmplitude(v) => v.clone(),
        }
    }

    fn chain_at(&self, base: &ChainSpec, idx: usize) -> Result<ChainSpec> {
        let mut chain = base.clone();
        match self {
            SweepAxis::ChainLength(v) => {
                chain.n = v[idx];
                // keep the storage site at the same distance from the nearer end
                chain.target = chain.target.min(chain.n);
            }
            SweepAxis::StorageSite(v) => chain.target = v[idx],
            SweepAxis::FieldAmplitude(v) => chain.profile = chain.profile.with_amplitude(v[idx]),
        }
        chain.validate()?;
        Ok(chain)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub f_max: f64,
    pub t_at_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis: AxisKind,
    pub points: Vec<SweepPoint>,
}

/// Windowed maximum fidelity for each value along `axis`.
///
/// Points are independent and run in parallel; rows keep the input order.
/// An empty axis gives an empty table.
pub fn sweep(
    base: &ChainSpec,
    axis: &SweepAxis,
    ensemble: Option<&EnsembleSpec>,
    window: (f64, f64),
    dt: Option<f64>,
) -> Result<SweepTable> {
    let values = axis.values();
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("axis", "values must be strictly ascending"));
    }
    let chains: Vec<ChainSpec> = (0..values.len())
        .map(|i| axis.chain_at(base, i))
        .collect::<Result<_>>()?;
    let points = chains
        .par_iter()
        .zip(values.par_iter())
        .map(|(chain, &value)| {
            let times = uniform_grid(window.0, window.1, resolve_step(chain, dt))?;
            let curve = FidelityCurve {
                values: fidelity_at(chain, ensemble, &times)?,
                times,
                phases: None,
                chain: chain.clone(),
                ensemble: ensemble.copied(),
            };
            let (f_max, t_at_max) = max_in_window(&curve, window)?;
            Ok(SweepPoint {
                value,
                f_max,
                t_at_max,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axis: axis.kind(),
        points,
    })
}

/// First axis value whose `F_max` falls below `fraction` of the first row's.
pub fn detect_drop(table: &SweepTable, fraction: f64) -> Option<f64> {
    let reference = table.points.first()?.f_max;
    table
        .points
        .iter()
        .find(|p| p.f_max < fraction * reference)
        .map(|p| p.value)
}

/// Fraction of the edge-site `F_max` that marks the dropping site.
pub const DROP_FRACTION: f64 = 0.8;

/// Edge storage enters the Bloch-like regime for `h_m > 4`.
pub fn semiclassical_regime(h_m: f64) -> bool {
    h_m > 4.0
}

/// Largest site `i0` with `sqrt(h_m/4) (N + 1 - 2 i0) > N - 1`.
pub fn semiclassical_drop_site(h_m: f64, n: usize) -> Result<usize> {
    if !semiclassical_regime(h_m) || !h_m.is_finite() {
        return Err(Error::OutsideRegime(h_m));
    }
    if n < 2 {
        return Err(Error::param("N", format!("needs at least 2 sites, got {n}")));
    }
    let nf = n as f64;
    let ratio = (h_m / 4.0).sqrt();
    let bound = 0.5 * (nf + 1.0 - (nf - 1.0) / ratio);
    let mut i0 = bound.floor() as usize;
    // strict inequality: step back while it fails
    while i0 > 0 && ratio * (nf + 1.0 - 2.0 * i0 as f64) <= nf - 1.0 {
        i0 -= 1;
    }
    Ok(i0)
}
