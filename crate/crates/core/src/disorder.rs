//! Seeded ensembles over fabrication defects and time-dependent coupling noise.
//!
//! The averaged fidelity is the square root of the target-site population of
//! the realization-averaged density matrix, i.e. `sqrt(mean |c_j|^2)`, not the
//! mean of `|c_j|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    build_hamiltonian, sample_perturbation, ChainSpec, FieldVector, RealizationStream,
};
use crate::propagator::{diagonalize, piecewise_site_amplitudes, AmplitudeVector, SiteAmplitude};

/// The five chain models: clean, and four defect or noise terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PerturbationCase {
    /// 0: unperturbed chain.
    Clean,
    /// 1: band broadening, `h(i) += epsilon rand(i)`.
    SiteDisorder { epsilon: f64 },
    /// 2: static random coupling, `J -> J + gamma rand(i)`.
    CouplingDisorder { gamma: f64 },
    /// 3: next-nearest coupling `mu J`.
    NextNearest { mu: f64 },
    /// 4: coupling `J + eta rand(i)` redrawn on every interval of length `tau`.
    CouplingNoise { eta: f64, tau: f64 },
}

/// Strength parameters for [`PerturbationCase::from_id`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strengths {
    pub epsilon: f64,
    pub gamma: f64,
    pub mu: f64,
    pub eta: f64,
    pub tau: f64,
}

impl Default for Strengths {
    /// Ten percent of `h_m = 60` and of `J = 1`; noise interval 0.1.
    fn default() -> Self {
        Strengths {
            epsilon: 6.0,
            gamma: 0.1,
            mu: 0.1,
            eta: 0.1,
            tau: 0.1,
        }
    }
}

impl PerturbationCase {
    pub fn from_id(id: u8, s: &Strengths) -> Result<Self> {
        let case = match id {
            0 => PerturbationCase::Clean,
            1 => PerturbationCase::SiteDisorder { epsilon: s.epsilon },
            2 => PerturbationCase::CouplingDisorder { gamma: s.gamma },
            3 => PerturbationCase::NextNearest { mu: s.mu },
            4 => PerturbationCase::CouplingNoise {
                eta: s.eta,
                tau: s.tau,
            },
            other => return Err(Error::UnknownCase(other)),
        };
        case.validate()?;
        Ok(case)
    }

    pub fn id(&self) -> u8 {
        match self {
            PerturbationCase::Clean => 0,
            PerturbationCase::SiteDisorder { .. } => 1,
            PerturbationCase::CouplingDisorder { .. } => 2,
            PerturbationCase::NextNearest { .. } => 3,
            PerturbationCase::CouplingNoise { .. } => 4,
        }
    }

    /// Cases whose Hamiltonian does not depend on the random stream.
    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            PerturbationCase::Clean | PerturbationCase::NextNearest { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and nonnegative, got {v}")))
            }
        };
        match *self {
            PerturbationCase::Clean => Ok(()),
            PerturbationCase::SiteDisorder { epsilon } => nonneg("epsilon", epsilon),
            PerturbationCase::CouplingDisorder { gamma } => nonneg("gamma", gamma),
            PerturbationCase::NextNearest { mu } => nonneg("mu", mu),
            PerturbationCase::CouplingNoise { eta, tau } => {
                nonneg("eta", eta)?;
                if tau > 0.0 && tau.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("tau", format!("must be positive, got {tau}")))
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub realizations: usize,
    pub base_seed: u64,
    pub case: PerturbationCase,
}

impl EnsembleSpec {
    pub const DEFAULT_REALIZATIONS: usize = 200;

    pub fn new(case: PerturbationCase, realizations: usize, base_seed: u64) -> Result<Self> {
        let spec = EnsembleSpec {
            realizations,
            base_seed,
            case,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::param("realizations", "must be at least 1"));
        }
        self.case.validate()
    }
}

/// Per-time ensemble statistics of the target-site population.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStatistics {
    pub mean_population: Vec<f64>,
    /// Standard error of the mean population; zero for a single realization.
    pub std_error: Vec<f64>,
    pub realizations: usize,
}

impl EnsembleStatistics {
    pub fn fidelity(&self) -> Vec<f64> {
        self.mean_population.iter().map(|p| p.max(0.0).sqrt()).collect()
    }
}

// Realizations per parallel batch. Sums are accumulated batch by batch in
// realization order, so results do not depend on the thread count.
const BATCH: usize = 8;

/// Target-site populations `|c_j(t)|^2` of one realization.
pub fn realization_populations(
    chain: &ChainSpec,
    field: &FieldVector,
    ensemble: &EnsembleSpec,
    realization: usize,
    times: &[f64],
) -> Result<Vec<f64>> {
    let stream = RealizationStream::new(ensemble.base_seed, realization as u64);
    let psi0 = AmplitudeVector::localized(chain.n, chain.target)?;
    let amplitudes = match ensemble.case {
        PerturbationCase::CouplingNoise { tau, .. } => {
            let generator = |k: u64| {
                let sample = sample_perturbation(&ensemble.case, chain, &stream, k)?;
                build_hamiltonian(chain, field, &sample)
            };
            piecewise_site_amplitudes(generator, &psi0, times, tau, chain.target)?
        }
        _ => {
            let sample = sample_perturbation(&ensemble.case, chain, &stream, 0)?;
            let h = build_hamiltonian(chain, field, &sample)?;
            let spectrum = diagonalize(&h)?;
            SiteAmplitude::new(&spectrum, &psi0, chain.target)?.along(times)
        }
    };
    Ok(amplitudes.iter().map(|c| c.norm_sqr()).collect())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidTimeGrid("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid("times must be strictly ascending".into()));
    }
    Ok(())
}

/// Mean and standard error of the target-site population over the ensemble.
pub fn ensemble_statistics(
    chain: &ChainSpec,
    ensemble: &EnsembleSpec,
    times: &[f64],
) -> Result<EnsembleStatistics> {
    chain.validate()?;
    ensemble.validate()?;
    check_times(times)?;
    let field = chain.field()?;

    if ensemble.case.is_deterministic() {
        let pop = realization_populations(chain, &field, ensemble, 0, times)
            .map_err(|e| wrap(0, e))?;
        return Ok(EnsembleStatistics {
            std_error: vec![0.0; pop.len()],
            mean_population: pop,
            realizations: ensemble.realizations,
        });
    }

    let n = ensemble.realizations;
    let mut sum = vec![0.0; times.len()];
    let mut sum_sq = vec![0.0; times.len()];
    for start in (0..n).step_by(BATCH) {
        let batch: Vec<Vec<f64>> = (start..(start + BATCH).min(n))
            .into_par_iter()
            .map(|r| realization_populations(chain, &field, ensemble, r, times).map_err(|e| wrap(r, e)))
            .collect::<Result<_>>()?;
        for pop in &batch {
            for ((s, q), p) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(pop) {
                *s += p;
                *q += p * p;
            }
        }
    }

    let nf = n as f64;
    let mean_population: Vec<f64> = sum.iter().map(|s| s / nf).collect();
    let std_error = if n > 1 {
        mean_population
            .iter()
            .zip(&sum_sq)
            .map(|(m, q)| {
                let var = ((q - nf * m * m) / (nf - 1.0)).max(0.0);
                (var / nf).sqrt()
            })
            .collect()
    } else {
        vec![0.0; times.len()]
    };
    Ok(EnsembleStatistics {
        mean_population,
        std_error,
        realizations: n,
    })
}

/// `F(t) = sqrt(mean_r |c_j^{(r)}(t)|^2)` at each requested time.
pub fn ensemble_average_fidelity(
    chain: &ChainSpec,
    ensemble: &EnsembleSpec,
    times: &[f64],
) -> Result<Vec<f64>> {
    Ok(ensemble_statistics(chain, ensemble, times)?.fidelity())
}

fn wrap(index: usize, e: Error) -> Error {
    Error::Realization {
        index,
        source: Box::new(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FieldProfile;

    fn chain() -> ChainSpec {
        ChainSpec::new(12, 1, FieldProfile::parabola(8.0)).unwrap()
    }

    fn times() -> Vec<f64> {
        (0..200).map(|k| 0.05 * k as f64).collect()
    }

    #[test]
    fn from_id_roundtrip() {
        let s = Strengths::default();
        for id in 0..=4 {
            assert_eq!(PerturbationCase::from_id(id, &s).unwrap().id(), id);
        }
        assert!(matches!(
            PerturbationCase::from_id(5, &s),
            Err(Error::UnknownCase(5))
        ));
        let bad = Strengths { eta: -1.0, ..s };
        assert!(PerturbationCase::from_id(4, &bad).is_err());
    }

    #[test]
    fn zero_realizations_rejected() {
        assert!(EnsembleSpec::new(PerturbationCase::Clean, 0, 1).is_err());
    }

    #[test]
    fn clean_single_realization() {
        let c = chain();
        let e = EnsembleSpec::new(PerturbationCase::Clean, 1, 3).unwrap();
        let f = ensemble_average_fidelity(&c, &e, &times()).unwrap();
        let spectrum = diagonalize(&c.hamiltonian().unwrap()).unwrap();
        let psi = AmplitudeVector::localized(c.n, 1).unwrap();
        let direct = SiteAmplitude::new(&spectrum, &psi, 1).unwrap().along(&times());
        for (a, b) in f.iter().zip(&direct) {
            assert!((a - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn averaging_order_is_population_first() {
        let c = chain();
        let e = EnsembleSpec::new(PerturbationCase::CouplingDisorder { gamma: 0.5 }, 5, 9).unwrap();
        let field = c.field().unwrap();
        let t = times();
        let pops: Vec<Vec<f64>> = (0..5)
            .map(|r| realization_populations(&c, &field, &e, r, &t).unwrap())
            .collect();
        let f = ensemble_average_fidelity(&c, &e, &t).unwrap();
        for (i, fi) in f.iter().enumerate() {
            let mean: f64 = pops.iter().map(|p| p[i]).sum::<f64>() / 5.0;
            assert!((fi - mean.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_unsorted_times() {
        let c = chain();
        let e = EnsembleSpec::new(PerturbationCase::SiteDisorder { epsilon: 1.0 }, 3, 0).unwrap();
        let err = ensemble_average_fidelity(&c, &e, &[0.0, 1.0, 0.5]).unwrap_err();
        assert!(matches!(err, Error::InvalidTimeGrid(_)));
    }
}
