//! Resolved run configuration: defaults, then the config file, then flags.
//!
//! Every output carries the resolved [`RunConfig`], and feeding that back via
//! `--config` reproduces the output byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};
use spinmem_core::{
    units::RB87_MASS_U, ChainSpec, Convention, EnsembleSpec, FieldKind, FieldProfile,
    PerturbationCase, Strengths, SweepAxis,
};

use crate::error::CliError;

/// Marker on `.dat` comment lines that carry the configuration.
pub const DAT_CONFIG_PREFIX: &str = "#= ";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub chain: ChainConfig,
    pub perturbation: PerturbationConfig,
    pub trace: TraceConfig,
    pub ensemble: CurveConfig,
    pub peaks: PeaksConfig,
    pub sweep: SweepConfig,
    pub units: UnitsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            chain: ChainConfig::default(),
            perturbation: PerturbationConfig::default(),
            trace: TraceConfig::default(),
            ensemble: CurveConfig::default(),
            peaks: PeaksConfig::default(),
            sweep: SweepConfig::default(),
            units: UnitsConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub n: usize,
    /// Storage site, 1-indexed.
    pub target: usize,
    pub field: FieldKind,
    pub h_m: f64,
    /// Site fields for `field = "custom"`, one per site.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub coupling: f64,
    pub convention: Convention,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            n: 100,
            target: 1,
            field: FieldKind::Parabola,
            h_m: 10.0,
            values: None,
            coupling: 1.0,
            convention: Convention::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationConfig {
    /// 0 clean, 1 site disorder, 2 coupling disorder, 3 next-nearest, 4 coupling noise.
    pub case: u8,
    pub epsilon: f64,
    pub gamma: f64,
    pub mu: f64,
    pub eta: f64,
    pub tau: f64,
    pub realizations: usize,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        let s = Strengths::default();
        PerturbationConfig {
            case: 0,
            epsilon: s.epsilon,
            gamma: s.gamma,
            mu: s.mu,
            eta: s.eta,
            tau: s.tau,
            realizations: EnsembleSpec::DEFAULT_REALIZATIONS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub t_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Add the phase against the vacuum; clean chains only.
    pub phase: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            t_max: 200.0,
            dt: None,
            phase: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveConfig {
    pub t_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            t_max: 200.0,
            dt: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeaksConfig {
    pub t_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Peaks at or above this value are listed as revivals.
    pub threshold: f64,
}

impl Default for PeaksConfig {
    fn default() -> Self {
        PeaksConfig {
            t_max: 200.0,
            dt: None,
            threshold: 0.9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AxisName {
    ChainLength,
    StorageSite,
    FieldAmplitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: AxisName,
    /// Strictly ascending; integral for the chain-length and storage-site axes.
    pub values: Vec<f64>,
    pub window: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Fraction of the first row's `F_max` that marks the drop.
    pub drop_fraction: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            axis: AxisName::StorageSite,
            values: (1..=50).map(f64::from).collect(),
            window: [100.0, 1000.0],
            dt: None,
            drop_fraction: spinmem_core::DROP_FRACTION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitsConfig {
    /// Lattice depth in recoil energies.
    pub s: f64,
    pub wavelength_nm: f64,
    /// Atomic mass in atomic mass units.
    pub mass_u: f64,
    /// Dimensionless times to convert to seconds.
    pub times: Vec<f64>,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        UnitsConfig {
            s: 23.0,
            wavelength_nm: 1064.0,
            mass_u: RB87_MASS_U,
            times: vec![1.0],
        }
    }
}

impl RunConfig {
    /// Reads a TOML config, or the embedded config of a `.json` or `.dat` output.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
        match ext {
            "json" => {
                #[derive(Deserialize)]
                struct Embedded {
                    config: RunConfig,
                }
                serde_json::from_str::<Embedded>(&text)
                    .map(|e| e.config)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
            }
            "dat" => {
                let toml_text: String = text
                    .lines()
                    .filter_map(|l| l.strip_prefix(DAT_CONFIG_PREFIX))
                    .map(|l| format!("{l}\n"))
                    .collect();
                Self::from_toml(&toml_text)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
            }
            _ => Self::from_toml(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display()))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.seed > i64::MAX as u64 {
            return Err(CliError::Validation(format!(
                "seed {} exceeds {} and cannot be stored in the config",
                self.seed,
                i64::MAX
            )));
        }
        self.chain_spec()?;
        Ok(())
    }

    pub fn chain_spec(&self) -> Result<ChainSpec, CliError> {
        let c = &self.chain;
        let profile = match c.field {
            FieldKind::Custom => {
                let values = c.values.clone().ok_or_else(|| {
                    CliError::Validation("chain.values is required for a custom field".into())
                })?;
                FieldProfile::custom(values)
            }
            kind => {
                if c.values.is_some() {
                    return Err(CliError::Validation(
                        "chain.values is only allowed with field = \"custom\"".into(),
                    ));
                }
                FieldProfile::new(kind, if kind == FieldKind::Zero { 0.0 } else { c.h_m })
            }
        };
        let spec = ChainSpec {
            n: c.n,
            coupling: c.coupling,
            target: c.target,
            profile,
            convention: c.convention,
        };
        spec.validate()?;
        spec.field()?;
        Ok(spec)
    }

    /// `None` for the clean chain.
    pub fn ensemble_spec(&self) -> Result<Option<EnsembleSpec>, CliError> {
        let p = &self.perturbation;
        let strengths = Strengths {
            epsilon: p.epsilon,
            gamma: p.gamma,
            mu: p.mu,
            eta: p.eta,
            tau: p.tau,
        };
        let case = PerturbationCase::from_id(p.case, &strengths)?;
        let spec = EnsembleSpec::new(case, p.realizations, self.seed)?;
        Ok((case != PerturbationCase::Clean).then_some(spec))
    }

    pub fn sweep_axis(&self) -> Result<SweepAxis, CliError> {
        let values = &self.sweep.values;
        let integral = || -> Result<Vec<usize>, CliError> {
            values
                .iter()
                .map(|&v| {
                    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                        Ok(v as usize)
                    } else {
                        Err(CliError::Validation(format!(
                            "sweep value {v} is not a positive integer"
                        )))
                    }
                })
                .collect()
        };
        Ok(match self.sweep.axis {
            AxisName::ChainLength => SweepAxis::ChainLength(integral()?),
            AxisName::StorageSite => SweepAxis::StorageSite(integral()?),
            AxisName::FieldAmplitude => SweepAxis::FieldAmplitude(values.clone()),
        })
    }
}
