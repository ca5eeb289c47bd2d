//! Command-line front end for the `spinmem` simulator.
//!
//! Settings resolve in the order defaults, `--config` file, flags (with
//! `SPINMEM_*` environment variables standing in for the global flags). All
//! numerics finish before any file is written, so a failed run leaves no
//! output behind.

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spinmem_core::{Convention, FieldKind};

use crate::config::{AxisName, RunConfig};
use crate::emit::{Format, Record};
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "spinmem", version, about = "Edge-site quantum memory in a field-confined XY chain")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML config; a `.json` or `.dat` output is also accepted and re-runs its embedded config.
    #[arg(long, global = true, env = "SPINMEM_CONFIG")]
    pub config: Option<PathBuf>,
    /// Base seed of the random streams [config default: 1].
    #[arg(long, global = true, env = "SPINMEM_SEED")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "SPINMEM_OUT", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, env = "SPINMEM_FORMAT", value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for sweeps and ensembles [default: all cores].
    #[arg(long, global = true, env = "SPINMEM_THREADS")]
    pub threads: Option<usize>,

    /// Number of sites [config default: 100].
    #[arg(long = "n", global = true)]
    pub n: Option<usize>,
    /// Storage site, 1-indexed [config default: 1].
    #[arg(long, global = true)]
    pub target: Option<usize>,
    /// zero, parabola, pst, sine, triangle or custom [config default: parabola].
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<FieldKind>,
    /// Peak field amplitude in units of J [config default: 10].
    #[arg(long = "h-m", global = true, allow_negative_numbers = true)]
    pub h_m: Option<f64>,
    /// tight-binding or pauli [config default: tight-binding].
    #[arg(long, global = true, value_parser = parse_convention)]
    pub convention: Option<Convention>,
    /// Perturbation case 0..=4 [config default: 0].
    #[arg(long, global = true)]
    pub case: Option<u8>,
    /// Ensemble size [config default: 200].
    #[arg(long, global = true)]
    pub realizations: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity F(t) at the storage site, ensemble-averaged when a perturbation is set.
    Trace {
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Add the phase against the vacuum (clean chain only).
        #[arg(long)]
        phase: bool,
    },
    /// Windowed maximum fidelity along one parameter.
    Sweep {
        #[arg(long, value_enum)]
        axis: Option<AxisName>,
        /// Comma-separated, strictly ascending.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Option<Vec<f64>>,
        /// Start and end time, comma-separated.
        #[arg(long, value_parser = parse_window)]
        window: Option<[f64; 2]>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "drop-fraction")]
        drop_fraction: Option<f64>,
    },
    /// Ensemble statistics of the storage-site population.
    Ensemble {
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Local maxima of the fidelity and the revivals above a threshold.
    Peaks {
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Semiclassical estimate of the dropping site for a parabolic field.
    Predict,
    /// Optical-lattice units: hbar/J, trap frequency, time conversion.
    Units {
        /// Lattice depth in recoil energies [config default: 23].
        #[arg(long)]
        s: Option<f64>,
        #[arg(long = "wavelength-nm")]
        wavelength_nm: Option<f64>,
        #[arg(long = "mass-u")]
        mass_u: Option<f64>,
        /// Comma-separated dimensionless times.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        times: Option<Vec<f64>>,
    },
    /// Print the default config, a complete reference of every setting.
    Defaults,
}

fn parse_field(s: &str) -> Result<FieldKind, String> {
    s.parse().map_err(|e: spinmem_core::Error| e.to_string())
}

fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
            b.trim().parse().map_err(|e| format!("{b}: {e}"))?,
        ]),
        _ => Err(format!("expected `start,end`, got `{s}`")),
    }
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    match s {
        "tight-binding" => Ok(Convention::TightBinding),
        "pauli" => Ok(Convention::Pauli),
        other => Err(format!("unknown convention `{other}` (tight-binding or pauli)")),
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Trace { .. } => "trace",
            Command::Sweep { .. } => "sweep",
            Command::Ensemble { .. } => "ensemble",
            Command::Peaks { .. } => "peaks",
            Command::Predict => "predict",
            Command::Units { .. } => "units",
            Command::Defaults => "defaults",
        }
    }

    fn apply(&self, c: &mut RunConfig) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        match self {
            Command::Trace { t_max, dt, phase } => {
                set(&mut c.trace.t_max, t_max);
                if dt.is_some() {
                    c.trace.dt = *dt;
                }
                c.trace.phase |= *phase;
            }
            Command::Sweep {
                axis,
                values,
                window,
                dt,
                drop_fraction,
            } => {
                set(&mut c.sweep.axis, axis);
                set(&mut c.sweep.values, values);
                set(&mut c.sweep.window, window);
                if dt.is_some() {
                    c.sweep.dt = *dt;
                }
                set(&mut c.sweep.drop_fraction, drop_fraction);
            }
            Command::Ensemble { t_max, dt } => {
                set(&mut c.ensemble.t_max, t_max);
                if dt.is_some() {
                    c.ensemble.dt = *dt;
                }
            }
            Command::Peaks { t_max, dt, threshold } => {
                set(&mut c.peaks.t_max, t_max);
                if dt.is_some() {
                    c.peaks.dt = *dt;
                }
                set(&mut c.peaks.threshold, threshold);
            }
            Command::Units {
                s,
                wavelength_nm,
                mass_u,
                times,
            } => {
                set(&mut c.units.s, s);
                set(&mut c.units.wavelength_nm, wavelength_nm);
                set(&mut c.units.mass_u, mass_u);
                set(&mut c.units.times, times);
            }
            Command::Predict | Command::Defaults => {}
        }
    }
}

impl GlobalArgs {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.n {
            c.chain.n = v;
        }
        if let Some(v) = self.target {
            c.chain.target = v;
        }
        if let Some(v) = self.field {
            c.chain.field = v;
        }
        if let Some(v) = self.h_m {
            c.chain.h_m = v;
        }
        if let Some(v) = self.convention {
            c.chain.convention = v;
        }
        if let Some(v) = self.case {
            c.perturbation.case = v;
        }
        if let Some(v) = self.realizations {
            c.perturbation.realizations = v;
        }
    }
}

/// Config after applying the file and the flags, validated.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.global.apply(&mut config);
    cli.command.apply(&mut config);
    config.validate()?;
    Ok(config)
}

/// Runs the numerics for `command` without touching the filesystem.
pub fn compute(command: &Command, config: &RunConfig) -> Result<Record, CliError> {
    let result = match command {
        Command::Trace { .. } => commands::trace(config)?,
        Command::Sweep { .. } => commands::sweep_table(config)?,
        Command::Ensemble { .. } => commands::ensemble(config)?,
        Command::Peaks { .. } => commands::peaks(config)?,
        Command::Predict => commands::predict(config)?,
        Command::Units { .. } => commands::units_table(config)?,
        Command::Defaults => unreachable!("defaults produces no record"),
    };
    Ok(Record {
        command: command.name().to_string(),
        config: config.clone(),
        result,
    })
}

/// Full run; returns the paths written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    if let Command::Defaults = cli.command {
        print!(
            "# spinmem defaults; every key is optional in a --config file\n{}",
            RunConfig::default().to_toml()
        );
        return Ok(Vec::new());
    }
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    let config = resolve(cli)?;
    let record = compute(&cli.command, &config)?;
    emit::write_all(&cli.global.out, &record.render(cli.global.format))
}
