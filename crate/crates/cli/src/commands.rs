use spinmem_core::{
    default_time_step, detect_drop, ensemble_statistics, fidelity_trace, fidelity_trace_with_phase,
    local_maxima, revival_times, semiclassical_drop_site, semiclassical_regime, sweep,
    tunneling_energy, uniform_grid, units, EnsembleSpec, FieldKind, LatticeContext,
    PerturbationCase,
};

use crate::config::RunConfig;
use crate::emit::Payload;
use crate::error::CliError;

pub fn trace(config: &RunConfig) -> Result<Payload, CliError> {
    let chain = config.chain_spec()?;
    let ensemble = config.ensemble_spec()?;
    let t = &config.trace;
    let curve = if t.phase {
        if ensemble.is_some() {
            return Err(CliError::Validation(
                "trace.phase requires the clean chain (perturbation.case = 0)".into(),
            ));
        }
        fidelity_trace_with_phase(&chain, t.t_max, t.dt)?
    } else {
        fidelity_trace(&chain, ensemble.as_ref(), t.t_max, t.dt)?
    };
    Ok(Payload::Curve {
        t: curve.times,
        f: curve.values,
        theta: curve.phases,
    })
}

pub fn ensemble(config: &RunConfig) -> Result<Payload, CliError> {
    let chain = config.chain_spec()?;
    let spec = match config.ensemble_spec()? {
        Some(spec) => spec,
        None => EnsembleSpec::new(
            PerturbationCase::Clean,
            config.perturbation.realizations,
            config.seed,
        )?,
    };
    let c = &config.ensemble;
    if c.t_max.is_nan() || c.t_max <= 0.0 {
        return Err(CliError::Validation(format!(
            "ensemble.t_max must be positive, got {}",
            c.t_max
        )));
    }
    let dt = c.dt.unwrap_or_else(|| default_time_step(chain.profile.peak_hint()));
    let times = uniform_grid(0.0, c.t_max, dt)?;
    let stats = ensemble_statistics(&chain, &spec, &times)?;
    Ok(Payload::Ensemble {
        realizations: stats.realizations,
        f: stats.fidelity(),
        t: times,
        population: stats.mean_population,
        population_stderr: stats.std_error,
    })
}

pub fn peaks(config: &RunConfig) -> Result<Payload, CliError> {
    let chain = config.chain_spec()?;
    let ensemble = config.ensemble_spec()?;
    let p = &config.peaks;
    let curve = fidelity_trace(&chain, ensemble.as_ref(), p.t_max, p.dt)?;
    let revivals = revival_times(&curve, p.threshold)?;
    let (t, f) = local_maxima(&curve.times, &curve.values).into_iter().unzip();
    Ok(Payload::Peaks {
        threshold: p.threshold,
        t,
        f,
        revivals,
    })
}

pub fn sweep_table(config: &RunConfig) -> Result<Payload, CliError> {
    let chain = config.chain_spec()?;
    let ensemble = config.ensemble_spec()?;
    let axis = config.sweep_axis()?;
    let s = &config.sweep;
    if !(s.drop_fraction > 0.0 && s.drop_fraction < 1.0) {
        return Err(CliError::Validation(format!(
            "sweep.drop_fraction must lie in (0, 1), got {}",
            s.drop_fraction
        )));
    }
    let table = sweep(&chain, &axis, ensemble.as_ref(), (s.window[0], s.window[1]), s.dt)?;
    let drop_at = detect_drop(&table, s.drop_fraction);
    Ok(Payload::Sweep {
        axis: s.axis,
        value: table.points.iter().map(|p| p.value).collect(),
        f_max: table.points.iter().map(|p| p.f_max).collect(),
        t_at_max: table.points.iter().map(|p| p.t_at_max).collect(),
        drop_fraction: s.drop_fraction,
        drop_at,
    })
}

pub fn predict(config: &RunConfig) -> Result<Payload, CliError> {
    let c = &config.chain;
    if c.field != FieldKind::Parabola {
        log::warn!("the drop-site estimate assumes a parabolic field, got {:?}", c.field);
    }
    Ok(Payload::Predict {
        h_m: c.h_m,
        n: c.n,
        semiclassical_regime: semiclassical_regime(c.h_m),
        drop_site: semiclassical_drop_site(c.h_m, c.n)?,
    })
}

pub fn units_table(config: &RunConfig) -> Result<Payload, CliError> {
    let u = &config.units;
    let ctx = LatticeContext::from_wavelength(
        u.s,
        u.wavelength_nm * 1e-9,
        u.mass_u * units::ATOMIC_MASS_UNIT,
    )?;
    let tunneling = tunneling_energy(&ctx)?;
    let unit = units::time_unit(&ctx)?;
    let c = &config.chain;
    let omega = if c.h_m > 0.0 && c.n >= 2 {
        Some(units::trap_frequency(&ctx, c.h_m, c.n)?)
    } else {
        None
    };
    Ok(Payload::Units {
        s: u.s,
        recoil_energy_j: ctx.recoil_energy(),
        tunneling_j: tunneling.joules,
        tunneling_over_recoil: tunneling.recoil_fraction,
        within_fit_range: tunneling.within_fit_range,
        hbar_over_j_s: unit,
        trap_omega_rad_s: omega,
        trap_frequency_hz: omega.map(|w| w / (2.0 * std::f64::consts::PI)),
        seconds: u.times.iter().map(|t| t * unit).collect(),
        t: u.times.clone(),
    })
}
