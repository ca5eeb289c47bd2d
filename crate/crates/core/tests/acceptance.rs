//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p spinmem-core --test acceptance`.

mod common;

use std::time::Instant;

use common::{rk4_trajectory, scrambled_field, ORACLE_STEP};
use spinmem_core::*;

const SEED: u64 = 20_130_611;
const LONG_WINDOW: (f64, f64) = (100.0, 1000.0);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn edge_chain(n: usize, profile: FieldProfile) -> ChainSpec {
    ChainSpec::new(n, 1, profile).unwrap()
}

fn window_max(chain: &ChainSpec, ensemble: Option<&EnsembleSpec>, window: (f64, f64)) -> (f64, f64) {
    let dt = default_time_step(chain.profile.peak_hint());
    let times = uniform_grid(window.0, window.1, dt).unwrap();
    let values = fidelity_at(chain, ensemble, &times).unwrap();
    let curve = FidelityCurve {
        times,
        values,
        phases: None,
        chain: chain.clone(),
        ensemble: ensemble.copied(),
    };
    max_in_window(&curve, window).unwrap()
}

/// No field: fast decay, no revival.
fn criterion_1() -> Outcome {
    let chain = edge_chain(100, FieldProfile::zero());
    let trace = fidelity_trace(&chain, None, 200.0, None).unwrap();
    let late = trace.restrict(5.0, 200.0);
    let (peak_late, t_peak) = max_in_window(&late, (5.0, 200.0)).unwrap();
    let (f_max, _) = window_max(&chain, None, LONG_WINDOW);
    outcome(
        peak_late < 0.3 && f_max < 0.5,
        format!(
            "max F on [5,200] = {peak_late:.4} at t = {t_peak:.2} (need < 0.3); \
             F_max on [100,1000] = {f_max:.4} (need < 0.5)"
        ),
    )
}

/// Strong parabola: F stays close to one.
fn criterion_2() -> Outcome {
    let chain = edge_chain(100, FieldProfile::parabola(100.0));
    let trace = fidelity_trace(&chain, None, 200.0, None).unwrap();
    let min = trace.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = trace.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        min >= 0.95 && max >= 0.999,
        format!("min F = {min:.4} (need >= 0.95), max F = {max:.6} (need >= 0.999)"),
    )
}

/// Windowed maximum independent of chain length at h_m = 10.
fn criterion_3() -> Outcome {
    let lengths = [20usize, 60, 100, 130];
    let with_field: Vec<f64> = lengths
        .iter()
        .map(|&n| window_max(&edge_chain(n, FieldProfile::parabola(10.0)), None, LONG_WINDOW).0)
        .collect();
    let without: Vec<f64> = lengths
        .iter()
        .map(|&n| window_max(&edge_chain(n, FieldProfile::zero()), None, LONG_WINDOW).0)
        .collect();
    let pass = with_field.iter().all(|&f| f >= 0.99) && without.iter().all(|&f| f < 0.5);
    outcome(
        pass,
        format!(
            "N = {lengths:?}: h_m=10 F_max = {} (need >= 0.99); h_m=0 F_max = {} (need < 0.5)",
            fmt_list(&with_field),
            fmt_list(&without)
        ),
    )
}

/// All four symmetric profiles store the edge excitation.
fn criterion_4() -> Outcome {
    let profiles = [
        ("parabola", FieldProfile::parabola(20.0)),
        ("pst", FieldProfile::pst(20.0)),
        ("sine", FieldProfile::sine(20.0)),
        ("triangle", FieldProfile::triangle(20.0)),
    ];
    let results: Vec<(&str, f64)> = profiles
        .iter()
        .map(|(name, p)| (*name, window_max(&edge_chain(100, p.clone()), None, LONG_WINDOW).0))
        .collect();
    outcome(
        results.iter().all(|(_, f)| *f >= 0.95),
        results
            .iter()
            .map(|(n, f)| format!("{n} {f:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
            + " (need >= 0.95)",
    )
}

/// Dropping site of the storage-site sweep, numerical and semiclassical.
fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (h_m, reported) in [(10.0, 21usize), (50.0, 38usize)] {
        let base = edge_chain(100, FieldProfile::parabola(h_m));
        let table = sweep(
            &base,
            &SweepAxis::StorageSite((1..=50).collect()),
            None,
            LONG_WINDOW,
            None,
        )
        .unwrap();
        let detected = detect_drop(&table, DROP_FRACTION).map(|v| v as usize);
        let predicted = semiclassical_drop_site(h_m, 100).unwrap();
        let ok_num = detected.is_some_and(|d| d.abs_diff(reported) <= 2);
        let ok_pred = detected.is_some_and(|d| d.abs_diff(predicted) <= 3);
        pass &= ok_num && ok_pred;
        parts.push(format!(
            "h_m={h_m}: detected {detected:?} (need {reported}+-2), predictor {predicted} (need detected+-3)"
        ));
    }
    outcome(pass, parts.join("; "))
}

/// Defects and noise at ten percent strength.
fn criterion_6() -> Outcome {
    let chain = edge_chain(100, FieldProfile::parabola(60.0));
    let strengths = Strengths::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for id in 1..=3u8 {
        let case = PerturbationCase::from_id(id, &strengths).unwrap();
        let ens = EnsembleSpec::new(case, EnsembleSpec::DEFAULT_REALIZATIONS, SEED).unwrap();
        let (f, _) = window_max(&chain, Some(&ens), LONG_WINDOW);
        pass &= f >= 0.9;
        parts.push(format!("case {id} F_max {f:.4}"));
    }
    let case = PerturbationCase::from_id(4, &strengths).unwrap();
    let ens = EnsembleSpec::new(case, EnsembleSpec::DEFAULT_REALIZATIONS, SEED).unwrap();
    let trace = fidelity_trace(&chain, Some(&ens), 200.0, None).unwrap();
    let maxima = local_maxima(&trace.times, &trace.values);
    let lo = maxima.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let hi = maxima.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
    let ok4 = !maxima.is_empty() && lo >= 0.92 && hi <= 1.0 + 1e-12;
    pass &= ok4;
    parts.push(format!(
        "case 4: {} local maxima in [{lo:.4}, {hi:.4}] (need within [0.92, 1])",
        maxima.len()
    ));
    outcome(pass, parts.join("; ") + " (static need >= 0.9)")
}

/// Laboratory units for 87Rb at 1064 nm, s = 23.
fn criterion_7() -> Outcome {
    let ctx = LatticeContext::rb87_1064nm(23.0).unwrap();
    let unit = time_to_seconds(1.0, &ctx).unwrap();
    let omega = trap_frequency(&ctx, 1.0, 100).unwrap();
    let nu = omega / (2.0 * std::f64::consts::PI);
    outcome(
        (0.04..=0.06).contains(&unit) && (0.7..=1.3).contains(&nu),
        format!("hbar/J = {unit:.4} s (need [0.04, 0.06]); omega/2pi = {nu:.3} Hz (need [0.7, 1.3])"),
    )
}

/// Always-on property suite.
fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool, value: f64| {
        if !ok {
            failures.push(format!("{name} ({value:e})"));
        }
    };

    // unitarity
    let chain = edge_chain(60, FieldProfile::parabola(30.0));
    let spectrum = diagonalize(&chain.hamiltonian().unwrap()).unwrap();
    let psi = AmplitudeVector::localized(60, 1).unwrap();
    let worst = [0.7, 13.0, 250.0, -40.0]
        .iter()
        .map(|&t| (evolve_static(&spectrum, &psi, t).unwrap().norm() - 1.0).abs())
        .fold(0.0, f64::max);
    check("unitarity", worst < 1e-10, worst);

    // spectral vs integrator
    let n = 20;
    let random = ChainSpec::new(n, 1, FieldProfile::custom(scrambled_field(n, 8, 4.0))).unwrap();
    let h = random.hamiltonian().unwrap();
    let spec_r = diagonalize(&h).unwrap();
    let psi_r = AmplitudeVector::localized(n, 1).unwrap();
    let times = [2.5, 10.0];
    let oracle = rk4_trajectory(|_| h.clone(), &psi_r.amplitudes, &times, ORACLE_STEP);
    let mut dev: f64 = 0.0;
    for (t, o) in times.iter().zip(&oracle) {
        let s = evolve_static(&spec_r, &psi_r, *t).unwrap();
        for (a, b) in s.amplitudes.iter().zip(o) {
            dev = dev.max((a.norm() - b.norm()).abs());
        }
    }
    check("integrator agreement", dev < 1e-6, dev);

    // invariances of F
    let times: Vec<f64> = (0..400).map(|k| 0.137 * k as f64).collect();
    let base = edge_chain(40, FieldProfile::parabola(15.0));
    let field = base.field().unwrap();
    let reference = fidelity_at(&base, None, &times).unwrap();
    let variants: Vec<(&str, ChainSpec)> = vec![
        ("field sign", ChainSpec { profile: FieldProfile::custom(field.negated().into_inner()), ..base.clone() }),
        ("coupling sign", base.clone().with_coupling(-1.0).unwrap()),
        ("mirror", base.clone().with_target(40).unwrap()),
    ];
    for (name, v) in variants {
        let f = fidelity_at(&v, None, &times).unwrap();
        let d = max_diff(&reference, &f);
        check(name, d < 1e-8, d);
    }
    let shifted = base.hamiltonian().unwrap().shifted(17.3);
    let sp = diagonalize(&shifted).unwrap();
    let psi40 = AmplitudeVector::localized(40, 1).unwrap();
    let f_shift: Vec<f64> = SiteAmplitude::new(&sp, &psi40, 1)
        .unwrap()
        .along(&times)
        .iter()
        .map(|c| c.norm())
        .collect();
    let d = max_diff(&reference, &f_shift);
    check("constant shift", d < 1e-8, d);
    let sp0 = diagonalize(&base.hamiltonian().unwrap()).unwrap();
    let eval = SiteAmplitude::new(&sp0, &psi40, 1).unwrap();
    let d = times
        .iter()
        .map(|&t| (eval.at(t).norm() - eval.at(-t).norm()).abs())
        .fold(0.0, f64::max);
    check("time reversal", d < 1e-8, d);

    // f >= F at theta = 0
    let mut worst_gap: f64 = 0.0;
    for ip in 0..=20 {
        let p0 = ip as f64 / 20.0;
        for iphase in 0..8 {
            let phase = iphase as f64 * std::f64::consts::PI / 4.0;
            let alpha = Complex64::from_polar(p0.sqrt(), phase);
            let beta = Complex64::from_polar((1.0 - p0).sqrt(), -0.5 * phase);
            for &fid in &[0.0, 0.3, 0.9, 1.0] {
                let f = superposition_fidelity(alpha, beta, fid, 0.0).unwrap();
                worst_gap = worst_gap.min(f - fid);
            }
        }
    }
    check("superposition bound", worst_gap >= -1e-15, worst_gap);

    // ensemble determinism
    let small = edge_chain(30, FieldProfile::parabola(20.0));
    let ens = EnsembleSpec::new(PerturbationCase::CouplingNoise { eta: 0.1, tau: 0.1 }, 24, SEED).unwrap();
    let grid = uniform_grid(0.0, 20.0, 0.05).unwrap();
    let a = ensemble_average_fidelity(&small, &ens, &grid).unwrap();
    let b = ensemble_average_fidelity(&small, &ens, &grid).unwrap();
    let identical = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
    check("ensemble determinism", identical, 0.0);

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "unitarity, integrator, invariances, f >= F, determinism".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn fmt_list(v: &[f64]) -> String {
    format!(
        "[{}]",
        v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "no-field decay", criterion_1),
        (2, "strong-field breathing", criterion_2),
        (3, "length independence", criterion_3),
        (4, "profile equivalence", criterion_4),
        (5, "drop site", criterion_5),
        (6, "noise robustness", criterion_6),
        (7, "laboratory units", criterion_7),
        (8, "property suite", criterion_8),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {id} [{}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
