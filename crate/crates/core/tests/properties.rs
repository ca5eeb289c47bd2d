use proptest::prelude::*;
use spinmem_core::*;

fn formula_profile() -> impl Strategy<Value = FieldProfile> {
    (0usize..4, 0.1f64..120.0).prop_map(|(k, h)| match k {
        0 => FieldProfile::parabola(h),
        1 => FieldProfile::pst(h),
        2 => FieldProfile::sine(h),
        _ => FieldProfile::triangle(h),
    })
}

fn random_field(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-30.0f64..30.0, n)
}

fn target_fidelity(h: &BandedHamiltonian, target: usize, times: &[f64]) -> Vec<f64> {
    let spectrum = diagonalize(h).unwrap();
    let psi = AmplitudeVector::localized(h.dim(), target).unwrap();
    SiteAmplitude::new(&spectrum, &psi, target)
        .unwrap()
        .along(times)
        .iter()
        .map(|c| c.norm())
        .collect()
}

fn all_magnitudes(h: &BandedHamiltonian, target: usize, t: f64) -> Vec<f64> {
    let spectrum = diagonalize(h).unwrap();
    let psi = AmplitudeVector::localized(h.dim(), target).unwrap();
    evolve_static(&spectrum, &psi, t)
        .unwrap()
        .amplitudes
        .iter()
        .map(|c| c.norm())
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn custom_chain(field: Vec<f64>, target: usize) -> ChainSpec {
    let n = field.len();
    ChainSpec::new(n, target, FieldProfile::custom(field)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formula_fields_are_mirror_symmetric(p in formula_profile(), n in 2usize..160) {
        let h = build_field(&p, n).unwrap();
        for i in 0..n {
            prop_assert!((h[i] - h[n - 1 - i]).abs() <= 1e-12 * p.amplitude);
        }
    }

    #[test]
    fn parabola_and_sine_vanish_at_ends(h_m in 0.1f64..120.0, n in 2usize..160) {
        for p in [FieldProfile::parabola(h_m), FieldProfile::sine(h_m)] {
            let h = build_field(&p, n).unwrap();
            prop_assert_eq!(h[0].abs(), 0.0);
            prop_assert_eq!(h[n - 1].abs(), 0.0);
        }
    }

    #[test]
    fn peak_reaches_amplitude_on_odd_chains(p in formula_profile(), half in 1usize..80) {
        let odd = 2 * half + 1;
        let peak = build_field(&p, odd).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!((peak - p.amplitude).abs() <= 1e-12 * p.amplitude);
        let even = 2 * half;
        let peak = build_field(&p, even).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(peak <= p.amplitude * (1.0 + 1e-12));
    }

    #[test]
    fn dense_matrix_is_symmetric(field in random_field(12), mu in prop::option::of(-1.0f64..1.0)) {
        let band2 = mu.map(|m| vec![m; 10]);
        let h = BandedHamiltonian::new(field, vec![-1.3; 11], band2).unwrap();
        let d = h.to_dense();
        for r in 0..12 {
            for c in 0..12 {
                prop_assert_eq!(d[r * 12 + c], d[c * 12 + r]);
            }
        }
    }

    #[test]
    fn evolution_is_unitary(field in random_field(24), t in -500.0f64..500.0, j in 1usize..=24) {
        let h = custom_chain(field, j).hamiltonian().unwrap();
        let spectrum = diagonalize(&h).unwrap();
        let psi = AmplitudeVector::localized(24, j).unwrap();
        let out = evolve_static(&spectrum, &psi, t).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn piecewise_evolution_is_unitary(field in random_field(16), tau in 0.05f64..1.0) {
        let chain = custom_chain(field, 1);
        let h = chain.hamiltonian().unwrap();
        let psi = AmplitudeVector::localized(16, 1).unwrap();
        let grid: Vec<f64> = (0..=25).map(|k| 0.4 * k as f64).collect();
        for s in evolve_piecewise(|_| Ok(h.clone()), &psi, &grid, tau).unwrap() {
            prop_assert!((s.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn field_sign_leaves_every_magnitude(field in random_field(18), t in 0.0f64..50.0, j in 1usize..=18) {
        let neg: Vec<f64> = field.iter().map(|h| -h).collect();
        let a = all_magnitudes(&custom_chain(field, j).hamiltonian().unwrap(), j, t);
        let b = all_magnitudes(&custom_chain(neg, j).hamiltonian().unwrap(), j, t);
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn coupling_sign_leaves_every_magnitude(field in random_field(18), t in 0.0f64..50.0) {
        let chain = custom_chain(field, 3);
        let a = all_magnitudes(&chain.hamiltonian().unwrap(), 3, t);
        let flipped = chain.with_coupling(-1.0).unwrap();
        let b = all_magnitudes(&flipped.hamiltonian().unwrap(), 3, t);
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn time_reversal(field in random_field(18), t in 0.0f64..80.0, j in 1usize..=18) {
        let h = custom_chain(field, j).hamiltonian().unwrap();
        let a = all_magnitudes(&h, j, t);
        let b = all_magnitudes(&h, j, -t);
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn constant_shift(field in random_field(20), c in -200.0f64..200.0) {
        let h = custom_chain(field, 1).hamiltonian().unwrap();
        let times: Vec<f64> = (0..200).map(|k| 0.173 * k as f64).collect();
        let a = target_fidelity(&h, 1, &times);
        let b = target_fidelity(&h.shifted(c), 1, &times);
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn mirror_target(p in formula_profile(), n in 2usize..60, j_raw in 0usize..60) {
        let j = 1 + j_raw % n;
        let chain = ChainSpec::new(n, j, p).unwrap();
        let mirror = chain.clone().with_target(n + 1 - j).unwrap();
        let times: Vec<f64> = (0..150).map(|k| 0.211 * k as f64).collect();
        let a = fidelity_at(&chain, None, &times).unwrap();
        let b = fidelity_at(&mirror, None, &times).unwrap();
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn window_max_grows_with_window(t1 in 0.0f64..20.0, len in 1.0f64..30.0, grow in 0.0f64..30.0) {
        let chain = ChainSpec::new(30, 1, FieldProfile::parabola(8.0)).unwrap();
        let curve = fidelity_trace(&chain, None, 100.0, Some(0.05)).unwrap();
        let (small, _) = max_in_window(&curve, (t1 + grow * 0.5, t1 + grow * 0.5 + len)).unwrap();
        let (large, _) = max_in_window(&curve, (t1, t1 + grow + len)).unwrap();
        prop_assert!(large >= small);
    }

    #[test]
    fn revivals_ascending_above_threshold(h_m in 2.0f64..40.0, threshold in 0.05f64..0.99) {
        let chain = ChainSpec::new(40, 1, FieldProfile::parabola(h_m)).unwrap();
        let curve = fidelity_trace(&chain, None, 60.0, None).unwrap();
        let revivals = revival_times(&curve, threshold).unwrap();
        prop_assert!(revivals.windows(2).all(|w| w[0] < w[1]));
        let peaks = local_maxima(&curve.times, &curve.values);
        for t in revivals {
            let v = peaks.iter().find(|p| p.0 == t).unwrap().1;
            prop_assert!(v >= threshold);
        }
    }

    #[test]
    fn drop_predictor_monotone(h_m in 4.01f64..500.0, n in 10usize..400) {
        let here = semiclassical_drop_site(h_m, n).unwrap();
        prop_assert!(semiclassical_drop_site(h_m * 1.3, n).unwrap() >= here);
        prop_assert!(semiclassical_drop_site(h_m, n + 7).unwrap() >= here);
    }

    #[test]
    fn unit_round_trip(s in 5.0f64..60.0, t in 1e-3f64..1e4) {
        let ctx = LatticeContext::rb87_1064nm(s).unwrap();
        let back = seconds_to_time(time_to_seconds(t, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!((back - t).abs() <= 1e-12 * t);
    }

    #[test]
    fn recoil_energy_scaling(s in 5.0f64..60.0, k in 1e6f64..1e8, m in 1e-27f64..1e-24, f in 1.5f64..4.0) {
        let base = LatticeContext::new(s, k, m).unwrap().recoil_energy();
        prop_assert!(base > 0.0);
        let wide = LatticeContext::new(s, k * f, m).unwrap().recoil_energy();
        let heavy = LatticeContext::new(s, k, m * f).unwrap().recoil_energy();
        prop_assert!((wide / base - f * f).abs() < 1e-12 * f * f);
        prop_assert!((heavy / base - 1.0 / f).abs() < 1e-12);
    }
}

#[test]
fn superposition_bound_on_grid() {
    for ip in 0..=40 {
        let p0 = ip as f64 / 40.0;
        for iphase in 0..16 {
            let phase = iphase as f64 * std::f64::consts::PI / 8.0;
            let alpha = Complex64::from_polar(p0.sqrt(), phase);
            let beta = Complex64::from_polar((1.0 - p0).sqrt(), 0.3 * phase);
            for k in 0..=20 {
                let fid = k as f64 / 20.0;
                let f = superposition_fidelity(alpha, beta, fid, 0.0).unwrap();
                assert!(f >= fid - 1e-15, "p0={p0} F={fid} f={f}");
            }
        }
    }
}

#[test]
fn phase_starts_at_zero() {
    let chain = ChainSpec::new(50, 1, FieldProfile::parabola(20.0)).unwrap();
    let curve = fidelity_trace_with_phase(&chain, 5.0, None).unwrap();
    assert_eq!(curve.phases.unwrap()[0], Some(0.0));
}

#[test]
fn tunneling_decreases_with_depth() {
    let mut prev = f64::INFINITY;
    for k in 0..=550 {
        let s = 5.0 + 0.1 * k as f64;
        let j = tunneling_energy(&LatticeContext::rb87_1064nm(s).unwrap())
            .unwrap()
            .joules;
        assert!(j < prev, "s = {s}");
        prev = j;
    }
}

#[test]
fn site_sweep_mirror_symmetric() {
    let base = ChainSpec::new(24, 1, FieldProfile::parabola(12.0)).unwrap();
    let table = sweep(
        &base,
        &SweepAxis::StorageSite((1..=24).collect()),
        None,
        (10.0, 60.0),
        None,
    )
    .unwrap();
    for i in 0..24 {
        let a = table.points[i].f_max;
        let b = table.points[23 - i].f_max;
        assert!((a - b).abs() < 1e-8, "site {}", i + 1);
    }
}

#[test]
fn free_chain_decays_quickly() {
    let chain = ChainSpec::new(100, 1, FieldProfile::zero()).unwrap();
    let curve = fidelity_trace(&chain, None, 20.0, None).unwrap();
    let early = curve.restrict(5.0, 20.0);
    assert!(early.values.iter().all(|&f| f < 0.3));
}

#[test]
fn strong_field_keeps_the_excitation() {
    let chain = ChainSpec::new(100, 1, FieldProfile::parabola(100.0)).unwrap();
    let curve = fidelity_trace(&chain, None, 50.0, None).unwrap();
    let min = curve.values.iter().cloned().fold(1.0, f64::min);
    assert!(min > 0.95, "min F = {min}");
}

#[test]
fn stronger_field_revives_sooner() {
    let first = |h_m: f64| {
        let chain = ChainSpec::new(100, 1, FieldProfile::parabola(h_m)).unwrap();
        let curve = fidelity_trace(&chain, None, 20.0, None).unwrap();
        revival_times(&curve, 0.9).unwrap()[0]
    };
    let (t10, t20) = (first(10.0), first(20.0));
    assert!(t20 < t10, "h_m=20: {t20}, h_m=10: {t10}");
}
