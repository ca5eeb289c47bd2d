//! Test-only reference integrator, independent of the eigensolver and the
//! Chebyshev stepper: classical RK4 on the dense matrix.

#![allow(dead_code)]

use spinmem_core::{BandedHamiltonian, Complex64};

pub const ORACLE_STEP: f64 = 1e-4;

fn dense_rhs(a: &[f64], n: usize, psi: &[Complex64], out: &mut [Complex64]) {
    // -i H psi
    for r in 0..n {
        let mut acc = Complex64::default();
        for c in 0..n {
            let h = a[r * n + c];
            if h != 0.0 {
                acc += psi[c] * h;
            }
        }
        out[r] = Complex64::new(acc.im, -acc.re);
    }
}

/// Integrate `i dpsi/dt = H(t) psi` with fixed-step RK4, where `hamiltonian(t)`
/// gives the matrix in force at time `t` (sampled at the midpoint of each step).
/// Returns the state at each requested time (ascending, starting at or after 0).
pub fn rk4_trajectory<F>(
    mut hamiltonian: F,
    psi0: &[Complex64],
    times: &[f64],
    step: f64,
) -> Vec<Vec<Complex64>>
where
    F: FnMut(f64) -> BandedHamiltonian,
{
    let n = psi0.len();
    let mut psi = psi0.to_vec();
    let mut t = 0.0f64;
    let mut out = Vec::with_capacity(times.len());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
    );
    for &target in times {
        while target - t > 1e-12 {
            let h = (target - t).min(step);
            let a = hamiltonian(t + 0.5 * h).to_dense();
            dense_rhs(&a, n, &psi, &mut k1);
            for i in 0..n {
                tmp[i] = psi[i] + k1[i] * (0.5 * h);
            }
            dense_rhs(&a, n, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = psi[i] + k2[i] * (0.5 * h);
            }
            dense_rhs(&a, n, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = psi[i] + k3[i] * h;
            }
            dense_rhs(&a, n, &tmp, &mut k4);
            for i in 0..n {
                psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
            t += h;
        }
        out.push(psi.clone());
    }
    out
}

/// Deterministic pseudo-random field in `[-scale, scale]` (LCG), so tests do
/// not share the library's random streams.
pub fn scrambled_field(n: usize, seed: u64, scale: f64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            scale * (2.0 * u - 1.0)
        })
        .collect()
}
