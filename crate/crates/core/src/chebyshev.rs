//! Chebyshev expansion of `exp(-i H dt)` applied to a vector.
//!
//! With `H = c + r X` and the spectrum of `X` inside `[-1, 1]`,
//! `exp(-i H dt) = exp(-i c dt) [J_0(z) + 2 sum_k (-i)^k J_k(z) T_k(X)]`
//! where `z = r dt`. Only banded matrix-vector products are needed.

use num_complex::Complex64;

use crate::lattice::BandedHamiltonian;

/// Truncation target for a single step.
pub const STEP_TOLERANCE: f64 = 1e-12;

/// Smallest degree `K` whose tail bound `2 sum_{k>K} (z/2)^k / k!` is below `tol`.
pub fn degree_for(z: f64, tol: f64) -> usize {
    let half = 0.5 * z.abs();
    if half == 0.0 {
        return 0;
    }
    let ln_half = half.ln();
    let ln_tol = (tol / 4.0).ln();
    // ln((z/2)^k / k!), accumulated
    let mut ln_term = 0.0;
    let mut k = 0usize;
    loop {
        k += 1;
        ln_term += ln_half - (k as f64).ln();
        // beyond k > z/2 the terms at least halve, so the tail is at most twice the lead term
        if (k as f64) > z.abs() && ln_term < ln_tol {
            return k - 1;
        }
    }
}

/// `J_0(z) ..= J_kmax(z)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 sum J_{2k} = 1`.
pub fn bessel_j_sequence(z: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let za = z.abs();
    let top = kmax.max(za.ceil() as usize);
    let mut m = top + 32 + (40.0 * top as f64).sqrt() as usize;
    m += m % 2;

    let mut next = 0.0;
    let mut cur = 1e-280;
    let mut norm = 0.0;
    for k in (1..=m).rev() {
        if k <= kmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / za * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if z < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Chebyshev vectors `T_k(X) psi` for one constant Hamiltonian, reusable for
/// every time offset up to the one the basis was built for.
pub(crate) struct ChebyshevBasis {
    center: f64,
    radius: f64,
    vectors: Vec<Vec<Complex64>>,
}

impl ChebyshevBasis {
    pub(crate) fn new(h: &BandedHamiltonian, psi: &[Complex64], max_dt: f64, tol: f64) -> Self {
        let (lo, hi) = h.gershgorin();
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let radius = if half > 0.0 { half } else { 1.0 };
        let degree = degree_for(radius * max_dt, tol);

        let n = psi.len();
        let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(degree + 1);
        vectors.push(psi.to_vec());
        if degree >= 1 {
            let mut v1 = vec![Complex64::default(); n];
            h.apply_normalized(psi, &mut v1, center, radius);
            vectors.push(v1);
        }
        for k in 2..=degree {
            let mut vk = vec![Complex64::default(); n];
            h.apply_normalized(&vectors[k - 1], &mut vk, center, radius);
            for (x, prev) in vk.iter_mut().zip(&vectors[k - 2]) {
                *x = *x * 2.0 - prev;
            }
            vectors.push(vk);
        }
        ChebyshevBasis {
            center,
            radius,
            vectors,
        }
    }

    pub(crate) fn degree(&self) -> usize {
        self.vectors.len() - 1
    }

    fn coefficients(&self, dt: f64) -> Vec<Complex64> {
        let k = self.degree();
        let bessel = bessel_j_sequence(self.radius * dt, k);
        let global = Complex64::from_polar(1.0, -self.center * dt);
        // (-i)^k cycles 1, -i, -1, i
        let cycle = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        bessel
            .iter()
            .enumerate()
            .map(|(k, &j)| {
                let weight = if k == 0 { j } else { 2.0 * j };
                global * cycle[k % 4] * weight
            })
            .collect()
    }

    /// Full evolved vector at offset `dt`.
    pub(crate) fn combine(&self, dt: f64) -> Vec<Complex64> {
        let coeffs = self.coefficients(dt);
        let n = self.vectors[0].len();
        let mut out = vec![Complex64::default(); n];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    }

    /// Single component of the evolved vector at offset `dt`.
    pub(crate) fn component(&self, dt: f64, index: usize) -> Complex64 {
        self.coefficients(dt)
            .iter()
            .zip(&self.vectors)
            .map(|(c, v)| c * v[index])
            .sum()
    }
}
