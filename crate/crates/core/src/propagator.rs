//! Exact and piecewise-constant propagation of single-excitation amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{ChebyshevBasis, STEP_TOLERANCE};
use crate::eigen;
use crate::error::{Error, Result};
use crate::lattice::BandedHamiltonian;

/// Eigen-decomposition `H = W diag(lambda) W^T` of a one-magnon matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Column-major; column `k` is the eigenvector of `eigenvalues[k]`.
    eigenvectors: Vec<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        let n = self.dim();
        &self.eigenvectors[k * n..(k + 1) * n]
    }

    /// Component `i` of eigenvector `k`.
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.eigenvectors[k * self.dim() + i]
    }

    /// `W^T psi`.
    fn project(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|k| {
                self.eigenvector(k)
                    .iter()
                    .zip(psi)
                    .map(|(w, c)| c * w)
                    .sum()
            })
            .collect()
    }
}

/// Diagonalize a banded one-magnon matrix.
///
/// Tridiagonal input goes straight to implicit-shift QL; with a second band
/// the matrix is first reduced by Householder reflections. Eigenvalues come
/// back ascending, and each eigenvector is signed so that its
/// largest-magnitude component is positive.
pub fn diagonalize(h: &BandedHamiltonian) -> Result<Spectrum> {
    let n = h.dim();
    let cap = 50 * n;
    let (mut d, off, mut z) = if h.is_tridiagonal() {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        (h.diag().to_vec(), h.band1().to_vec(), z)
    } else {
        eigen::householder_tridiagonal(&h.to_dense(), n)
    };
    eigen::tridiagonal_ql(&mut d, &off, &mut z, cap).map_err(|cap| Error::NoConvergence {
        cap,
        matrix: Box::new(h.clone()),
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n * n);
    for &k in &order {
        eigenvalues.push(d[k]);
        let col = &z[k * n..(k + 1) * n];
        let mut lead = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[lead].abs() {
                lead = i;
            }
        }
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        eigenvectors.extend(col.iter().map(|v| sign * v));
    }
    if eigenvalues.iter().chain(&eigenvectors).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("spectrum"));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Single-excitation state `sum_i c_i |i>` at time `time`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeVector {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl AmplitudeVector {
    /// Excitation localized on `site` (1-indexed) at `t = 0`.
    pub fn localized(n: usize, site: usize) -> Result<Self> {
        check_site(site, n)?;
        let mut amplitudes = vec![Complex64::default(); n];
        amplitudes[site - 1] = Complex64::new(1.0, 0.0);
        Ok(AmplitudeVector {
            amplitudes,
            time: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Amplitude on `site`, 1-indexed.
    pub fn amplitude(&self, site: usize) -> Result<Complex64> {
        check_site(site, self.dim())?;
        Ok(self.amplitudes[site - 1])
    }
}

fn check_site(site: usize, n: usize) -> Result<()> {
    if site == 0 || site > n {
        Err(Error::param("site", format!("{site} outside 1..={n}")))
    } else {
        Ok(())
    }
}

fn check_dims(spec: &Spectrum, psi: &AmplitudeVector) -> Result<()> {
    if spec.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            what: "amplitude vector",
            expected: spec.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// `W exp(-i t Lambda) W^T psi0`, advancing the timestamp by `t`.
pub fn evolve_static(spec: &Spectrum, psi0: &AmplitudeVector, t: f64) -> Result<AmplitudeVector> {
    check_dims(spec, psi0)?;
    if !t.is_finite() {
        return Err(Error::param("t", "must be finite"));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let n = spec.dim();
    let rotated: Vec<Complex64> = spec
        .project(&psi0.amplitudes)
        .into_iter()
        .zip(spec.eigenvalues())
        .map(|(c, &lambda)| c * Complex64::from_polar(1.0, -lambda * t))
        .collect();
    let mut out = vec![Complex64::default(); n];
    for (k, c) in rotated.iter().enumerate() {
        for (o, &w) in out.iter_mut().zip(spec.eigenvector(k)) {
            *o += c * w;
        }
    }
    Ok(AmplitudeVector {
        amplitudes: out,
        time: psi0.time + t,
    })
}

/// Amplitude of one site as a function of time, `sum_k w_k exp(-i lambda_k t)`,
/// at O(N) per sample. Zero elapsed time returns the initial amplitude exactly.
#[derive(Clone, Debug)]
pub struct SiteAmplitude {
    eigenvalues: Vec<f64>,
    weights: Vec<Complex64>,
    initial: Complex64,
}

impl SiteAmplitude {
    /// Exact phases are recomputed this often when sweeping a grid.
    const REANCHOR: usize = 256;

    pub fn new(spec: &Spectrum, psi0: &AmplitudeVector, site: usize) -> Result<Self> {
        check_dims(spec, psi0)?;
        check_site(site, spec.dim())?;
        let weights = spec
            .project(&psi0.amplitudes)
            .into_iter()
            .enumerate()
            .map(|(k, c)| c * spec.component(site - 1, k))
            .collect();
        Ok(SiteAmplitude {
            eigenvalues: spec.eigenvalues().to_vec(),
            weights,
            initial: psi0.amplitudes[site - 1],
        })
    }

    /// Amplitude after elapsed time `t`.
    pub fn at(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return self.initial;
        }
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(&lambda, w)| w * Complex64::from_polar(1.0, -lambda * t))
            .sum()
    }

    /// Amplitudes at every time of an ascending grid.
    ///
    /// Between exact re-anchors, phases advance by multiplying with a cached
    /// step factor. The step is reused while consecutive spacings agree to
    /// within the rounding of the times themselves, and is refined at each
    /// re-anchor from the whole span covered, so on a uniform grid the phase
    /// error stays at the level of `lambda * ulp(t)`.
    pub fn along(&self, times: &[f64]) -> Vec<Complex64> {
        let n = self.eigenvalues.len();
        // split real and imaginary parts so the per-mode loop vectorizes
        let w_re: Vec<f64> = self.weights.iter().map(|w| w.re).collect();
        let w_im: Vec<f64> = self.weights.iter().map(|w| w.im).collect();
        let mut p_re = vec![0.0; n];
        let mut p_im = vec![0.0; n];
        let mut s_re = vec![0.0; n];
        let mut s_im = vec![0.0; n];
        let mut step = f64::NAN;
        let mut anchor = (0usize, 0.0f64);
        let mut out = Vec::with_capacity(times.len());
        for (idx, &t) in times.iter().enumerate() {
            let jitter = 8.0 * f64::EPSILON * t.abs().max(1.0);
            let dt = if idx > 0 { t - times[idx - 1] } else { f64::NAN };
            let on_step = (dt - step).abs() <= jitter;
            if on_step && idx - anchor.0 < Self::REANCHOR {
                for k in 0..n {
                    let re = p_re[k] * s_re[k] - p_im[k] * s_im[k];
                    p_im[k] = p_re[k] * s_im[k] + p_im[k] * s_re[k];
                    p_re[k] = re;
                }
            } else {
                if idx > 0 {
                    let refined = if on_step {
                        (t - anchor.1) / (idx - anchor.0) as f64
                    } else {
                        dt
                    };
                    if refined.to_bits() != step.to_bits() {
                        step = refined;
                        for k in 0..n {
                            let (sin, cos) = (-self.eigenvalues[k] * step).sin_cos();
                            s_re[k] = cos;
                            s_im[k] = sin;
                        }
                    }
                }
                for k in 0..n {
                    let (sin, cos) = (-self.eigenvalues[k] * t).sin_cos();
                    p_re[k] = cos;
                    p_im[k] = sin;
                }
                anchor = (idx, t);
            }
            out.push(if t == 0.0 {
                self.initial
            } else {
                weighted_sum(&p_re, &p_im, &w_re, &w_im)
            });
        }
        out
    }
}

/// `sum_k p_k w_k` over split complex arrays, with four independent partial sums.
fn weighted_sum(p_re: &[f64], p_im: &[f64], w_re: &[f64], w_im: &[f64]) -> Complex64 {
    const LANES: usize = 4;
    let mut acc_re = [0.0; LANES];
    let mut acc_im = [0.0; LANES];
    let chunks = p_re.len() / LANES;
    for c in 0..chunks {
        for l in 0..LANES {
            let k = c * LANES + l;
            acc_re[l] += p_re[k] * w_re[k] - p_im[k] * w_im[k];
            acc_im[l] += p_re[k] * w_im[k] + p_im[k] * w_re[k];
        }
    }
    let mut re = (acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]);
    let mut im = (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3]);
    for k in chunks * LANES..p_re.len() {
        re += p_re[k] * w_re[k] - p_im[k] * w_im[k];
        im += p_re[k] * w_im[k] + p_im[k] * w_re[k];
    }
    Complex64::new(re, im)
}

fn check_piecewise_grid(grid: &[f64], start: f64, tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("tau", format!("must be positive and finite, got {tau}")));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid("non-finite time".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid("times must be strictly ascending".into()));
    }
    if let Some(&first) = grid.first() {
        if first < start {
            return Err(Error::InvalidTimeGrid(format!(
                "first time {first} precedes the initial state at {start}"
            )));
        }
    }
    if start < 0.0 {
        return Err(Error::InvalidTimeGrid("initial time must be nonnegative".into()));
    }
    Ok(())
}

/// Drive a piecewise-constant evolution, handing each grid point's Chebyshev
/// basis and offset to `observe`.
fn drive_piecewise<G, O>(
    mut generator: G,
    psi0: &AmplitudeVector,
    grid: &[f64],
    tau: f64,
    mut observe: O,
) -> Result<()>
where
    G: FnMut(u64) -> Result<BandedHamiltonian>,
    O: FnMut(&ChebyshevBasis, f64, f64),
{
    check_piecewise_grid(grid, psi0.time, tau)?;
    let mut psi = psi0.amplitudes.clone();
    let mut t = psi0.time;
    let mut interval = (t / tau).floor() as u64;
    let mut next = 0usize;
    while next < grid.len() {
        let h = generator(interval)?;
        if h.dim() != psi.len() {
            return Err(Error::DimensionMismatch {
                what: "interval Hamiltonian",
                expected: psi.len(),
                found: h.dim(),
            });
        }
        let end = (interval + 1) as f64 * tau;
        let basis = ChebyshevBasis::new(&h, &psi, end - t, STEP_TOLERANCE);
        while next < grid.len() && grid[next] < end {
            observe(&basis, grid[next] - t, grid[next]);
            next += 1;
        }
        if next < grid.len() {
            psi = basis.combine(end - t);
            t = end;
            interval += 1;
        }
    }
    Ok(())
}

/// Evolve under a Hamiltonian that is constant on `[k tau, (k+1) tau)`.
///
/// `generator(k)` supplies the matrix of interval `k`. Each interval is
/// propagated with a Chebyshev expansion whose degree keeps the truncation
/// error below `1e-12` for the interval's Gershgorin spectral radius.
/// Returns the state at every grid time.
pub fn evolve_piecewise<G>(
    generator: G,
    psi0: &AmplitudeVector,
    grid: &[f64],
    tau: f64,
) -> Result<Vec<AmplitudeVector>>
where
    G: FnMut(u64) -> Result<BandedHamiltonian>,
{
    let mut out = Vec::with_capacity(grid.len());
    drive_piecewise(generator, psi0, grid, tau, |basis, dt, t| {
        out.push(AmplitudeVector {
            amplitudes: basis.combine(dt),
            time: t,
        })
    })?;
    Ok(out)
}

/// Like [`evolve_piecewise`] but returns only the amplitude of `site`.
pub fn piecewise_site_amplitudes<G>(
    generator: G,
    psi0: &AmplitudeVector,
    grid: &[f64],
    tau: f64,
    site: usize,
) -> Result<Vec<Complex64>>
where
    G: FnMut(u64) -> Result<BandedHamiltonian>,
{
    check_site(site, psi0.dim())?;
    let mut out = Vec::with_capacity(grid.len());
    drive_piecewise(generator, psi0, grid, tau, |basis, dt, _| {
        out.push(basis.component(dt, site - 1))
    })?;
    Ok(out)
}

/// `F = |c_j|`, the square root of the target-site survival probability.
pub fn site_fidelity(psi: &AmplitudeVector, site: usize) -> Result<f64> {
    Ok(psi.amplitude(site)?.norm())
}

/// Phase of `c_j(t)` measured against the vacuum, `arg(c_j e^{i E_vac t})`,
/// in `(-pi, pi]`. `t` is the state's timestamp.
pub fn relative_phase(psi: &AmplitudeVector, site: usize, vacuum_energy: f64) -> Result<f64> {
    let c = psi.amplitude(site)?;
    phase_against_vacuum(c, psi.time, vacuum_energy).ok_or(Error::UndefinedPhase {
        site,
        magnitude: c.norm(),
    })
}

pub(crate) fn phase_against_vacuum(c: Complex64, t: f64, vacuum_energy: f64) -> Option<f64> {
    if c.norm() < 1e-12 {
        return None;
    }
    let theta = (c * Complex64::from_polar(1.0, vacuum_energy * t)).arg();
    Some(if theta <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        theta
    })
}

/// Fidelity of `alpha|0> + beta|1>` stored on the target site:
/// `| |alpha|^2 + e^{i theta} |beta|^2 F |`.
pub fn superposition_fidelity(
    alpha: Complex64,
    beta: Complex64,
    fidelity: f64,
    theta: f64,
) -> Result<f64> {
    let p0 = alpha.norm_sqr();
    let p1 = beta.norm_sqr();
    if ((p0 + p1) - 1.0).abs() > 1e-10 {
        return Err(Error::param(
            "alpha, beta",
            format!("|alpha|^2 + |beta|^2 = {} is not 1", p0 + p1),
        ));
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&fidelity) {
        return Err(Error::param("F", format!("{fidelity} outside [0, 1]")));
    }
    Ok((Complex64::from(p0) + Complex64::from_polar(p1 * fidelity, theta)).norm())
}
