//! Field profiles and the one-magnon Hamiltonian of an open XY chain.
//!
//! Sites are 1-indexed in the public API (`target`, profile formulas) and
//! 0-indexed in storage. The one-magnon matrix is real symmetric with at most
//! two off-diagonal bands: nearest-neighbour hopping and the optional
//! next-nearest term.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disorder::PerturbationCase;
use crate::error::{Error, Result};

/// How the XY coupling enters the single-excitation matrix.
///
/// Both share the on-site term `sum(h) - 2 h(i)` (field coupled to `sigma^z`).
/// `Pauli` writes the coupling as `J (sigma^x sigma^x + sigma^y sigma^y)`, so
/// the hopping is `-2J`. `TightBinding` writes it as `J (sigma^+ sigma^- + h.c.)`,
/// the hard-core-boson form where `J` is the tunneling energy, so the hopping
/// is `-J`. The two are not related by a time rescale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    #[default]
    TightBinding,
    Pauli,
}

impl Convention {
    /// Hopping amplitude per unit coupling, in magnitude.
    pub fn hopping_factor(self) -> f64 {
        match self {
            Convention::TightBinding => 1.0,
            Convention::Pauli => 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Zero,
    Parabola,
    Pst,
    Sine,
    Triangle,
    Custom,
}

impl std::str::FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "none" => Ok(FieldKind::Zero),
            "parabola" => Ok(FieldKind::Parabola),
            "pst" => Ok(FieldKind::Pst),
            "sine" => Ok(FieldKind::Sine),
            "triangle" => Ok(FieldKind::Triangle),
            "custom" => Ok(FieldKind::Custom),
            other => Err(Error::InvalidField(format!("unknown profile kind `{other}`"))),
        }
    }
}

/// Shape and strength of the on-site field `h(i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub kind: FieldKind,
    /// Peak amplitude `h_m`; ignored for `Zero` and `Custom`.
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<Vec<f64>>,
}

impl FieldProfile {
    pub fn new(kind: FieldKind, amplitude: f64) -> Self {
        FieldProfile {
            kind,
            amplitude,
            custom: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(FieldKind::Zero, 0.0)
    }

    pub fn parabola(h_m: f64) -> Self {
        Self::new(FieldKind::Parabola, h_m)
    }

    pub fn pst(h_m: f64) -> Self {
        Self::new(FieldKind::Pst, h_m)
    }

    pub fn sine(h_m: f64) -> Self {
        Self::new(FieldKind::Sine, h_m)
    }

    pub fn triangle(h_m: f64) -> Self {
        Self::new(FieldKind::Triangle, h_m)
    }

    pub fn custom(values: Vec<f64>) -> Self {
        FieldProfile {
            kind: FieldKind::Custom,
            amplitude: 0.0,
            custom: Some(values),
        }
    }

    pub fn with_amplitude(&self, h_m: f64) -> Self {
        FieldProfile {
            amplitude: h_m,
            ..self.clone()
        }
    }

    /// Largest field magnitude this profile can produce, used for time-grid defaults.
    pub fn peak_hint(&self) -> f64 {
        match self.kind {
            FieldKind::Zero => 0.0,
            FieldKind::Custom => self
                .custom
                .as_deref()
                .unwrap_or_default()
                .iter()
                .fold(0.0, |m, h| m.max(h.abs())),
            _ => self.amplitude,
        }
    }
}

/// On-site field values `h(1..=N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldVector(Vec<f64>);

impl FieldVector {
    pub fn new(values: Vec<f64>) -> Self {
        FieldVector(values)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn negated(&self) -> Self {
        FieldVector(self.0.iter().map(|h| -h).collect())
    }
}

impl std::ops::Deref for FieldVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Generate `h(1..=n)` for a profile.
///
/// Formula profiles are scaled by their continuum peak so that odd chains
/// reach exactly `h_m` at the centre site and even chains stay at or below it.
/// Every formula is evaluated on the mirrored index `min(i-1, n-i)`, which
/// makes `h(i) == h(n+1-i)` bit-exact.
pub fn build_field(profile: &FieldProfile, n: usize) -> Result<FieldVector> {
    let h_m = profile.amplitude;
    if !h_m.is_finite() || h_m < 0.0 {
        return Err(Error::InvalidField(format!(
            "amplitude must be finite and nonnegative, got {h_m}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidChain("chain must have at least one site".into()));
    }
    match profile.kind {
        FieldKind::Zero => return Ok(FieldVector(vec![0.0; n])),
        FieldKind::Custom => {
            let values = profile
                .custom
                .as_ref()
                .ok_or_else(|| Error::InvalidField("custom profile without values".into()))?;
            if values.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "custom field",
                    expected: n,
                    found: values.len(),
                });
            }
            if values.iter().any(|h| !h.is_finite()) {
                return Err(Error::NonFinite("custom field"));
            }
            return Ok(FieldVector(values.clone()));
        }
        _ => {}
    }
    if n < 2 {
        return Err(Error::InvalidField(format!(
            "{:?} profile needs at least 2 sites",
            profile.kind
        )));
    }

    let nf = n as f64;
    let values = (1..=n)
        .map(|i| {
            // distance from the nearer end, in sites
            let m = (i - 1).min(n - i) as f64;
            match profile.kind {
                FieldKind::Parabola => {
                    let x = m / (nf - 1.0);
                    4.0 * h_m * (x * x - x)
                }
                FieldKind::Pst => {
                    let k = m + 1.0;
                    // 2 sqrt(i(N+1-i)/(N+1)) peaks at sqrt(N+1)
                    2.0 * h_m * (k * (nf + 1.0 - k)).sqrt() / (nf + 1.0)
                }
                FieldKind::Sine => h_m * (m * std::f64::consts::PI / (nf - 1.0)).sin(),
                FieldKind::Triangle => h_m * 2.0 * (m + 1.0) / (nf + 1.0),
                FieldKind::Zero | FieldKind::Custom => unreachable!(),
            }
        })
        .collect();
    Ok(FieldVector(values))
}

/// Geometry and field of a chain with one stored excitation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    /// Storage site, 1-indexed.
    pub target: usize,
    pub profile: FieldProfile,
    #[serde(default)]
    pub convention: Convention,
}

fn default_coupling() -> f64 {
    1.0
}

impl ChainSpec {
    pub fn new(n: usize, target: usize, profile: FieldProfile) -> Result<Self> {
        let spec = ChainSpec {
            n,
            coupling: 1.0,
            target,
            profile,
            convention: Convention::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Result<Self> {
        self.coupling = coupling;
        self.validate()?;
        Ok(self)
    }

    pub fn with_target(mut self, target: usize) -> Result<Self> {
        self.target = target;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidChain("chain must have at least one site".into()));
        }
        if self.target == 0 || self.target > self.n {
            return Err(Error::InvalidChain(format!(
                "target site {} outside 1..={}",
                self.target, self.n
            )));
        }
        if !self.coupling.is_finite() {
            return Err(Error::InvalidChain("coupling must be finite".into()));
        }
        if self.coupling == 0.0 && self.n > 1 {
            return Err(Error::InvalidChain("coupling must be nonzero for N > 1".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> Result<FieldVector> {
        build_field(&self.profile, self.n)
    }

    /// Unperturbed one-magnon Hamiltonian.
    pub fn hamiltonian(&self) -> Result<BandedHamiltonian> {
        let field = self.field()?;
        build_hamiltonian(self, &field, &PerturbationSample::none(self.n))
    }
}

/// Real symmetric matrix with a diagonal, a first band and an optional second band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandedHamiltonian {
    diag: Vec<f64>,
    band1: Vec<f64>,
    band2: Option<Vec<f64>>,
}

impl BandedHamiltonian {
    pub fn new(diag: Vec<f64>, band1: Vec<f64>, band2: Option<Vec<f64>>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidChain("empty Hamiltonian".into()));
        }
        if band1.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                what: "first band",
                expected: n - 1,
                found: band1.len(),
            });
        }
        if let Some(b2) = &band2 {
            let expected = n.saturating_sub(2);
            if b2.len() != expected {
                return Err(Error::DimensionMismatch {
                    what: "second band",
                    expected,
                    found: b2.len(),
                });
            }
        }
        let all_finite = diag
            .iter()
            .chain(&band1)
            .chain(band2.iter().flatten())
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::NonFinite("Hamiltonian"));
        }
        Ok(BandedHamiltonian { diag, band1, band2 })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn band1(&self) -> &[f64] {
        &self.band1
    }

    pub fn band2(&self) -> Option<&[f64]> {
        self.band2.as_deref()
    }

    pub fn is_tridiagonal(&self) -> bool {
        self.band2.is_none()
    }

    /// Row-major dense expansion.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.diag[i];
        }
        for (i, &b) in self.band1.iter().enumerate() {
            a[i * n + i + 1] = b;
            a[(i + 1) * n + i] = b;
        }
        if let Some(b2) = &self.band2 {
            for (i, &b) in b2.iter().enumerate() {
                a[i * n + i + 2] = b;
                a[(i + 2) * n + i] = b;
            }
        }
        a
    }

    /// Same matrix with `c` added to every diagonal entry.
    pub fn shifted(&self, c: f64) -> Self {
        BandedHamiltonian {
            diag: self.diag.iter().map(|d| d + c).collect(),
            ..self.clone()
        }
    }

    /// Gershgorin enclosure `(lower, upper)` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.band1[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.band1[i].abs();
            }
            if let Some(b2) = &self.band2 {
                if i > 1 {
                    radius += b2[i - 2].abs();
                }
                if i + 2 < n {
                    radius += b2[i].abs();
                }
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// `out = (H - shift) * x / scale`, the normalized operator used by the
    /// Chebyshev stepper.
    pub(crate) fn apply_normalized(
        &self,
        x: &[Complex64],
        out: &mut [Complex64],
        shift: f64,
        scale: f64,
    ) {
        let n = self.dim();
        let inv = 1.0 / scale;
        for i in 0..n {
            let mut acc = x[i] * (self.diag[i] - shift);
            if i > 0 {
                acc += x[i - 1] * self.band1[i - 1];
            }
            if i + 1 < n {
                acc += x[i + 1] * self.band1[i];
            }
            if let Some(b2) = &self.band2 {
                if i > 1 {
                    acc += x[i - 2] * b2[i - 2];
                }
                if i + 2 < n {
                    acc += x[i + 2] * b2[i];
                }
            }
            out[i] = acc * inv;
        }
    }

    /// `out = H x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.apply_normalized(x, out, 0.0, 1.0);
    }
}

/// One draw of the defect or noise terms for a single realization
/// (and, for time-dependent noise, a single interval).
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSample {
    pub case_id: u8,
    /// Added to `h(i)`; length N.
    pub site_shift: Vec<f64>,
    /// Added to `J` on each bond; length N-1.
    pub coupling_shift: Vec<f64>,
    /// Next-nearest coupling `mu * J`, present only for case 3.
    pub nnn_strength: Option<f64>,
}

impl PerturbationSample {
    pub fn none(n: usize) -> Self {
        PerturbationSample {
            case_id: 0,
            site_shift: vec![0.0; n],
            coupling_shift: vec![0.0; n.saturating_sub(1)],
            nnn_strength: None,
        }
    }
}

/// Counter-based random stream for one realization of an ensemble.
///
/// Every `(base_seed, realization, interval)` triple keys its own ChaCha8
/// generator, so draws never depend on evaluation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealizationStream {
    pub base_seed: u64,
    pub realization: u64,
}

impl RealizationStream {
    const DOMAIN: u64 = 0x6d61_676e_6f6e_7631;

    pub fn new(base_seed: u64, realization: u64) -> Self {
        RealizationStream {
            base_seed,
            realization,
        }
    }

    pub fn rng(&self, interval: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        for (chunk, word) in key
            .chunks_exact_mut(8)
            .zip([self.base_seed, self.realization, interval, Self::DOMAIN])
        {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

fn uniform_draws(rng: &mut ChaCha8Rng, len: usize, strength: f64) -> Vec<f64> {
    (0..len)
        .map(|_| strength * rng.random_range(-1.0..=1.0))
        .collect()
}

/// Draw the perturbation terms of `case` for one realization.
///
/// Static cases ignore `interval`; time-dependent coupling noise keys a fresh
/// draw for each interval index.
pub fn sample_perturbation(
    case: &PerturbationCase,
    chain: &ChainSpec,
    stream: &RealizationStream,
    interval: u64,
) -> Result<PerturbationSample> {
    case.validate()?;
    let n = chain.n;
    let mut sample = PerturbationSample::none(n);
    sample.case_id = case.id();
    match *case {
        PerturbationCase::Clean => {}
        PerturbationCase::SiteDisorder { epsilon } => {
            sample.site_shift = uniform_draws(&mut stream.rng(0), n, epsilon);
        }
        PerturbationCase::CouplingDisorder { gamma } => {
            sample.coupling_shift = uniform_draws(&mut stream.rng(0), n.saturating_sub(1), gamma);
        }
        PerturbationCase::NextNearest { mu } => {
            sample.nnn_strength = Some(mu * chain.coupling);
        }
        PerturbationCase::CouplingNoise { eta, .. } => {
            sample.coupling_shift =
                uniform_draws(&mut stream.rng(interval), n.saturating_sub(1), eta);
        }
    }
    Ok(sample)
}

/// One-magnon matrix of the chain with field `field` and perturbation `sample`.
///
/// With `c` the convention's hopping factor: `band1[i] = -c(J + dJ_i)`,
/// `band2[i] = -c mu J`, `diag[i] = sum_k h'(k) - 2h'(i)` where
/// `h' = h + site_shift`. The constant `sum_k h'(k)` is the vacuum energy
/// and is kept so that phases relative to the vacuum need no bookkeeping.
pub fn build_hamiltonian(
    chain: &ChainSpec,
    field: &FieldVector,
    sample: &PerturbationSample,
) -> Result<BandedHamiltonian> {
    chain.validate()?;
    let n = chain.n;
    check_len("field", n, field.len())?;
    check_len("site shift", n, sample.site_shift.len())?;
    check_len("coupling shift", n - 1, sample.coupling_shift.len())?;

    let c = chain.convention.hopping_factor();
    let h_eff: Vec<f64> = field
        .iter()
        .zip(&sample.site_shift)
        .map(|(h, dh)| h + dh)
        .collect();
    let total: f64 = h_eff.iter().sum();
    let diag = h_eff.iter().map(|h| total - 2.0 * h).collect();
    let band1 = sample
        .coupling_shift
        .iter()
        .map(|dj| -c * (chain.coupling + dj))
        .collect();
    let band2 = sample
        .nnn_strength
        .map(|nnn| vec![-c * nnn; n.saturating_sub(2)]);
    BandedHamiltonian::new(diag, band1, band2)
}

/// Energy of the empty chain `|00...0>`; independent of the convention.
pub fn vacuum_energy(field: &[f64]) -> f64 {
    field.iter().sum::<f64>()
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
